#include "trqd/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace trqd {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string env_or(const std::string& fallback) {
  if (const char* dir = std::getenv("TR_OUTPUT_DIR"); dir && *dir) return dir;
  return fallback;
}

double tilt_or_default(const ScenarioConfig& config) {
  return std::isnan(config.tilt) ? kPi / 4.0 : config.tilt;
}

double rotation_rate_or_default(const ScenarioConfig& config) {
  return std::isnan(config.rotation_rate) ? 0.5 * config.gamma * config.b0
                                          : config.rotation_rate;
}

PropagationResult propagate_leg(const HamiltonianSchedule& schedule,
                                const ScenarioConfig& config, const StateVector& psi0) {
  const std::optional<StateVector> initial(psi0);
  if (schedule.commuting_family())
    return propagate_commuting(schedule, config.quadrature_points, config.hbar, initial,
                               config.trajectory_samples);
  if (config.n_steps > 0)
    return propagate_ordered(schedule, config.n_steps, config.hbar, initial,
                             config.trajectory_samples);
  return converge(schedule, config.target_tol, config.max_steps, config.hbar, config.n_start,
                  initial, config.trajectory_samples);
}

void write_trajectory_csv(const std::string& path, const ScenarioConfig& config,
                          const std::string& leg, const std::vector<TrajectorySample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# scenario=" << to_string(config.scenario) << "\n";
  out << "# leg=" << leg << "\n";
  out << "# a=" << format_value(config.a) << "\n";
  out << "# t_f=" << format_value(config.t_f) << "\n";
  out << "t";
  if (!samples.empty())
    for (int i = 0; i < samples.front().state.size(); ++i)
      out << ",re_" << i << ",im_" << i;
  out << "\n";
  for (const auto& sample : samples) {
    out << format_value(sample.t);
    for (int i = 0; i < sample.state.size(); ++i)
      out << "," << format_value(sample.state(i).real()) << ","
          << format_value(sample.state(i).imag());
    out << "\n";
  }
}

nlohmann::ordered_json state_to_json(const StateVector& psi) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int i = 0; i < psi.size(); ++i)
    arr.push_back({{"re", psi(i).real()}, {"im", psi(i).imag()}});
  return arr;
}

ScenarioRun run_scenario_impl(const ScenarioConfig& config) {
  const RescalingSpec spec = make_rescaling(config.family, config.a, config.t_f);

  ScenarioRun run;
  run.sta = validate_sta(spec);

  const HamiltonianSchedule reference = build_reference_schedule(config);
  const HamiltonianSchedule rescaled = time_rescale(reference, spec);
  const StateVector psi0 = scenario_initial_state(config, reference);

  const PropagationResult ref_result = propagate_leg(reference, config, psi0);
  const PropagationResult tr_result = propagate_leg(rescaled, config, psi0);
  run.steps_reference = ref_result.steps_used;
  run.steps_rescaled = tr_result.steps_used;
  run.unitarity_defect_reference = ref_result.unitarity_defect;
  run.unitarity_defect_rescaled = tr_result.unitarity_defect;
  run.commuting_fast_path = rescaled.commuting_family();

  ProtocolReport& report = run.report;
  // round-off on normalized states can push |<a|b>|^2 a few ulp above 1
  report.fidelity = std::min(1.0, fidelity(ref_result.final_state, tr_result.final_state));
  // a broken run should still produce a (failing) report, so only read the
  // phase where it is defined
  report.relative_phase = report.fidelity > 0.5
                              ? relative_phase(ref_result.final_state, tr_result.final_state)
                              : std::numeric_limits<double>::quiet_NaN();

  const Eigen::MatrixXcd h_ref_start = reference(reference.t_start());
  const Eigen::MatrixXcd h_ref_end = reference(reference.t_end());
  const Eigen::MatrixXcd h_tr_start = rescaled(rescaled.t_start());
  const Eigen::MatrixXcd h_tr_end = rescaled(rescaled.t_end());
  report.mt_product_reference =
      mt_product(reference.duration(), energy_uncertainty(h_ref_start, psi0));
  report.mt_product = mt_product(rescaled.duration(), energy_uncertainty(h_tr_start, psi0));
  report.peak_drive_norm_reference = peak_drive_norm(reference, config.norm_samples);
  report.peak_drive_norm = peak_drive_norm(rescaled, config.norm_samples);
  report.integral_mismatch = (operator_integral(reference, config.quadrature_points) -
                              operator_integral(rescaled, config.quadrature_points))
                                 .cwiseAbs()
                                 .maxCoeff();
  report.endpoint_mismatch = std::max((h_tr_start - h_ref_start).cwiseAbs().maxCoeff(),
                                      (h_tr_end - h_ref_end).cwiseAbs().maxCoeff());
  report.unitary_mismatch =
      (ref_result.final_unitary - tr_result.final_unitary).cwiseAbs().maxCoeff();

  const StateVector target = scenario_target_state(config);
  if (target.size() > 0) {
    report.target_fidelity = std::min(1.0, fidelity(target, tr_result.final_state));
    if (report.target_fidelity > 0.5)
      report.target_relative_phase = relative_phase(target, tr_result.final_state);
  }

  run.passed = report.fidelity >= config.fidelity_threshold;

  // outputs
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  nlohmann::ordered_json doc;
  doc["scenario"] = to_string(config.scenario);
  doc["family"] = to_string(config.family);
  doc["a"] = config.a;
  doc["t_f"] = config.t_f;
  doc["sta"] = {{"initial_time_ok", run.sta.initial_time_ok},
                {"faster_ok", run.sta.faster_ok},
                {"initial_rate_ok", run.sta.initial_rate_ok},
                {"final_rate_ok", run.sta.final_rate_ok},
                {"tolerance", run.sta.tolerance}};
  doc["fidelity"] = report.fidelity;
  if (!std::isnan(report.relative_phase)) doc["relative_phase"] = report.relative_phase;
  doc["mt_product"] = report.mt_product;
  doc["mt_product_reference"] = report.mt_product_reference;
  doc["peak_drive_norm"] = report.peak_drive_norm;
  doc["peak_drive_norm_reference"] = report.peak_drive_norm_reference;
  doc["integral_mismatch"] = report.integral_mismatch;
  doc["endpoint_mismatch"] = report.endpoint_mismatch;
  doc["unitary_mismatch"] = report.unitary_mismatch;
  if (target.size() > 0) {
    doc["target_fidelity"] = report.target_fidelity;
    if (!std::isnan(report.target_relative_phase))
      doc["target_relative_phase"] = report.target_relative_phase;
  }
  doc["final_state_reference"] = state_to_json(ref_result.final_state);
  doc["final_state_rescaled"] = state_to_json(tr_result.final_state);
  doc["solver"] = {{"steps_reference", run.steps_reference},
                   {"steps_rescaled", run.steps_rescaled},
                   {"unitarity_defect_reference", run.unitarity_defect_reference},
                   {"unitarity_defect_rescaled", run.unitarity_defect_rescaled},
                   {"commuting_fast_path", run.commuting_fast_path}};
  doc["passed"] = run.passed;

  {
    const std::string path = out_path("report.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
    run.files_written.push_back(path);
  }

  write_trajectory_csv(out_path("trajectory_ref.csv"), config, "reference",
                       ref_result.trajectory);
  run.files_written.push_back(out_path("trajectory_ref.csv"));
  write_trajectory_csv(out_path("trajectory_tr.csv"), config, "rescaled",
                       tr_result.trajectory);
  run.files_written.push_back(out_path("trajectory_tr.csv"));

  for (const auto& [stem, table] : scenario_waveforms(config)) {
    const std::string path = out_path(stem + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    table.write_csv(out);
    run.files_written.push_back(path);
  }
  return run;
}

}  // namespace

std::string to_string(ScenarioType type) {
  switch (type) {
    case ScenarioType::SpinFlipConstantZ: return "SpinFlipConstantZ";
    case ScenarioType::SpinRotatingField: return "SpinRotatingField";
    case ScenarioType::OscillatorCompression: return "OscillatorCompression";
    case ScenarioType::TrapTransport: return "TrapTransport";
  }
  return "unknown";
}

ScenarioType scenario_type_from_string(const std::string& name) {
  if (name == "SpinFlipConstantZ") return ScenarioType::SpinFlipConstantZ;
  if (name == "SpinRotatingField") return ScenarioType::SpinRotatingField;
  if (name == "OscillatorCompression") return ScenarioType::OscillatorCompression;
  if (name == "TrapTransport") return ScenarioType::TrapTransport;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

HamiltonianSchedule build_reference_schedule(const ScenarioConfig& config) {
  switch (config.scenario) {
    case ScenarioType::SpinFlipConstantZ: {
      SpinParams params{config.gamma, config.hbar};
      const double b0 = config.b0;
      return spin_schedule(
          params, [b0](double) { return Eigen::Vector3d(0.0, 0.0, b0); }, 0.0, config.t_f);
    }
    case ScenarioType::SpinRotatingField: {
      SpinParams params{config.gamma, config.hbar};
      const double b0 = config.b0;
      const double theta = tilt_or_default(config);
      const double rate = rotation_rate_or_default(config);
      return spin_schedule(
          params,
          [b0, theta, rate](double t) {
            return Eigen::Vector3d(b0 * std::sin(theta) * std::cos(rate * t),
                                   b0 * std::sin(theta) * std::sin(rate * t),
                                   b0 * std::cos(theta));
          },
          0.0, config.t_f);
    }
    case ScenarioType::OscillatorCompression: {
      OscillatorParams params{config.mass, config.hbar, config.basis_dim,
                              config.basis_frequency > 0.0 ? config.basis_frequency
                                                           : config.omega0};
      const double omega0 = config.omega0, omega_f = config.omega_f, t_f = config.t_f;
      return oscillator_schedule(
          params, [](double) { return 1.0; },
          [omega0, omega_f, t_f](double t) {
            return compression_frequency(omega0, omega_f, t_f, t);
          },
          0.0, config.t_f);
    }
    case ScenarioType::TrapTransport: {
      OscillatorParams params{config.mass, config.hbar, config.basis_dim,
                              config.basis_frequency > 0.0 ? config.basis_frequency
                                                           : config.omega};
      const double omega = config.omega, distance = config.distance, t_f = config.t_f;
      return transport_schedule(
          params, [](double) { return 1.0; }, [omega](double) { return omega; },
          [distance, t_f](double t) {
            const double s = std::sin(kPi * t / (2.0 * t_f));
            return distance * s * s;
          },
          0.0, config.t_f);
    }
  }
  throw std::logic_error("unreachable scenario type");
}

StateVector scenario_initial_state(const ScenarioConfig& config,
                                   const HamiltonianSchedule& reference) {
  switch (config.scenario) {
    case ScenarioType::SpinFlipConstantZ:
    case ScenarioType::SpinRotatingField: {
      StateVector psi(2);
      psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);  // |S_x,+>
      return psi;
    }
    case ScenarioType::OscillatorCompression:
    case ScenarioType::TrapTransport: {
      // ground state of H(0), with a deterministic phase convention
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reference(reference.t_start()));
      if (es.info() != Eigen::Success)
        throw std::runtime_error("scenario: eigensolver failed on H(0)");
      StateVector psi = es.eigenvectors().col(0);
      int anchor = 0;
      for (int i = 1; i < psi.size(); ++i)
        if (std::abs(psi(i)) > std::abs(psi(anchor))) anchor = i;
      psi *= std::polar(1.0, -std::arg(psi(anchor)));
      return psi;
    }
  }
  throw std::logic_error("unreachable scenario type");
}

StateVector scenario_target_state(const ScenarioConfig& config) {
  if (config.scenario == ScenarioType::SpinFlipConstantZ) {
    StateVector psi(2);
    psi << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);  // |S_x,->
    return psi;
  }
  return StateVector();
}

std::vector<std::pair<std::string, WaveformTable>> scenario_waveforms(
    const ScenarioConfig& config) {
  const RescalingSpec spec = make_rescaling(config.family, config.a, config.t_f);
  const int rows = config.waveform_rows;
  std::vector<std::pair<std::string, WaveformTable>> tables;
  switch (config.scenario) {
    case ScenarioType::SpinFlipConstantZ:
    case ScenarioType::SpinRotatingField:
      tables.emplace_back("waveform_spin_field", emit_spin_field_table(config.b0, spec, rows));
      break;
    case ScenarioType::OscillatorCompression:
      tables.emplace_back("waveform_tr_frequency",
                          emit_tr_frequency_table(config.omega0, config.omega_f, spec, rows));
      tables.emplace_back("waveform_tr_field", emit_tr_field_table(config.b0, spec, rows));
      break;
    case ScenarioType::TrapTransport:
      tables.emplace_back("waveform_tr_frequency",
                          emit_tr_frequency_table(config.omega, config.omega, spec, rows));
      tables.emplace_back("waveform_tr_transport",
                          emit_tr_transport_table(config.distance, spec, rows));
      tables.emplace_back("waveform_tr_field", emit_tr_field_table(config.b0, spec, rows));
      break;
  }
  return tables;
}

ScenarioRun run_scenario(const ScenarioConfig& config_in) {
  ScenarioConfig config = config_in;
  config.output_dir = env_or(config.output_dir);
  return run_scenario_impl(config);
}

int validate_command(RescalingFamily family, double a, double t_f, std::ostream& out) {
  const RescalingSpec spec = make_rescaling(family, a, t_f);
  const StaValidationReport report = validate_sta(spec);
  const auto flag = [&](const char* name, bool ok) {
    out << "  " << name << ": " << (ok ? "ok" : "FAILED") << "\n";
  };
  out << "rescaling family=" << to_string(family) << " a=" << format_value(a)
      << " t_f=" << format_value(t_f) << "\n";
  flag("initial_time (f^-1(0) = 0)", report.initial_time_ok);
  flag("faster (f^-1(t_f) < t_f)", report.faster_ok);
  flag("initial_rate (f'(0) = 1)", report.initial_rate_ok);
  flag("final_rate (f'(f^-1(t_f)) = 1)", report.final_rate_ok);
  out << (report.all_ok() ? "PASS" : "FAIL") << "\n";
  return report.all_ok() ? 0 : 1;
}

int sweep_command(const ScenarioConfig& config_in, const std::vector<double>& a_list,
                  std::ostream& out) {
  if (a_list.empty()) throw std::invalid_argument("sweep: empty contraction list");
  ScenarioConfig base = config_in;
  base.output_dir = env_or(base.output_dir);

  namespace fs = std::filesystem;
  fs::create_directories(base.output_dir);

  struct Row {
    double a;
    bool ok = false;
    ScenarioRun run;
    std::string error;
  };
  std::vector<Row> rows;
  rows.reserve(a_list.size());
  for (double a : a_list) {
    Row row;
    row.a = a;
    ScenarioConfig config = base;
    config.a = a;
    config.output_dir = (fs::path(base.output_dir) / ("a_" + format_value(a))).string();
    try {
      row.run = run_scenario_impl(config);
      row.ok = true;
    } catch (const std::exception& err) {
      row.error = err.what();
      for (char& c : row.error)
        if (c == ',' || c == '\n') c = ';';
    }
    rows.push_back(std::move(row));
  }

  const std::string summary_path = (fs::path(base.output_dir) / "summary.csv").string();
  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot write '" + summary_path + "'");
  summary << "a,fidelity,relative_phase,mt_product,mt_product_reference,peak_drive_norm,"
             "peak_drive_norm_reference,integral_mismatch,endpoint_mismatch,unitary_mismatch,"
             "steps_reference,steps_rescaled,passed,status\n";
  bool all_ok = true;
  for (const Row& row : rows) {
    if (row.ok) {
      const ProtocolReport& r = row.run.report;
      summary << format_value(row.a) << "," << format_value(r.fidelity) << ","
              << format_value(r.relative_phase) << "," << format_value(r.mt_product) << ","
              << format_value(r.mt_product_reference) << "," << format_value(r.peak_drive_norm)
              << "," << format_value(r.peak_drive_norm_reference) << ","
              << format_value(r.integral_mismatch) << "," << format_value(r.endpoint_mismatch)
              << "," << format_value(r.unitary_mismatch) << "," << row.run.steps_reference
              << "," << row.run.steps_rescaled << "," << (row.run.passed ? 1 : 0) << ",ok\n";
      all_ok = all_ok && row.run.passed;
    } else {
      summary << format_value(row.a) << ",,,,,,,,,,,,0,error: " << row.error << "\n";
      all_ok = false;
    }
  }
  summary.close();
  out << "wrote " << summary_path << " (" << rows.size() << " rows)\n";
  return all_ok ? 0 : 1;
}

int schedules_command(const ScenarioConfig& config_in, std::ostream& out) {
  ScenarioConfig config = config_in;
  config.output_dir = env_or(config.output_dir);
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  for (const auto& [stem, table] : scenario_waveforms(config)) {
    const std::string path = (fs::path(config.output_dir) / (stem + ".csv")).string();
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    table.write_csv(file);
    out << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace trqd
