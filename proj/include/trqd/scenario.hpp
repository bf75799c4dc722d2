#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "trqd/metrics.hpp"
#include "trqd/schedules.hpp"

namespace trqd {

enum class ScenarioType {
  SpinFlipConstantZ,
  SpinRotatingField,
  OscillatorCompression,
  TrapTransport,
};

std::string to_string(ScenarioType type);
ScenarioType scenario_type_from_string(const std::string& name);

/// Everything needed to run one reference-vs-rescaled comparison.
/// Parsed from an INI-style config file ([section] / key = value lines);
/// unknown keys are rejected.
struct ScenarioConfig {
  ScenarioType scenario = ScenarioType::SpinFlipConstantZ;
  RescalingFamily family = RescalingFamily::Sinusoidal;
  double a = 2.0;
  double t_f = 1.0;

  // model parameters; which ones matter depends on the scenario
  double omega0 = 1.0;    // compression start frequency
  double omega_f = 6.0;   // compression end frequency
  double omega = 1.0;     // transport trap frequency
  double distance = 5.0;  // transport distance
  double b0 = 1.0;     // spin field magnitude
  double gamma = 1.0;  // gyromagnetic ratio
  // rotating-field polar angle and rotation rate; NaN = scenario defaults
  // (pi/4 and gamma*b0/2)
  double tilt = std::numeric_limits<double>::quiet_NaN();
  double rotation_rate = std::numeric_limits<double>::quiet_NaN();
  double mass = 1.0;
  double hbar = 1.0;
  int basis_dim = 64;
  double basis_frequency = 0.0;  // 0 = scenario default (omega0 or omega)

  // solver
  long n_steps = 0;  // 0 = refine with converge() to target_tol
  double target_tol = 1e-8;
  long max_steps = 1L << 22;
  long n_start = 64;
  int trajectory_samples = 101;
  int quadrature_points = 20001;
  int norm_samples = 1001;

  // output
  std::string output_dir = ".";
  double fidelity_threshold = 1.0 - 1e-6;
  int waveform_rows = 201;
};

ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::string& path);

HamiltonianSchedule build_reference_schedule(const ScenarioConfig& config);
StateVector scenario_initial_state(const ScenarioConfig& config,
                                   const HamiltonianSchedule& reference);
/// Analytic target state, if the scenario defines one (the spin flip maps
/// |S_x,+> to |S_x,->); empty vector otherwise.
StateVector scenario_target_state(const ScenarioConfig& config);

/// Waveform tables relevant to the scenario, with output file stems.
std::vector<std::pair<std::string, WaveformTable>> scenario_waveforms(const ScenarioConfig& config);

struct ScenarioRun {
  ProtocolReport report;
  StaValidationReport sta;
  long steps_reference = 0;
  long steps_rescaled = 0;
  double unitarity_defect_reference = 0.0;
  double unitarity_defect_rescaled = 0.0;
  bool commuting_fast_path = false;
  bool passed = false;  // fidelity >= configured threshold
  std::vector<std::string> files_written;
};

/// Builds both schedules, propagates both legs, assembles the report and
/// writes report.json, trajectory CSVs and waveform tables into
/// config.output_dir (overridable with the TR_OUTPUT_DIR environment
/// variable).
ScenarioRun run_scenario(const ScenarioConfig& config);

/// Prints a validate_sta report; returns 0 when all four requirements hold.
int validate_command(RescalingFamily family, double a, double t_f, std::ostream& out);

/// Runs the scenario once per entry of a_list, writing per-run outputs into
/// a_<value>/ subdirectories and one summary row per value into
/// summary.csv.  Per-row failures are recorded in the row and do not stop
/// the sweep.  Returns 0 iff every row ran and passed.
int sweep_command(const ScenarioConfig& config, const std::vector<double>& a_list,
                  std::ostream& out);

/// Writes just the waveform tables for the scenario; returns 0 on success.
int schedules_command(const ScenarioConfig& config, std::ostream& out);

}  // namespace trqd
