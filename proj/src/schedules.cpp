#include "trqd/schedules.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trqd/models.hpp"

namespace trqd {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

WaveformTable make_table(std::string scenario, const RescalingSpec& spec, int n_rows,
                         const std::function<double(double)>& value) {
  if (n_rows < 2)
    throw std::invalid_argument("waveform: tables need at least two rows");
  WaveformTable table;
  table.scenario = std::move(scenario);
  table.a = spec.a;
  table.t_f = spec.t_f;
  table.family = to_string(spec.family);
  table.columns = {"tau", "value"};
  table.rows.reserve(n_rows);
  const double horizon = spec.tau_final();
  for (int i = 0; i < n_rows; ++i) {
    const double tau = horizon * (double(i) / double(n_rows - 1));
    table.rows.push_back({tau, value(tau)});
  }
  return table;
}

}  // namespace

void WaveformTable::write_csv(std::ostream& out) const {
  out << "# scenario=" << scenario << "\n";
  out << "# a=" << format_value(a) << "\n";
  out << "# t_f=" << format_value(t_f) << "\n";
  out << "# family=" << family << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows)
    out << format_value(row[0]) << "," << format_value(row[1]) << "\n";
}

std::string WaveformTable::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

WaveformTable emit_tr_frequency_table(double omega0, double omega_f,
                                      const RescalingSpec& spec, int n_rows) {
  if (!(omega0 > 0.0) || !(omega_f > 0.0))
    throw std::invalid_argument("waveform: frequencies must be > 0");
  return make_table("tr_frequency", spec, n_rows, [&](double tau) {
    return tr_frequency(omega0, omega_f, spec, tau);
  });
}

WaveformTable emit_tr_field_table(double b0, const RescalingSpec& spec, int n_rows) {
  if (!(b0 > 0.0)) throw std::invalid_argument("waveform: field magnitude must be > 0");
  return make_table("tr_field", spec, n_rows, [&](double tau) {
    return b0 * std::sqrt(eval_f_prime(spec, tau));
  });
}

WaveformTable emit_tr_transport_table(double distance, const RescalingSpec& spec, int n_rows) {
  return make_table("tr_transport", spec, n_rows, [&](double tau) {
    const double s = std::sin(kPi * eval_f(spec, tau) / (2.0 * spec.t_f));
    return distance * s * s;
  });
}

WaveformTable emit_spin_field_table(double b0, const RescalingSpec& spec, int n_rows) {
  if (!(b0 > 0.0)) throw std::invalid_argument("waveform: field magnitude must be > 0");
  return make_table("spin_field", spec, n_rows, [&](double tau) {
    return b0 * eval_f_prime(spec, tau);
  });
}

}  // namespace trqd
