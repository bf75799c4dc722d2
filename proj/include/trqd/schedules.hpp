#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "trqd/rescale.hpp"

namespace trqd {

/// A tabulated control waveform over the rescaled interval [0, t_f/a].
/// Rows are (tau, value) with tau strictly increasing from 0 to t_f/a;
/// the first and last values equal the reference protocol's endpoints.
struct WaveformTable {
  std::string scenario;
  double a = 1.0;
  double t_f = 1.0;
  std::string family;
  std::vector<std::string> columns;  // {"tau", "value"}
  std::vector<std::array<double, 2>> rows;

  /// CSV with one `# key=value` comment line per metadata entry, then the
  /// column header, then 17-significant-digit rows.  Byte-deterministic for
  /// identical inputs.
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

/// Rescaled compression frequency sqrt(f') * omega(f); endpoints omega0 and
/// omega_f.  With omega_f = omega0 this is the constant-trap profile
/// sqrt(f') * omega used for transport.
WaveformTable emit_tr_frequency_table(double omega0, double omega_f,
                                      const RescalingSpec& spec, int n_rows);

/// Kinetic-term control field magnitude b0 * sqrt(f'); endpoints b0.
WaveformTable emit_tr_field_table(double b0, const RescalingSpec& spec, int n_rows);

/// Rescaled trap-center path d * sin^2(pi f(tau) / 2 t_f); runs from 0 to d.
WaveformTable emit_tr_transport_table(double distance, const RescalingSpec& spec, int n_rows);

/// Spin drive magnitude b0 * f'(tau); endpoints b0.  Note the spin drive
/// scales with f' while the oscillator kinetic field scales with sqrt(f').
WaveformTable emit_spin_field_table(double b0, const RescalingSpec& spec, int n_rows);

}  // namespace trqd
