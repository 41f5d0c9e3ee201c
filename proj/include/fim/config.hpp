#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fim/dictionary.hpp"
#include "fim/optimizer.hpp"

namespace fim {

enum class Scheme { fim, upa };
enum class SchemeSelection { fim, upa, both };

/// How ground-truth path directions are drawn. Both draw (theta, phi)
/// uniformly on (0, pi)^2; `grid` then moves each path onto the nearest valid
/// dictionary direction.
enum class PathAngles { grid, continuous };

enum class SweepVariable { uplink_snr_db, slots, bound_wavelengths, paths };

const char* to_string(SweepVariable v);
const char* to_string(Scheme s);

/// Every constant of one experiment campaign. Defaults reproduce the
/// desk-scale reference configuration: 5x5 half-wavelength array at 30 GHz,
/// b = lambda, 10 pilot slots, 20x20 grid, 100 trials, 10 DFP starts.
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  // array
  std::size_t n_x = 5;
  std::size_t n_z = 5;
  double spacing_x_wavelengths = 0.5;
  double spacing_z_wavelengths = 0.5;
  double carrier_hz = 30e9;
  double bound_wavelengths = 1.0;
  std::size_t slots = 10;

  // dictionary
  std::size_t grid_x = 20;
  std::size_t grid_z = 20;
  InvalidColumns invalid_columns = InvalidColumns::keep;

  // propagation and link budget
  std::size_t paths = 2;
  PathAngles path_angles = PathAngles::grid;
  double gamma0_sq_db = -60.0;
  double distance_m = 100.0;
  double pathloss_exponent = 2.2;
  double bandwidth_hz = 50e6;
  double noise_density_dbm_hz = -174.0;
  double uplink_snr_db = 8.0;
  double downlink_power_dbm = 3.0;

  // campaign
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  SchemeSelection schemes = SchemeSelection::both;
  SweepVariable sweep = SweepVariable::uplink_snr_db;
  std::vector<double> sweep_values;
  DfpConfig dfp;
  bool record_timing = false;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double bound() const { return bound_wavelengths * wavelength(); }
  double noise_power_dbm() const;
  double average_gain_db() const;
  bool runs(Scheme s) const;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Parses `key = value` lines; '#' starts a comment. A `schema_version` key
/// must be present and equal ExperimentConfig::kSchemaVersion. Unknown keys
/// are rejected. Keys not present keep the values already in `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string format_config(const ExperimentConfig& cfg);

/// Shrinks array size, grid and trial count for quick runs. scale = 1 is a
/// no-op; array and grid sides scale with sqrt(scale).
ExperimentConfig apply_scale(ExperimentConfig cfg, double scale);

}  // namespace fim
