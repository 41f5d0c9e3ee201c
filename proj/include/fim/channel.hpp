#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fim/geometry.hpp"
#include "fim/rng.hpp"
#include "fim/types.hpp"

namespace fim {

struct PropagationPath {
  double elevation;  // theta, radians
  double azimuth;    // phi, radians
  Complex gain;
};

struct PathSet {
  std::vector<PropagationPath> paths;

  std::size_t size() const { return paths.size(); }
  bool empty() const { return paths.empty(); }
};

/// A path expressed by its direction cosines (sin t cos p, sin t sin p, cos t).
/// Dictionary atoms outside the visible region have no (t, p) pair, so
/// reconstruction works in this form.
struct PlaneWave {
  double ux;
  double uy;
  double uz;
  Complex gain;

  static PlaneWave from_path(const PropagationPath& p);
};

std::vector<PlaneWave> to_plane_waves(const PathSet& paths);

/// Large-scale link parameters. Powers are in dBm, gains in dB; the linear
/// accessors return milliwatts and plain ratios.
struct LinkBudget {
  double gamma0_sq_db = -60.0;
  double distance_m = 100.0;
  double pathloss_exponent = 2.2;
  double noise_power_dbm = -97.0;
  double pilot_power_dbm = 0.0;

  double average_gain() const;
  double noise_power() const { return db_to_linear(noise_power_dbm); }
  double pilot_power() const { return db_to_linear(pilot_power_dbm); }
  /// gamma^2 * p_up / sigma^2, the mean per-element pilot SNR.
  double uplink_snr_db() const;
  /// Sets the pilot power so that uplink_snr_db() == snr_db.
  void set_uplink_snr_db(double snr_db);

  static double thermal_noise_dbm(double density_dbm_hz, double bandwidth_hz);
};

ComplexVector steering_vector(const ArrayGeometry& geometry, const SurfaceShape& shape, double elevation,
                              double azimuth);

PathSet sample_paths(std::size_t count, double gamma_sq, Rng& angle_rng, Rng& gain_rng);

/// h(y) = sum_l gain_l * g_l(y).
ComplexVector channel_response(const ArrayGeometry& geometry, const SurfaceShape& shape, const PathSet& paths);

ComplexVector plane_wave_response(const ArrayGeometry& geometry, const SurfaceShape& shape,
                                  std::span<const PlaneWave> waves);

/// f = h * pilot + noise, noise ~ CN(0, noise_power I).
ComplexVector simulate_uplink(const ComplexVector& h, Complex pilot, double noise_power, Rng& rng);

}  // namespace fim
