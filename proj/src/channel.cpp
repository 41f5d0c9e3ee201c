#include "fim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fim {

double LinkBudget::average_gain() const {
  if (!(distance_m > 0.0)) throw std::invalid_argument("propagation distance must be positive");
  return db_to_linear(gamma0_sq_db) * std::pow(distance_m, -pathloss_exponent);
}

double LinkBudget::uplink_snr_db() const {
  return linear_to_db(average_gain()) + pilot_power_dbm - noise_power_dbm;
}

void LinkBudget::set_uplink_snr_db(double snr_db) {
  pilot_power_dbm = snr_db + noise_power_dbm - linear_to_db(average_gain());
}

double LinkBudget::thermal_noise_dbm(double density_dbm_hz, double bandwidth_hz) {
  return density_dbm_hz + linear_to_db(bandwidth_hz);
}

ComplexVector steering_vector(const ArrayGeometry& geometry, const SurfaceShape& shape, double elevation,
                              double azimuth) {
  if (shape.size() != geometry.size()) throw std::invalid_argument("shape length does not match the array");
  const double k = geometry.wavenumber();
  const double ux = std::sin(elevation) * std::cos(azimuth);
  const double uy = std::sin(elevation) * std::sin(azimuth);
  const double uz = std::cos(elevation);
  ComplexVector g(static_cast<Eigen::Index>(geometry.size()));
  for (std::size_t n = 0; n < geometry.size(); ++n) {
    const auto& p = geometry[n];
    const double rho = p.x * ux + shape.y[static_cast<Eigen::Index>(n)] * uy + p.z * uz;
    g[static_cast<Eigen::Index>(n)] = std::polar(1.0, k * rho);
  }
  return g;
}

PathSet sample_paths(std::size_t count, double gamma_sq, Rng& angle_rng, Rng& gain_rng) {
  if (count == 0) throw std::invalid_argument("need at least one path");
  if (!(gamma_sq > 0.0)) throw std::invalid_argument("average channel gain must be positive");
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::normal_distribution<double> normal(0.0, std::sqrt(gamma_sq / (2.0 * static_cast<double>(count))));
  auto open_angle = [&] {
    double a = 0.0;
    while (a == 0.0) a = angle(angle_rng);
    return a;
  };
  PathSet set;
  set.paths.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    PropagationPath p{};
    p.elevation = open_angle();
    p.azimuth = open_angle();
    const double re = normal(gain_rng);
    const double im = normal(gain_rng);
    p.gain = {re, im};
    set.paths.push_back(p);
  }
  return set;
}

ComplexVector channel_response(const ArrayGeometry& geometry, const SurfaceShape& shape, const PathSet& paths) {
  ComplexVector h = ComplexVector::Zero(static_cast<Eigen::Index>(geometry.size()));
  for (const auto& p : paths.paths) h += p.gain * steering_vector(geometry, shape, p.elevation, p.azimuth);
  return h;
}

PlaneWave PlaneWave::from_path(const PropagationPath& p) {
  return {std::sin(p.elevation) * std::cos(p.azimuth), std::sin(p.elevation) * std::sin(p.azimuth),
          std::cos(p.elevation), p.gain};
}

std::vector<PlaneWave> to_plane_waves(const PathSet& paths) {
  std::vector<PlaneWave> out;
  out.reserve(paths.size());
  for (const auto& p : paths.paths) out.push_back(PlaneWave::from_path(p));
  return out;
}

ComplexVector plane_wave_response(const ArrayGeometry& geometry, const SurfaceShape& shape,
                                  std::span<const PlaneWave> waves) {
  if (shape.size() != geometry.size()) throw std::invalid_argument("shape length does not match the array");
  const double k = geometry.wavenumber();
  ComplexVector h = ComplexVector::Zero(static_cast<Eigen::Index>(geometry.size()));
  for (std::size_t n = 0; n < geometry.size(); ++n) {
    const auto& p = geometry[n];
    const double y = shape.y[static_cast<Eigen::Index>(n)];
    Complex s = 0.0;
    for (const auto& w : waves) s += w.gain * std::polar(1.0, k * (p.x * w.ux + y * w.uy + p.z * w.uz));
    h[static_cast<Eigen::Index>(n)] = s;
  }
  return h;
}

ComplexVector simulate_uplink(const ComplexVector& h, Complex pilot, double noise_power, Rng& rng) {
  if (!(noise_power >= 0.0)) throw std::invalid_argument("noise power must be >= 0");
  ComplexVector f = h * pilot;
  if (noise_power == 0.0) return f;
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
  for (auto& v : f) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += Complex(re, im);
  }
  return f;
}

}  // namespace fim
