#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fim/channel.hpp"
#include "fim/geometry.hpp"
#include "fim/optimizer.hpp"
#include "fim/types.hpp"

namespace fim {

struct DownlinkConfig {
  double p_tx_dbm = 3.0;
  double noise_power_dbm = -97.0;

  double p_tx() const { return db_to_linear(p_tx_dbm); }
  double noise_power() const { return db_to_linear(noise_power_dbm); }
};

/// Multipath channel model built from (estimated or true) path parameters.
class EstimatedChannelModel {
 public:
  EstimatedChannelModel(const ArrayGeometry& geometry, std::vector<PlaneWave> waves);
  EstimatedChannelModel(const ArrayGeometry& geometry, const PathSet& paths)
      : EstimatedChannelModel(geometry, to_plane_waves(paths)) {}

  const ArrayGeometry& geometry() const { return *geometry_; }
  std::span<const PlaneWave> waves() const { return waves_; }
  /// sin(theta_l) sin(phi_l) per path.
  const RealVector& q() const { return q_; }
  const ComplexVector& gains() const { return gains_; }

  /// N x L matrix whose column l is the steering vector of path l at `shape`.
  ComplexMatrix steering_matrix(const SurfaceShape& shape) const;
  ComplexVector channel(const SurfaceShape& shape) const;

 private:
  const ArrayGeometry* geometry_;
  std::vector<PlaneWave> waves_;
  RealVector q_;
  ComplexVector gains_;
};

ComplexVector mrt_beamformer(const ComplexVector& h_hat);

/// a(y) = ||h_hat(y)||^2.
double snr_objective(const EstimatedChannelModel& model, const SurfaceShape& shape);
RealVector snr_gradient(const EstimatedChannelModel& model, const SurfaceShape& shape);

struct DownlinkShapeResult {
  SurfaceShape shape;
  double objective = 0.0;  // a(y*)
  int iterations = 0;
};

/// Maximizes a(y) over the box with multi-start DFP on -a(y). The flat shape
/// is always one of the starts, so a(y*) >= a(0); it is returned unless the
/// best start beats it by more than a relative 1e-12.
DownlinkShapeResult optimize_shape_downlink(const EstimatedChannelModel& model, const MorphingBounds& bounds,
                                            const DfpConfig& cfg, std::span<const std::uint64_t> seeds);

/// Per-atom exhaustive search over `points` evenly spaced displacements.
/// a(y) is separable so this is a global-optimum oracle up to grid resolution.
SurfaceShape grid_search_shape(const EstimatedChannelModel& model, const MorphingBounds& bounds, std::size_t points);

double realized_snr(const ComplexVector& h_true, const ComplexVector& w, double p_tx, double noise_power);
inline double realized_snr_db(const ComplexVector& h_true, const ComplexVector& w, double p_tx, double noise_power) {
  return linear_to_db(realized_snr(h_true, w, p_tx, noise_power));
}

}  // namespace fim
