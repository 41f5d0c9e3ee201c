#include "fim/downlink.hpp"

#include <cmath>
#include <stdexcept>

namespace fim {

namespace {

constexpr double kFlatTieTolerance = 1e-12;

}  // namespace

EstimatedChannelModel::EstimatedChannelModel(const ArrayGeometry& geometry, std::vector<PlaneWave> waves)
    : geometry_(&geometry), waves_(std::move(waves)) {
  const auto count = static_cast<Eigen::Index>(waves_.size());
  q_.resize(count);
  gains_.resize(count);
  for (Eigen::Index l = 0; l < count; ++l) {
    q_[l] = waves_[static_cast<std::size_t>(l)].uy;
    gains_[l] = waves_[static_cast<std::size_t>(l)].gain;
  }
}

ComplexMatrix EstimatedChannelModel::steering_matrix(const SurfaceShape& shape) const {
  if (shape.size() != geometry_->size()) throw std::invalid_argument("shape length does not match the array");
  const double k = geometry_->wavenumber();
  ComplexMatrix g(static_cast<Eigen::Index>(geometry_->size()), static_cast<Eigen::Index>(waves_.size()));
  for (std::size_t n = 0; n < geometry_->size(); ++n) {
    const auto& p = (*geometry_)[n];
    const double y = shape.y[static_cast<Eigen::Index>(n)];
    for (std::size_t l = 0; l < waves_.size(); ++l) {
      const auto& w = waves_[l];
      g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) =
          std::polar(1.0, k * (p.x * w.ux + y * w.uy + p.z * w.uz));
    }
  }
  return g;
}

ComplexVector EstimatedChannelModel::channel(const SurfaceShape& shape) const {
  return steering_matrix(shape) * gains_;
}

ComplexVector mrt_beamformer(const ComplexVector& h_hat) {
  const double norm = h_hat.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("MRT needs a non-zero channel");
  return h_hat / norm;
}

double snr_objective(const EstimatedChannelModel& model, const SurfaceShape& shape) {
  return model.channel(shape).squaredNorm();
}

RealVector snr_gradient(const EstimatedChannelModel& model, const SurfaceShape& shape) {
  const ComplexMatrix g = model.steering_matrix(shape);
  const ComplexVector h = g * model.gains();
  const ComplexVector weighted = g * (model.q().cast<Complex>().cwiseProduct(model.gains()));
  const double k = model.geometry().wavenumber();
  // 2k Im{ conj(G (q .* xi)) .* (G xi) }
  return 2.0 * k * weighted.conjugate().cwiseProduct(h).imag();
}

DownlinkShapeResult optimize_shape_downlink(const EstimatedChannelModel& model, const MorphingBounds& bounds,
                                            const DfpConfig& cfg, std::span<const std::uint64_t> seeds) {
  const std::size_t atoms = model.geometry().size();
  DownlinkShapeResult out{SurfaceShape::flat(atoms), 0.0, 0};
  if (bounds.limit() == 0.0) {
    out.objective = snr_objective(model, out.shape);
    return out;
  }
  Objective f = [&](const RealVector& y) { return -snr_objective(model, SurfaceShape{y}); };
  Gradient grad = [&](const RealVector& y) { return RealVector(-snr_gradient(model, SurfaceShape{y})); };
  const RealVector flat = RealVector::Zero(static_cast<Eigen::Index>(atoms));
  const auto run = multi_start(f, grad, atoms, BoxBounds::symmetric(bounds.limit()), cfg, seeds,
                               std::span<const RealVector>(&flat, 1));
  // Gains within rounding of a(0) are not improvements; keep the flat shape.
  const double flat_objective = snr_objective(model, out.shape);
  if (-run.best.value <= flat_objective * (1.0 + kFlatTieTolerance)) {
    out.objective = flat_objective;
    return out;
  }
  out.shape.y = run.best.point;
  out.objective = -run.best.value;
  out.iterations = run.best.iterations;
  return out;
}

SurfaceShape grid_search_shape(const EstimatedChannelModel& model, const MorphingBounds& bounds, std::size_t points) {
  const std::size_t atoms = model.geometry().size();
  SurfaceShape best = SurfaceShape::flat(atoms);
  const double b = bounds.limit();
  if (b == 0.0 || points < 2) return best;
  const double k = model.geometry().wavenumber();
  const auto waves = model.waves();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(atoms); ++n) {
    const auto& p = model.geometry()[static_cast<std::size_t>(n)];
    double best_power = -1.0;
    for (std::size_t i = 0; i < points; ++i) {
      const double y = -b + 2.0 * b * static_cast<double>(i) / static_cast<double>(points - 1);
      Complex h = 0.0;
      for (const auto& w : waves) h += w.gain * std::polar(1.0, k * (p.x * w.ux + y * w.uy + p.z * w.uz));
      if (std::norm(h) > best_power) {
        best_power = std::norm(h);
        best.y[n] = y;
      }
    }
  }
  return best;
}

double realized_snr(const ComplexVector& h_true, const ComplexVector& w, double p_tx, double noise_power) {
  if (h_true.size() != w.size()) throw std::invalid_argument("channel and beamformer lengths differ");
  return p_tx * std::norm(h_true.dot(w)) / noise_power;
}

}  // namespace fim
