#include "fim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fim {

SparseEstimate omp(const MeasurementMatrix& psi, const ComplexVector& f, Complex pilot, const AngularGrid& grid,
                   const OmpOptions& options) {
  const ComplexMatrix& a = psi.entries;
  const std::size_t sparsity = options.sparsity;
  if (sparsity == 0) throw std::invalid_argument("sparsity must be >= 1");
  if (sparsity > psi.cols()) throw std::invalid_argument("sparsity exceeds the dictionary size");
  if (sparsity > psi.rows()) throw std::invalid_argument("sparsity exceeds the number of observations");
  if (static_cast<std::size_t>(f.size()) != psi.rows()) throw std::invalid_argument("observation length mismatch");
  if (psi.cols() != grid.size()) throw std::invalid_argument("measurement matrix does not match the grid");
  if (pilot == Complex(0.0)) throw std::invalid_argument("pilot must be non-zero");

  const ComplexVector target = f / pilot;
  const RealVector norms = a.colwise().norm();
  const double target_norm = target.norm();

  SparseEstimate est;
  std::vector<bool> selected(psi.cols(), false);
  ComplexVector residual = target;
  ComplexVector coeffs;

  for (std::size_t it = 0; it < sparsity; ++it) {
    const ComplexVector corr = a.adjoint() * residual;
    Eigen::Index best = -1;
    double best_score = -1.0;
    for (Eigen::Index m = 0; m < corr.size(); ++m) {
      if (selected[static_cast<std::size_t>(m)] || norms[m] == 0.0) continue;
      const double score = std::abs(corr[m]) / norms[m];
      if (score > best_score) {
        best_score = score;
        best = m;
      }
    }
    if (best < 0) break;
    selected[static_cast<std::size_t>(best)] = true;
    est.support.push_back(static_cast<std::size_t>(best));

    ComplexMatrix sub(a.rows(), static_cast<Eigen::Index>(est.support.size()));
    for (std::size_t s = 0; s < est.support.size(); ++s)
      sub.col(static_cast<Eigen::Index>(s)) = a.col(static_cast<Eigen::Index>(est.support[s]));
    // Minimum-norm least squares also covers a rank-deficient selection.
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(sub);
    if (cod.rank() < sub.cols()) est.rank_deficient = true;
    coeffs = cod.solve(target);
    residual = target - sub * coeffs;
    est.residual_norms.push_back(residual.norm());

    if (options.residual_threshold && residual.norm() <= *options.residual_threshold * target_norm) break;
  }

  est.gains = coeffs;
  est.directions.reserve(est.support.size());
  for (auto m : est.support) est.directions.push_back(angles_from_grid(m, grid));
  return est;
}

DirectionEstimate angles_from_grid(std::size_t m, const AngularGrid& grid) {
  if (m >= grid.size()) throw std::out_of_range("grid column out of range");
  const auto& p = grid[m];
  return {std::acos(std::clamp(p.phi_z, -1.0, 1.0)), std::atan2(p.phi_y, p.phi_x), p.valid};
}

std::vector<PlaneWave> SparseEstimate::plane_waves(const AngularGrid& grid) const {
  std::vector<PlaneWave> out;
  out.reserve(support.size());
  for (std::size_t l = 0; l < support.size(); ++l) {
    const auto& p = grid[support[l]];
    out.push_back({p.phi_x, p.phi_y, p.phi_z, gains[static_cast<Eigen::Index>(l)]});
  }
  return out;
}

ComplexVector reconstruct_channel(const SparseEstimate& estimate, const AngularGrid& grid,
                                  const ArrayGeometry& geometry, const SurfaceShape& shape) {
  if (estimate.support.empty()) throw std::invalid_argument("cannot reconstruct from an empty support");
  return plane_wave_response(geometry, shape, estimate.plane_waves(grid));
}

NmseRecord nmse(const ComplexVector& h_true, const ComplexVector& h_hat) {
  if (h_true.size() != h_hat.size()) throw std::invalid_argument("channel lengths differ");
  const double energy = h_true.squaredNorm();
  if (!(energy > 0.0)) throw std::invalid_argument("true channel is zero");
  const double linear = (h_true - h_hat).squaredNorm() / energy;
  return {linear, linear > 0.0 ? std::max(linear_to_db(linear), kNmseFloorDb) : kNmseFloorDb};
}

}  // namespace fim
