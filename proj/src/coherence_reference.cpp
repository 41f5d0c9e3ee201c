#include "fim/coherence.hpp"

#include <cmath>

namespace fim::reference {

double coherence_objective(const ComplexMatrix& psi) {
  const Eigen::Index cols = psi.cols();
  double total = 0.0;
  for (Eigen::Index m = 0; m < cols; ++m)
    for (Eigen::Index v = m + 1; v < cols; ++v) {
      Complex c = 0.0;
      for (Eigen::Index r = 0; r < psi.rows(); ++r) c += std::conj(psi(r, m)) * psi(r, v);
      total += std::abs(c);
    }
  return total;
}

RealVector coherence_gradient(const ArrayGeometry& geometry, const StackedShapes& shapes, const AngularGrid& grid) {
  const ComplexMatrix a = measurement_matrix(geometry, shapes, grid).entries;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  const double floor = coherence_floor(static_cast<std::size_t>(rows));
  const double k = geometry.wavenumber();

  RealVector grad = RealVector::Zero(rows);
  for (Eigen::Index m = 0; m < cols; ++m) {
    for (Eigen::Index v = m + 1; v < cols; ++v) {
      const double dphi = grid[static_cast<std::size_t>(v)].phi_y - grid[static_cast<std::size_t>(m)].phi_y;
      if (dphi == 0.0) continue;
      Complex c = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) c += std::conj(a(r, m)) * a(r, v);
      const double mag = std::abs(c);
      if (mag <= floor) continue;
      const Complex unit = c / mag;
      // exp(-j k (rho_v - rho_m)) at row r is conj(a_rv) a_rm.
      for (Eigen::Index r = 0; r < rows; ++r) grad[r] += k * dphi * (unit * std::conj(a(r, v)) * a(r, m)).imag();
    }
  }
  return grad;
}

}  // namespace fim::reference
