#include "fim/coherence.hpp"

#include <cmath>
#include <stdexcept>

namespace fim {

namespace {

// Upper triangle of A^H A. The strictly lower part is left unspecified.
ComplexMatrix gram_upper(const ComplexMatrix& a) {
  ComplexMatrix gram = ComplexMatrix::Zero(a.cols(), a.cols());
  gram.selfadjointView<Eigen::Upper>().rankUpdate(a.adjoint());
  return gram;
}

double sum_upper_magnitudes(const ComplexMatrix& gram) {
  const Eigen::Index m = gram.cols();
  RealVector column_sums = RealVector::Zero(m);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index v = 1; v < m; ++v) {
    double s = 0.0;
    for (Eigen::Index u = 0; u < v; ++u) s += std::abs(gram(u, v));
    column_sums[v] = s;
  }
  // Serial reduction keeps the value independent of the thread count.
  double total = 0.0;
  for (Eigen::Index v = 0; v < m; ++v) total += column_sums[v];
  return total;
}

}  // namespace

double coherence_objective(const ComplexMatrix& psi) {
  if (psi.cols() < 2) return 0.0;
  return sum_upper_magnitudes(gram_upper(psi));
}

CoherenceEvaluation evaluate_coherence(const ArrayGeometry& geometry, const StackedShapes& shapes,
                                       const AngularGrid& grid, bool with_gradient) {
  const ComplexMatrix a = measurement_matrix(geometry, shapes, grid).entries;
  const ComplexMatrix gram = gram_upper(a);

  CoherenceEvaluation out;
  out.value = sum_upper_magnitudes(gram);
  if (!with_gradient) return out;

  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  const double floor = coherence_floor(static_cast<std::size_t>(rows));

  // Hermitian matrix of unit phases c_mv / |c_mv|; zero on the diagonal and
  // for pairs at the non-differentiable point.
  ComplexMatrix phases = ComplexMatrix::Zero(cols, cols);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index v = 1; v < cols; ++v) {
    for (Eigen::Index u = 0; u < v; ++u) {
      const Complex c = gram(u, v);
      const double mag = std::abs(c);
      if (mag <= floor) continue;
      phases(u, v) = c / mag;
      phases(v, u) = std::conj(c) / mag;
    }
  }

  // d gamma / d y_r = k Im( sum_v (A U)_rv phi_y_v conj(A_rv) ). The pair sum
  // over m < v collapses to this form because U is Hermitian.
  const ComplexMatrix mixed = a * phases;
  const RealVector phi_y = grid.phi_y();
  const double k = geometry.wavenumber();
  out.gradient.resize(rows);
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < rows; ++r) {
    Complex s = 0.0;
    for (Eigen::Index v = 0; v < cols; ++v) s += mixed(r, v) * phi_y[v] * std::conj(a(r, v));
    out.gradient[r] = k * s.imag();
  }
  return out;
}

RealVector coherence_gradient(const ArrayGeometry& geometry, const StackedShapes& shapes, const AngularGrid& grid) {
  return evaluate_coherence(geometry, shapes, grid, true).gradient;
}

double CoherenceProblem::value(const RealVector& flat) const {
  const auto shapes = StackedShapes::from_flat(flat, geometry_->size());
  return coherence_objective(measurement_matrix(*geometry_, shapes, *grid_).entries);
}

RealVector CoherenceProblem::gradient(const RealVector& flat) const {
  return coherence_gradient(*geometry_, StackedShapes::from_flat(flat, geometry_->size()), *grid_);
}

}  // namespace fim
