#pragma once

#include <cstddef>

#include "fim/dictionary.hpp"
#include "fim/geometry.hpp"
#include "fim/types.hpp"

namespace fim {

struct CoherenceEvaluation {
  double value = 0.0;
  RealVector gradient;  // empty when not requested
};

/// Pairs with |phi_m^H phi_v| at or below this floor are treated as
/// orthogonal and contribute a zero subgradient.
inline double coherence_floor(std::size_t rows) { return 1e-12 * static_cast<double>(rows); }

/// Sum over m < v of |phi_m^H phi_v|. OpenMP-parallel over columns.
double coherence_objective(const ComplexMatrix& psi);
inline double coherence_objective(const MeasurementMatrix& psi) { return coherence_objective(psi.entries); }

/// Objective and gradient with respect to every stacked displacement, sharing
/// one Gram matrix. Gradient entry t * N + n belongs to slot t, atom n.
CoherenceEvaluation evaluate_coherence(const ArrayGeometry& geometry, const StackedShapes& shapes,
                                       const AngularGrid& grid, bool with_gradient = true);

RealVector coherence_gradient(const ArrayGeometry& geometry, const StackedShapes& shapes, const AngularGrid& grid);

/// Serial pair-by-pair kernels. Slow; kept as the reference the parallel
/// kernels are tested and benchmarked against.
namespace reference {

double coherence_objective(const ComplexMatrix& psi);
RealVector coherence_gradient(const ArrayGeometry& geometry, const StackedShapes& shapes, const AngularGrid& grid);

}  // namespace reference

/// Coherence as a function of the flattened stacked shape vector.
class CoherenceProblem {
 public:
  CoherenceProblem(const ArrayGeometry& geometry, const AngularGrid& grid, std::size_t slots)
      : geometry_(&geometry), grid_(&grid), slots_(slots) {}

  std::size_t dimension() const { return slots_ * geometry_->size(); }
  double value(const RealVector& flat) const;
  RealVector gradient(const RealVector& flat) const;

 private:
  const ArrayGeometry* geometry_;
  const AngularGrid* grid_;
  std::size_t slots_;
};

}  // namespace fim
