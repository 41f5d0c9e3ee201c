#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fim/channel.hpp"
#include "fim/dictionary.hpp"
#include "fim/geometry.hpp"
#include "fim/types.hpp"

namespace fim {

struct DirectionEstimate {
  double elevation;
  double azimuth;
  bool valid;  // false when the grid column lies outside the unit disk
};

struct SparseEstimate {
  std::vector<std::size_t> support;
  ComplexVector gains;
  std::vector<DirectionEstimate> directions;
  std::vector<double> residual_norms;  // after each selection
  bool rank_deficient = false;

  /// Selected atoms as plane waves (grid direction cosines, estimated gains).
  std::vector<PlaneWave> plane_waves(const AngularGrid& grid) const;
};

struct OmpOptions {
  std::size_t sparsity = 1;
  /// Optional early stop once ||residual|| <= threshold * ||f||.
  std::optional<double> residual_threshold;
};

/// Orthogonal matching pursuit on f / pilot. Columns are scored by
/// |psi^H r| / ||psi||; the lowest index wins ties.
SparseEstimate omp(const MeasurementMatrix& psi, const ComplexVector& f, Complex pilot, const AngularGrid& grid,
                   const OmpOptions& options);

DirectionEstimate angles_from_grid(std::size_t m, const AngularGrid& grid);

/// h_hat(y) from the estimated atoms. Uses the grid direction cosines, which
/// for valid columns is the steering vector of the recovered DOA.
ComplexVector reconstruct_channel(const SparseEstimate& estimate, const AngularGrid& grid,
                                  const ArrayGeometry& geometry, const SurfaceShape& shape);

struct NmseRecord {
  double linear;
  double db;
};

inline constexpr double kNmseFloorDb = -300.0;

NmseRecord nmse(const ComplexVector& h_true, const ComplexVector& h_hat);

}  // namespace fim
