#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fim/geometry.hpp"
#include "fim/types.hpp"

namespace fim {

/// Direction cosines of one dictionary column.
struct GridPoint {
  double phi_x;
  double phi_y;
  double phi_z;
  bool valid;  // phi_x^2 + phi_z^2 <= 1
};

enum class InvalidColumns { keep, drop };

/// Uniform quantization of (phi_x, phi_z) over [-1, 1]^2. Column
/// m = i * m_z + j (zero based) holds phi_x = -1 + (2i+1)/m_x and
/// phi_z = -1 + (2j+1)/m_z. Points outside the unit disk are kept with
/// phi_y = 0 unless the grid was built with InvalidColumns::drop.
class AngularGrid {
 public:
  AngularGrid(std::size_t m_x, std::size_t m_z, InvalidColumns policy = InvalidColumns::keep);

  std::size_t size() const { return points_.size(); }
  std::size_t m_x() const { return m_x_; }
  std::size_t m_z() const { return m_z_; }
  InvalidColumns policy() const { return policy_; }

  const GridPoint& operator[](std::size_t m) const { return points_[m]; }
  std::span<const GridPoint> points() const { return points_; }
  RealVector phi_y() const;

  static GridPoint point_at(std::size_t i, std::size_t j, std::size_t m_x, std::size_t m_z);

 private:
  std::size_t m_x_;
  std::size_t m_z_;
  InvalidColumns policy_;
  std::vector<GridPoint> points_;
};

/// Index of the valid column closest to (phi_x, phi_z) in the x-z direction
/// cosine plane; ties go to the lower index.
std::size_t nearest_valid_column(const AngularGrid& grid, double phi_x, double phi_z);

AngularGrid build_grid(std::size_t m_x, std::size_t m_z, InvalidColumns policy = InvalidColumns::keep);

struct MeasurementMatrix {
  ComplexMatrix entries;
  std::size_t slot_rows = 0;

  std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
  std::size_t slots() const { return slot_rows == 0 ? 0 : rows() / slot_rows; }
};

MeasurementMatrix measurement_matrix(const ArrayGeometry& geometry, const SurfaceShape& shape,
                                     const AngularGrid& grid);

/// Builds all slot blocks directly into one stacked matrix.
MeasurementMatrix measurement_matrix(const ArrayGeometry& geometry, const StackedShapes& shapes,
                                     const AngularGrid& grid);

MeasurementMatrix stack(std::span<const MeasurementMatrix> per_slot);

}  // namespace fim
