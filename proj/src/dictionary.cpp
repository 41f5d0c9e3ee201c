#include "fim/dictionary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fim {

GridPoint AngularGrid::point_at(std::size_t i, std::size_t j, std::size_t m_x, std::size_t m_z) {
  GridPoint p{};
  p.phi_x = -1.0 + static_cast<double>(2 * i + 1) / static_cast<double>(m_x);
  p.phi_z = -1.0 + static_cast<double>(2 * j + 1) / static_cast<double>(m_z);
  const double r2 = p.phi_x * p.phi_x + p.phi_z * p.phi_z;
  p.valid = r2 <= 1.0;
  p.phi_y = std::sqrt(std::max(0.0, 1.0 - r2));
  return p;
}

AngularGrid::AngularGrid(std::size_t m_x, std::size_t m_z, InvalidColumns policy)
    : m_x_(m_x), m_z_(m_z), policy_(policy) {
  if (m_x == 0 || m_z == 0) throw std::invalid_argument("grid quantization counts must be >= 1");
  points_.reserve(m_x * m_z);
  for (std::size_t i = 0; i < m_x; ++i)
    for (std::size_t j = 0; j < m_z; ++j) {
      auto p = point_at(i, j, m_x, m_z);
      if (policy == InvalidColumns::drop && !p.valid) continue;
      points_.push_back(p);
    }
  if (points_.empty()) throw std::invalid_argument("grid has no valid columns");
}

RealVector AngularGrid::phi_y() const {
  RealVector out(static_cast<Eigen::Index>(points_.size()));
  for (std::size_t m = 0; m < points_.size(); ++m) out[static_cast<Eigen::Index>(m)] = points_[m].phi_y;
  return out;
}

AngularGrid build_grid(std::size_t m_x, std::size_t m_z, InvalidColumns policy) {
  return AngularGrid(m_x, m_z, policy);
}

std::size_t nearest_valid_column(const AngularGrid& grid, double phi_x, double phi_z) {
  std::size_t best = grid.size();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const auto& p = grid[m];
    if (!p.valid) continue;
    const double d2 = (p.phi_x - phi_x) * (p.phi_x - phi_x) + (p.phi_z - phi_z) * (p.phi_z - phi_z);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = m;
    }
  }
  if (best == grid.size()) throw std::invalid_argument("grid has no valid column");
  return best;
}

namespace {

void fill_block(ComplexMatrix& out, Eigen::Index row0, const ArrayGeometry& geometry, const SurfaceShape& shape,
                const AngularGrid& grid) {
  const double k = geometry.wavenumber();
  const auto cols = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < cols; ++m) {
    const auto& g = grid[static_cast<std::size_t>(m)];
    for (std::size_t n = 0; n < geometry.size(); ++n) {
      const auto& p = geometry[n];
      const double rho = p.x * g.phi_x + shape.y[static_cast<Eigen::Index>(n)] * g.phi_y + p.z * g.phi_z;
      out(row0 + static_cast<Eigen::Index>(n), m) = std::polar(1.0, k * rho);
    }
  }
}

}  // namespace

MeasurementMatrix measurement_matrix(const ArrayGeometry& geometry, const SurfaceShape& shape,
                                     const AngularGrid& grid) {
  if (shape.size() != geometry.size()) throw std::invalid_argument("shape length does not match the array");
  MeasurementMatrix psi;
  psi.slot_rows = geometry.size();
  psi.entries.resize(static_cast<Eigen::Index>(geometry.size()), static_cast<Eigen::Index>(grid.size()));
  fill_block(psi.entries, 0, geometry, shape, grid);
  return psi;
}

MeasurementMatrix measurement_matrix(const ArrayGeometry& geometry, const StackedShapes& shapes,
                                     const AngularGrid& grid) {
  if (shapes.slots() == 0) throw std::invalid_argument("need at least one slot");
  if (shapes.atoms() != geometry.size()) throw std::invalid_argument("shape length does not match the array");
  const auto n = static_cast<Eigen::Index>(geometry.size());
  MeasurementMatrix psi;
  psi.slot_rows = geometry.size();
  psi.entries.resize(n * static_cast<Eigen::Index>(shapes.slots()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t t = 0; t < shapes.slots(); ++t)
    fill_block(psi.entries, static_cast<Eigen::Index>(t) * n, geometry, shapes[t], grid);
  return psi;
}

MeasurementMatrix stack(std::span<const MeasurementMatrix> per_slot) {
  if (per_slot.empty()) throw std::invalid_argument("nothing to stack");
  const auto& first = per_slot.front();
  Eigen::Index rows = 0;
  for (const auto& p : per_slot) {
    if (p.entries.cols() != first.entries.cols() || p.slot_rows != first.slot_rows)
      throw std::invalid_argument("stacked blocks must share the column count and slot size");
    rows += p.entries.rows();
  }
  MeasurementMatrix out;
  out.slot_rows = first.slot_rows;
  out.entries.resize(rows, first.entries.cols());
  Eigen::Index r = 0;
  for (const auto& p : per_slot) {
    out.entries.middleRows(r, p.entries.rows()) = p.entries;
    r += p.entries.rows();
  }
  return out;
}

}  // namespace fim
