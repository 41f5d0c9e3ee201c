#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fim/types.hpp"

namespace fim {

struct AtomPosition {
  double x;
  double z;
};

/// Rigid x-z lattice of the meta-atoms. Atom n = i * n_z + j sits at
/// (i * d_x, j * d_z); the projection never changes while the surface morphs.
class ArrayGeometry {
 public:
  ArrayGeometry(std::size_t n_x, std::size_t n_z, double d_x, double d_z, double wavelength);

  std::size_t size() const { return coords_.size(); }
  std::size_t n_x() const { return n_x_; }
  std::size_t n_z() const { return n_z_; }
  double spacing_x() const { return d_x_; }
  double spacing_z() const { return d_z_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const { return 2.0 * kPi / wavelength_; }

  std::span<const AtomPosition> coords() const { return coords_; }
  const AtomPosition& operator[](std::size_t n) const { return coords_[n]; }

 private:
  std::size_t n_x_;
  std::size_t n_z_;
  double d_x_;
  double d_z_;
  double wavelength_;
  std::vector<AtomPosition> coords_;
};

ArrayGeometry build_upa(std::size_t n_x, std::size_t n_z, double d_x, double d_z, double wavelength);

/// Maximum displacement magnitude b. b = 0 is a rigid UPA.
class MorphingBounds {
 public:
  explicit MorphingBounds(double max_displacement);

  double limit() const { return b_; }
  double clamp(double y) const { return std::min(std::max(y, -b_), b_); }

 private:
  double b_;
};

struct SurfaceShape {
  RealVector y;

  static SurfaceShape flat(std::size_t atoms) { return {RealVector::Zero(static_cast<Eigen::Index>(atoms))}; }
  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
};

/// Shapes used over the pilot slots. The flattened form (slot-major) is the
/// optimization variable of the coherence problem.
class StackedShapes {
 public:
  StackedShapes() = default;
  explicit StackedShapes(std::vector<SurfaceShape> shapes);

  static StackedShapes flat(std::size_t slots, std::size_t atoms);
  static StackedShapes from_flat(const RealVector& flat, std::size_t atoms);

  std::size_t slots() const { return shapes_.size(); }
  std::size_t atoms() const { return shapes_.empty() ? 0 : shapes_.front().size(); }
  const SurfaceShape& operator[](std::size_t t) const { return shapes_[t]; }
  std::span<const SurfaceShape> shapes() const { return shapes_; }

  RealVector flatten() const;

 private:
  std::vector<SurfaceShape> shapes_;
};

void project_in_place(RealVector& y, const MorphingBounds& bounds);
SurfaceShape project_shape(SurfaceShape shape, const MorphingBounds& bounds);
StackedShapes project_shape(const StackedShapes& shapes, const MorphingBounds& bounds);

SurfaceShape random_shape(const ArrayGeometry& geometry, const MorphingBounds& bounds, std::uint64_t seed);
StackedShapes random_stacked_shapes(const ArrayGeometry& geometry, const MorphingBounds& bounds,
                                    std::size_t slots, std::uint64_t seed);

}  // namespace fim
