#include "fim/geometry.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "fim/rng.hpp"

namespace fim {

ArrayGeometry::ArrayGeometry(std::size_t n_x, std::size_t n_z, double d_x, double d_z, double wavelength)
    : n_x_(n_x), n_z_(n_z), d_x_(d_x), d_z_(d_z), wavelength_(wavelength) {
  if (n_x == 0 || n_z == 0) throw std::invalid_argument("array dimensions must be >= 1");
  if (!(d_x > 0.0) || !(d_z > 0.0)) throw std::invalid_argument("atom spacings must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  coords_.reserve(n_x * n_z);
  for (std::size_t i = 0; i < n_x; ++i)
    for (std::size_t j = 0; j < n_z; ++j)
      coords_.push_back({static_cast<double>(i) * d_x, static_cast<double>(j) * d_z});
}

ArrayGeometry build_upa(std::size_t n_x, std::size_t n_z, double d_x, double d_z, double wavelength) {
  return ArrayGeometry(n_x, n_z, d_x, d_z, wavelength);
}

MorphingBounds::MorphingBounds(double max_displacement) : b_(max_displacement) {
  if (!(max_displacement >= 0.0))
    throw std::invalid_argument("morphing bound must be >= 0, got " + std::to_string(max_displacement));
}

StackedShapes::StackedShapes(std::vector<SurfaceShape> shapes) : shapes_(std::move(shapes)) {
  for (const auto& s : shapes_)
    if (s.size() != shapes_.front().size()) throw std::invalid_argument("stacked shapes must share one length");
}

StackedShapes StackedShapes::flat(std::size_t slots, std::size_t atoms) {
  return StackedShapes(std::vector<SurfaceShape>(slots, SurfaceShape::flat(atoms)));
}

StackedShapes StackedShapes::from_flat(const RealVector& flat, std::size_t atoms) {
  if (atoms == 0 || flat.size() % static_cast<Eigen::Index>(atoms) != 0)
    throw std::invalid_argument("flat shape length is not a multiple of the atom count");
  const auto n = static_cast<Eigen::Index>(atoms);
  std::vector<SurfaceShape> shapes;
  for (Eigen::Index t = 0; t < flat.size() / n; ++t) shapes.push_back({flat.segment(t * n, n)});
  return StackedShapes(std::move(shapes));
}

RealVector StackedShapes::flatten() const {
  const auto n = static_cast<Eigen::Index>(atoms());
  RealVector out(n * static_cast<Eigen::Index>(slots()));
  for (std::size_t t = 0; t < slots(); ++t) out.segment(static_cast<Eigen::Index>(t) * n, n) = shapes_[t].y;
  return out;
}

void project_in_place(RealVector& y, const MorphingBounds& bounds) {
  const double b = bounds.limit();
  y = y.cwiseMax(-b).cwiseMin(b);
}

SurfaceShape project_shape(SurfaceShape shape, const MorphingBounds& bounds) {
  project_in_place(shape.y, bounds);
  return shape;
}

StackedShapes project_shape(const StackedShapes& shapes, const MorphingBounds& bounds) {
  std::vector<SurfaceShape> out;
  out.reserve(shapes.slots());
  for (const auto& s : shapes.shapes()) out.push_back(project_shape(s, bounds));
  return StackedShapes(std::move(out));
}

SurfaceShape random_shape(const ArrayGeometry& geometry, const MorphingBounds& bounds, std::uint64_t seed) {
  auto rng = make_rng(seed);
  const double b = bounds.limit();
  SurfaceShape shape = SurfaceShape::flat(geometry.size());
  if (b == 0.0) return shape;
  std::uniform_real_distribution<double> uniform(-b, b);
  for (auto& v : shape.y) v = uniform(rng);
  return shape;
}

StackedShapes random_stacked_shapes(const ArrayGeometry& geometry, const MorphingBounds& bounds,
                                    std::size_t slots, std::uint64_t seed) {
  std::vector<SurfaceShape> shapes;
  shapes.reserve(slots);
  for (std::size_t t = 0; t < slots; ++t) shapes.push_back(random_shape(geometry, bounds, derive_seed(seed, t)));
  return StackedShapes(std::move(shapes));
}

}  // namespace fim
