#include <doctest.h>

#include <random>

#include "fim/coherence.hpp"
#include "oracles.hpp"

using namespace fim;

namespace {

constexpr double kLambda = 0.01;

ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = Complex(n(rng), n(rng));
  return a;
}

}  // namespace

TEST_CASE("coherence closed forms") {
  ComplexMatrix orth(2, 2);
  orth << 1, 1, 1, -1;
  CHECK(coherence_objective(orth) == doctest::Approx(0.0));

  const Eigen::Index r = 7;
  ComplexMatrix same(r, 2);
  for (Eigen::Index i = 0; i < r; ++i) same(i, 0) = same(i, 1) = std::polar(1.0, 0.3 * static_cast<double>(i * i));
  CHECK(coherence_objective(same) == doctest::Approx(static_cast<double>(r)));

  CHECK(coherence_objective(ComplexMatrix(3, 1)) == 0.0);
}

TEST_CASE("coherence equals brute-force summation") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto a = random_matrix(6, 8, s);
    const double ref = oracle::brute_coherence(a);
    CHECK(coherence_objective(a) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(reference::coherence_objective(a) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("coherence gradient matches finite differences") {
  auto g = build_upa(2, 2, kLambda / 2, kLambda / 2, kLambda);
  auto grid = build_grid(3, 3);
  CoherenceProblem problem(g, grid, 2);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto shapes = random_stacked_shapes(g, MorphingBounds(kLambda), 2, 40 + s);
    RealVector x = shapes.flatten();
    RealVector analytic = coherence_gradient(g, shapes, grid);
    RealVector fd = oracle::central_difference([&](const RealVector& v) { return problem.value(v); }, x, kLambda * 1e-6);
    const double floor = 1e-6 * fd.cwiseAbs().maxCoeff();
    CHECK(oracle::max_relative_error(analytic, fd, floor) < 1e-5);
    CHECK((problem.gradient(x) - analytic).norm() == 0.0);
  }
}

TEST_CASE("parallel gradient equals the reference kernel") {
  auto g = build_upa(3, 2, kLambda / 2, 0.7 * kLambda, kLambda);
  auto grid = build_grid(5, 4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto shapes = random_stacked_shapes(g, MorphingBounds(kLambda), 3, 70 + s);
    RealVector fast = coherence_gradient(g, shapes, grid);
    RealVector slow = reference::coherence_gradient(g, shapes, grid);
    CHECK((fast - slow).norm() <= 1e-9 * slow.norm());
    auto ev = evaluate_coherence(g, shapes, grid, false);
    CHECK(ev.gradient.size() == 0);
    CHECK(ev.value == doctest::Approx(oracle::brute_coherence(measurement_matrix(g, shapes, grid).entries)).epsilon(1e-12));
  }
}

TEST_CASE("pairs without elevation contrast contribute nothing") {
  auto g = build_upa(2, 2, kLambda / 2, kLambda / 2, kLambda);
  // Every column of a 2x2 grid shares phi_y = sqrt(0.5).
  auto grid = build_grid(2, 2);
  auto shapes = random_stacked_shapes(g, MorphingBounds(kLambda), 2, 3);
  CHECK(coherence_gradient(g, shapes, grid).isZero(0.0));
  CHECK(reference::coherence_gradient(g, shapes, grid).isZero(0.0));

  // The two invalid corners of a 4x4 grid at (0.75, 0.75) and (-0.75, -0.75).
  auto big = build_grid(4, 4);
  std::size_t invalid = 0;
  for (const auto& p : big.points()) invalid += p.valid ? 0 : 1;
  CHECK(invalid == 4);
}

TEST_CASE("slot blocks are independent") {
  auto g = build_upa(2, 2, kLambda / 2, kLambda / 2, kLambda);
  auto grid = build_grid(4, 4);
  auto shapes = random_stacked_shapes(g, MorphingBounds(kLambda), 2, 5);
  RealVector x = shapes.flatten();
  RealVector moved = x;
  moved.head(4).array() += 0.1 * kLambda;
  auto a = measurement_matrix(g, shapes, grid).entries;
  auto b = measurement_matrix(g, StackedShapes::from_flat(moved, 4), grid).entries;
  CHECK(a.bottomRows(4) == b.bottomRows(4));
  CHECK(a.topRows(4) != b.topRows(4));
}

TEST_CASE("morphing changes the coherence") {
  auto g = build_upa(3, 3, kLambda / 2, kLambda / 2, kLambda);
  auto grid = build_grid(6, 6);
  CoherenceProblem problem(g, grid, 2);
  RealVector flat = RealVector::Zero(18);
  RealVector bent = random_stacked_shapes(g, MorphingBounds(kLambda), 2, 9).flatten();
  CHECK(problem.value(flat) != doctest::Approx(problem.value(bent)));
  CHECK(problem.dimension() == 18);
}
