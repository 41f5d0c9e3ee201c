#include <doctest.h>

#include <cmath>
#include <vector>

#include "fim/channel.hpp"
#include "fim/coherence.hpp"
#include "fim/dictionary.hpp"

using namespace fim;

namespace {

constexpr double kLambda = 0.01;

}  // namespace

TEST_CASE("2x2 grid by hand") {
  auto grid = build_grid(2, 2);
  REQUIRE(grid.size() == 4);
  for (const auto& p : grid.points()) {
    CHECK(std::abs(p.phi_x) == doctest::Approx(0.5));
    CHECK(std::abs(p.phi_z) == doctest::Approx(0.5));
    CHECK(p.valid);
    CHECK(p.phi_y == doctest::Approx(std::sqrt(0.5)));
  }
  CHECK(grid[0].phi_x == doctest::Approx(-0.5));
  CHECK(grid[0].phi_z == doctest::Approx(-0.5));
  CHECK(grid[1].phi_z == doctest::Approx(0.5));
  CHECK(grid[2].phi_x == doctest::Approx(0.5));
}

TEST_CASE("20x20 grid and invalid columns") {
  auto grid = build_grid(20, 20);
  REQUIRE(grid.size() == 400);
  const auto& corner = grid[399];
  CHECK(corner.phi_x == doctest::Approx(0.95));
  CHECK(corner.phi_z == doctest::Approx(0.95));
  CHECK_FALSE(corner.valid);
  CHECK(corner.phi_y == 0.0);

  std::size_t valid = 0;
  for (const auto& p : grid.points()) {
    if (p.valid) {
      ++valid;
      CHECK(p.phi_x * p.phi_x + p.phi_y * p.phi_y + p.phi_z * p.phi_z == doctest::Approx(1.0));
    } else {
      CHECK(p.phi_y == 0.0);
    }
  }
  auto dropped = build_grid(20, 20, InvalidColumns::drop);
  CHECK(dropped.size() == valid);
  for (const auto& p : dropped.points()) CHECK(p.valid);
  CHECK(valid < 400);
  CHECK(valid > 300);
}

TEST_CASE("nearest valid column") {
  auto grid = build_grid(20, 20);
  auto m = nearest_valid_column(grid, 0.95, 0.95);
  CHECK(grid[m].valid);
  CHECK(nearest_valid_column(grid, grid[25].phi_x, grid[25].phi_z) == 25);
}

TEST_CASE("measurement matrix columns") {
  auto g = build_upa(3, 3, kLambda / 2, kLambda / 2, kLambda);

  SUBCASE("broadside column of an odd grid is all ones") {
    auto grid = build_grid(5, 5);
    auto psi = measurement_matrix(g, SurfaceShape::flat(g.size()), grid);
    const auto& p = grid[12];
    REQUIRE(p.phi_x == doctest::Approx(0.0));
    REQUIRE(p.phi_z == doctest::Approx(0.0));
    for (Eigen::Index n = 0; n < psi.entries.rows(); ++n) CHECK(std::abs(psi.entries(n, 12) - Complex(1.0)) < 1e-12);
  }
  SUBCASE("valid columns are steering vectors") {
    auto grid = build_grid(7, 6);
    auto shape = random_shape(g, MorphingBounds(kLambda), 4);
    auto psi = measurement_matrix(g, shape, grid);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const auto& p = grid[m];
      CHECK(psi.entries.col(static_cast<Eigen::Index>(m)).norm() == doctest::Approx(std::sqrt(9.0)));
      if (!p.valid) continue;
      auto a = steering_vector(g, shape, std::acos(p.phi_z), std::atan2(p.phi_y, p.phi_x));
      CHECK((psi.entries.col(static_cast<Eigen::Index>(m)) - a).norm() < 1e-10);
    }
  }
}

TEST_CASE("stacking") {
  auto g = build_upa(2, 3, kLambda / 2, kLambda / 2, kLambda);
  auto grid = build_grid(4, 4);
  auto shapes = random_stacked_shapes(g, MorphingBounds(kLambda), 3, 8);

  SUBCASE("single slot is the identity") {
    std::vector<MeasurementMatrix> one{measurement_matrix(g, shapes[0], grid)};
    auto s = stack(one);
    CHECK(s.entries == one[0].entries);
    CHECK(s.slots() == 1);
  }
  SUBCASE("equal shapes give identical blocks") {
    auto block = measurement_matrix(g, shapes[1], grid);
    std::vector<MeasurementMatrix> two{block, block};
    auto s = stack(two);
    REQUIRE(s.rows() == 12);
    CHECK(s.entries.topRows(6) == s.entries.bottomRows(6));
  }
  SUBCASE("direct stacked build equals stacking the slots") {
    std::vector<MeasurementMatrix> blocks;
    for (std::size_t t = 0; t < shapes.slots(); ++t) blocks.push_back(measurement_matrix(g, shapes[t], grid));
    auto direct = measurement_matrix(g, shapes, grid);
    CHECK(direct.slots() == 3);
    CHECK((direct.entries - stack(blocks).entries).norm() < 1e-12);
  }
  SUBCASE("flat stacks scale the coherence by the slot count") {
    auto flat1 = measurement_matrix(g, SurfaceShape::flat(g.size()), grid);
    auto flat3 = measurement_matrix(g, StackedShapes::flat(3, g.size()), grid);
    CHECK(coherence_objective(flat3) == doctest::Approx(3.0 * coherence_objective(flat1)).epsilon(1e-12));
  }
}
