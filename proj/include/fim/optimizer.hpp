#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fim/types.hpp"

namespace fim {

using Objective = std::function<double(const RealVector&)>;
using Gradient = std::function<RealVector(const RealVector&)>;

/// The same [lower, upper] interval applied to every coordinate.
struct BoxBounds {
  double lower;
  double upper;

  static BoxBounds symmetric(double b) { return {-b, b}; }
  static BoxBounds unbounded();
  bool degenerate() const { return upper <= lower; }
  void project(RealVector& y) const;
  bool contains(const RealVector& y) const;
};

struct LineSearchConfig {
  double initial_step = 1.0;
  double expand = 2.0;
  double backtrack = 0.5;
  int max_trials = 30;
};

struct DfpConfig {
  double c = 0.33;           // Armijo-Goldstein control, in (0, 1/2)
  int max_iterations = 50;
  double tolerance = 1e-4;   // stop when |f_k - f_{k-1}| < tolerance
  int starts = 10;
  LineSearchConfig line_search;

  void validate() const;
};

enum class LineSearchStatus {
  accepted,                // both Armijo-Goldstein conditions hold
  sufficient_decrease,     // only the Armijo condition; trial budget spent or step saturated by the box
  failed,
};

struct LineSearchResult {
  LineSearchStatus status = LineSearchStatus::failed;
  double step = 0.0;
  RealVector point;
  double value = 0.0;
  int trials = 0;
};

/// Two-sided Armijo-Goldstein search along `direction` from `y`. Trial
/// points are projected onto the box before evaluation and the predicted
/// decrease uses the projected step s = P(y + tau d) - y:
///   f(y + s) <= f(y) + c g's          (sufficient decrease)
///   f(y + s) >= f(y) + (1 - c) g's    (step not too small)
/// Without active bounds g's = tau g'd.
LineSearchResult armijo_goldstein_step(const Objective& f, double value, const RealVector& grad, const RealVector& y,
                                       const RealVector& direction, double c, const BoxBounds& bounds,
                                       const LineSearchConfig& cfg = {});

/// DFP inverse-Hessian update. Returns H unchanged unless mu'nu > 0 and both
/// denominators exceed 1e-30. The result is symmetrized.
RealMatrix dfp_update(const RealMatrix& H, const RealVector& mu, const RealVector& nu);

enum class DfpStatus { converged, max_iterations, stalled, fixed };

struct DfpIterate {
  int iteration;
  const RealVector& point;
  double value;
  const RealMatrix& inverse_hessian;
  bool hessian_updated;
};

using DfpObserver = std::function<void(const DfpIterate&)>;

struct DfpResult {
  RealVector point;
  double value = 0.0;
  std::vector<double> trace;  // trace[0] = f(y0), one entry per accepted step
  int iterations = 0;
  int hessian_updates = 0;
  int fallbacks = 0;          // iterations that fell back to projected steepest descent
  DfpStatus status = DfpStatus::max_iterations;
};

/// Box-projected DFP quasi-Newton minimization.
DfpResult dfp_minimize(const Objective& f, const Gradient& grad, RealVector y0, const BoxBounds& bounds,
                       const DfpConfig& cfg, const DfpObserver& observer = {});

struct MultiStartResult {
  DfpResult best;
  std::size_t best_index = 0;
  std::vector<double> final_values;  // explicit starts first, then one per seed
};

RealVector random_point(std::size_t dimension, const BoxBounds& bounds, std::uint64_t seed);

/// Runs dfp_minimize from every explicit start and from one uniform random
/// start per seed. Starts run in parallel; the result depends only on the
/// inputs. Ties go to the lowest start index.
MultiStartResult multi_start(const Objective& f, const Gradient& grad, std::size_t dimension, const BoxBounds& bounds,
                             const DfpConfig& cfg, std::span<const std::uint64_t> seeds,
                             std::span<const RealVector> explicit_starts = {});

}  // namespace fim
