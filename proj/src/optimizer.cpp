#include "fim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "fim/rng.hpp"

namespace fim {

BoxBounds BoxBounds::unbounded() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

void BoxBounds::project(RealVector& y) const { y = y.cwiseMax(lower).cwiseMin(upper); }

bool BoxBounds::contains(const RealVector& y) const {
  return y.size() == 0 || (y.minCoeff() >= lower && y.maxCoeff() <= upper);
}

void DfpConfig::validate() const {
  if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("Armijo-Goldstein control c must lie in (0, 1/2)");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (starts < 1) throw std::invalid_argument("starts must be >= 1");
  if (line_search.max_trials < 1 || !(line_search.initial_step > 0.0) || !(line_search.expand > 1.0) ||
      !(line_search.backtrack > 0.0 && line_search.backtrack < 1.0))
    throw std::invalid_argument("invalid line-search parameters");
}

LineSearchResult armijo_goldstein_step(const Objective& f, double value, const RealVector& grad, const RealVector& y,
                                       const RealVector& direction, double c, const BoxBounds& bounds,
                                       const LineSearchConfig& cfg) {
  LineSearchResult out;
  if (!(grad.dot(direction) < 0.0)) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  double tau = cfg.initial_step;
  // A step longer than the box is wide only lands on a face; start no further.
  const double width = bounds.upper - bounds.lower;
  const double reach = direction.cwiseAbs().maxCoeff();
  if (std::isfinite(width) && reach > 0.0) tau = std::min(tau, width / reach);
  double lo = 0.0;
  double hi = inf;
  std::optional<LineSearchResult> best_decrease;

  for (int trial = 1; trial <= cfg.max_trials; ++trial) {
    out.trials = trial;
    RealVector candidate = y + tau * direction;
    bounds.project(candidate);
    const double slope = grad.dot(candidate - y);
    const double ft = slope < 0.0 ? f(candidate) : inf;

    if (!std::isfinite(ft) || ft > value + c * slope) {
      hi = tau;
      tau = lo > 0.0 ? 0.5 * (lo + hi) : tau * cfg.backtrack;
      continue;
    }
    if (ft < value + (1.0 - c) * slope) {
      // Sufficient decrease but the step is too short. When the box has
      // already saturated the step, longer steps cannot change the point.
      if (best_decrease && hi == inf && (best_decrease->point - candidate).squaredNorm() == 0.0) {
        best_decrease->trials = trial;
        return *best_decrease;
      }
      best_decrease = LineSearchResult{LineSearchStatus::sufficient_decrease, tau, candidate, ft, trial};
      lo = tau;
      tau = hi == inf ? tau * cfg.expand : 0.5 * (lo + hi);
      continue;
    }
    out.status = LineSearchStatus::accepted;
    out.step = tau;
    out.point = std::move(candidate);
    out.value = ft;
    return out;
  }
  if (best_decrease) {
    best_decrease->trials = out.trials;
    return *best_decrease;
  }
  return out;
}

namespace {

std::optional<RealMatrix> try_dfp_update(const RealMatrix& H, const RealVector& mu, const RealVector& nu) {
  constexpr double kDegenerate = 1e-30;
  const double curvature = mu.dot(nu);
  if (!(curvature > kDegenerate)) return std::nullopt;
  const RealVector hnu = H * nu;
  const double nhn = nu.dot(hnu);
  if (!(nhn > kDegenerate)) return std::nullopt;
  RealMatrix next = H + (mu * mu.transpose()) / curvature - (hnu * hnu.transpose()) / nhn;
  return RealMatrix(0.5 * (next + next.transpose()));
}

}  // namespace

RealMatrix dfp_update(const RealMatrix& H, const RealVector& mu, const RealVector& nu) {
  auto next = try_dfp_update(H, mu, nu);
  return next ? *next : H;
}

DfpResult dfp_minimize(const Objective& f, const Gradient& grad, RealVector y0, const BoxBounds& bounds,
                       const DfpConfig& cfg, const DfpObserver& observer) {
  cfg.validate();
  DfpResult result;
  bounds.project(y0);
  RealVector y = std::move(y0);
  double fy = f(y);
  if (!std::isfinite(fy)) throw std::domain_error("objective is not finite at the starting point");
  result.trace.push_back(fy);

  if (bounds.degenerate() || y.size() == 0) {
    result.point = std::move(y);
    result.value = fy;
    result.status = DfpStatus::fixed;
    return result;
  }

  const Eigen::Index dim = y.size();
  RealMatrix H = RealMatrix::Identity(dim, dim);
  RealVector g = grad(y);
  result.status = DfpStatus::max_iterations;

  for (int k = 0; k < cfg.max_iterations; ++k) {
    RealVector stationary = y - g;
    bounds.project(stationary);
    if ((stationary - y).squaredNorm() == 0.0) {
      result.status = DfpStatus::converged;
      break;
    }

    RealVector d = -(H * g);
    if (!(g.dot(d) < 0.0)) {
      H.setIdentity();
      d = -g;
    }
    auto step = armijo_goldstein_step(f, fy, g, y, d, cfg.c, bounds, cfg.line_search);
    if (step.status == LineSearchStatus::failed) {
      ++result.fallbacks;
      step = armijo_goldstein_step(f, fy, g, y, -g, cfg.c, bounds, cfg.line_search);
      if (step.status == LineSearchStatus::failed) {
        result.status = DfpStatus::stalled;
        break;
      }
    }

    RealVector g_next = grad(step.point);
    const RealVector mu = step.point - y;
    const RealVector nu = g_next - g;
    bool updated = false;
    if (auto next = try_dfp_update(H, mu, nu)) {
      H = std::move(*next);
      updated = true;
      ++result.hessian_updates;
    }

    const double decrease = std::abs(step.value - fy);
    y = std::move(step.point);
    fy = step.value;
    g = std::move(g_next);
    result.trace.push_back(fy);
    result.iterations = k + 1;
    if (observer) observer(DfpIterate{k + 1, y, fy, H, updated});
    if (decrease < cfg.tolerance) {
      result.status = DfpStatus::converged;
      break;
    }
  }

  result.point = std::move(y);
  result.value = fy;
  return result;
}

RealVector random_point(std::size_t dimension, const BoxBounds& bounds, std::uint64_t seed) {
  RealVector y(static_cast<Eigen::Index>(dimension));
  if (bounds.degenerate()) {
    y.setConstant(bounds.lower);
    return y;
  }
  const double lo = std::isfinite(bounds.lower) ? bounds.lower : -1.0;
  const double hi = std::isfinite(bounds.upper) ? bounds.upper : 1.0;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  for (auto& v : y) v = uniform(rng);
  return y;
}

MultiStartResult multi_start(const Objective& f, const Gradient& grad, std::size_t dimension, const BoxBounds& bounds,
                             const DfpConfig& cfg, std::span<const std::uint64_t> seeds,
                             std::span<const RealVector> explicit_starts) {
  cfg.validate();
  const std::size_t total = explicit_starts.size() + seeds.size();
  if (total == 0) throw std::invalid_argument("multi_start needs at least one start");

  std::vector<DfpResult> runs(total);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
    try {
      const auto idx = static_cast<std::size_t>(i);
      RealVector start = idx < explicit_starts.size()
                             ? explicit_starts[idx]
                             : random_point(dimension, bounds, seeds[idx - explicit_starts.size()]);
      runs[idx] = dfp_minimize(f, grad, std::move(start), bounds, cfg);
    } catch (...) {
#pragma omp critical(fim_multi_start_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  MultiStartResult out;
  out.final_values.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.final_values.push_back(runs[i].value);
    if (runs[i].value < runs[out.best_index].value) out.best_index = i;
  }
  out.best = std::move(runs[out.best_index]);
  return out;
}

}  // namespace fim
