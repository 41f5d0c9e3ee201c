#include "fim/harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <tuple>

#include "fim/channel.hpp"
#include "fim/coherence.hpp"
#include "fim/dictionary.hpp"
#include "fim/downlink.hpp"
#include "fim/estimator.hpp"
#include "fim/rng.hpp"

namespace fim {

namespace {

// Stream identifiers for seed derivation from the master seed.
enum : std::uint64_t {
  kShapeStream = 1,
  kTrialStream = 2,
  kConvergenceStream = 3,
};

enum : std::uint64_t {
  kAngleStream = 1,
  kGainStream = 2,
  kNoiseStream = 3,
  kDownlinkStream = 4,
};

ArrayGeometry make_geometry(const ExperimentConfig& cfg) {
  const double lambda = cfg.wavelength();
  return build_upa(cfg.n_x, cfg.n_z, cfg.spacing_x_wavelengths * lambda, cfg.spacing_z_wavelengths * lambda, lambda);
}

AngularGrid make_grid(const ExperimentConfig& cfg) { return build_grid(cfg.grid_x, cfg.grid_z, cfg.invalid_columns); }

LinkBudget make_budget(const ExperimentConfig& cfg) {
  LinkBudget budget;
  budget.gamma0_sq_db = cfg.gamma0_sq_db;
  budget.distance_m = cfg.distance_m;
  budget.pathloss_exponent = cfg.pathloss_exponent;
  budget.noise_power_dbm = cfg.noise_power_dbm();
  budget.set_uplink_snr_db(cfg.uplink_snr_db);
  return budget;
}

ExperimentConfig with_sweep_value(ExperimentConfig cfg, double value) {
  switch (cfg.sweep) {
    case SweepVariable::uplink_snr_db: cfg.uplink_snr_db = value; break;
    case SweepVariable::slots: cfg.slots = static_cast<std::size_t>(value); break;
    case SweepVariable::bound_wavelengths: cfg.bound_wavelengths = value; break;
    case SweepVariable::paths: cfg.paths = static_cast<std::size_t>(value); break;
  }
  return cfg;
}

double current_sweep_value(const ExperimentConfig& cfg) {
  switch (cfg.sweep) {
    case SweepVariable::uplink_snr_db: return cfg.uplink_snr_db;
    case SweepVariable::slots: return static_cast<double>(cfg.slots);
    case SweepVariable::bound_wavelengths: return cfg.bound_wavelengths;
    case SweepVariable::paths: return static_cast<double>(cfg.paths);
  }
  return 0.0;
}

std::vector<double> sweep_points(const ExperimentConfig& cfg) {
  return cfg.sweep_values.empty() ? std::vector<double>{current_sweep_value(cfg)} : cfg.sweep_values;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

// Runs body(i) for i in [0, n) on the OpenMP pool and rethrows the first failure.
template <class Body>
void parallel_trials(std::size_t n, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fim_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct TrialStreams {
  std::uint64_t seed;
  Rng angles;
  Rng gains;
  Rng noise;
};

TrialStreams trial_streams(const ExperimentConfig& cfg, std::size_t trial) {
  const auto seed = derive_seed(cfg.seed, {kTrialStream, trial});
  return {seed, make_rng(derive_seed(seed, kAngleStream)), make_rng(derive_seed(seed, kGainStream)),
          make_rng(derive_seed(seed, kNoiseStream))};
}

ComplexVector observe(const ArrayGeometry& geometry, const StackedShapes& shapes, const PathSet& paths,
                      const LinkBudget& budget, Rng& noise_rng) {
  const auto n = static_cast<Eigen::Index>(geometry.size());
  ComplexVector f(n * static_cast<Eigen::Index>(shapes.slots()));
  const Complex pilot(std::sqrt(budget.pilot_power()), 0.0);
  for (std::size_t t = 0; t < shapes.slots(); ++t) {
    const auto h = channel_response(geometry, shapes[t], paths);
    f.segment(static_cast<Eigen::Index>(t) * n, n) = simulate_uplink(h, pilot, budget.noise_power(), noise_rng);
  }
  return f;
}

PathSet draw_paths(const ExperimentConfig& cfg, const AngularGrid& grid, double gamma_sq, TrialStreams& streams) {
  auto paths = sample_paths(cfg.paths, gamma_sq, streams.angles, streams.gains);
  return cfg.path_angles == PathAngles::grid ? snap_to_grid(paths, grid) : paths;
}

}  // namespace

PathSet snap_to_grid(const PathSet& paths, const AngularGrid& grid) {
  PathSet out = paths;
  for (auto& p : out.paths) {
    const auto w = PlaneWave::from_path(p);
    const auto& g = grid[nearest_valid_column(grid, w.ux, w.uz)];
    p.elevation = std::acos(g.phi_z);
    p.azimuth = std::atan2(g.phi_y, g.phi_x);
  }
  return out;
}

const ShapeCache::Entry& ShapeCache::get_or_optimize(const ExperimentConfig& cfg, std::size_t slots,
                                                     double bound_wavelengths) {
  std::ostringstream key;
  key.precision(17);
  key << cfg.n_x << '|' << cfg.n_z << '|' << cfg.spacing_x_wavelengths << '|' << cfg.spacing_z_wavelengths << '|'
      << cfg.carrier_hz << '|' << cfg.grid_x << '|' << cfg.grid_z << '|' << static_cast<int>(cfg.invalid_columns)
      << '|' << slots << '|' << bound_wavelengths << '|' << cfg.seed << '|' << cfg.dfp.c << '|'
      << cfg.dfp.max_iterations << '|' << cfg.dfp.tolerance << '|' << cfg.dfp.starts << '|'
      << cfg.dfp.line_search.initial_step << '|' << cfg.dfp.line_search.expand << '|'
      << cfg.dfp.line_search.backtrack << '|' << cfg.dfp.line_search.max_trials;

  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(key.str()); it != entries_.end()) return it->second;

  const auto geometry = make_geometry(cfg);
  const auto grid = make_grid(cfg);
  const MorphingBounds bounds(bound_wavelengths * cfg.wavelength());
  Entry entry;
  if (bounds.limit() == 0.0) {
    entry.shapes = StackedShapes::flat(slots, geometry.size());
    entry.coherence = evaluate_coherence(geometry, entry.shapes, grid, false).value;
  } else {
    const CoherenceProblem problem(geometry, grid, slots);
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < cfg.dfp.starts; ++s)
      seeds.push_back(derive_seed(cfg.seed, {kShapeStream, static_cast<std::uint64_t>(s)}));
    const auto run = multi_start([&](const RealVector& y) { return problem.value(y); },
                                 [&](const RealVector& y) { return problem.gradient(y); }, problem.dimension(),
                                 BoxBounds::symmetric(bounds.limit()), cfg.dfp, seeds);
    entry.shapes = StackedShapes::from_flat(run.best.point, geometry.size());
    entry.coherence = run.best.value;
    entry.iterations = run.best.iterations;
  }
  return entries_.emplace(key.str(), std::move(entry)).first->second;
}

std::size_t ShapeCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<ResultRecord> run_uplink_experiment(const ExperimentConfig& cfg, ShapeCache* cache) {
  cfg.validate();
  ShapeCache local;
  if (!cache) cache = &local;
  const auto values = sweep_points(cfg);

  std::vector<ResultRecord> records;
  for (auto scheme : {Scheme::fim, Scheme::upa}) {
    if (!cfg.runs(scheme)) continue;
    for (double value : values) {
      const auto c = with_sweep_value(cfg, value);
      const auto geometry = make_geometry(c);
      const auto grid = make_grid(c);
      const auto budget = make_budget(c);

      StackedShapes shapes;
      double coherence = 0.0;
      int iterations = 0;
      if (scheme == Scheme::fim) {
        const auto& entry = cache->get_or_optimize(c, c.slots, c.bound_wavelengths);
        shapes = entry.shapes;
        coherence = entry.coherence;
        iterations = entry.iterations;
      } else {
        shapes = StackedShapes::flat(c.slots, geometry.size());
        coherence = evaluate_coherence(geometry, shapes, grid, false).value;
      }
      const auto psi = measurement_matrix(geometry, shapes, grid);
      const auto flat = SurfaceShape::flat(geometry.size());
      const Complex pilot(std::sqrt(budget.pilot_power()), 0.0);

      std::vector<ResultRecord> block(c.trials);
      parallel_trials(c.trials, [&](std::size_t trial) {
        const auto start = std::chrono::steady_clock::now();
        auto streams = trial_streams(cfg, trial);
        const auto paths = draw_paths(c, grid, budget.average_gain(), streams);
        const auto f = observe(geometry, shapes, paths, budget, streams.noise);
        const auto est = omp(psi, f, pilot, grid, OmpOptions{c.paths, std::nullopt});
        const auto err = nmse(channel_response(geometry, flat, paths), reconstruct_channel(est, grid, geometry, flat));

        auto& r = block[trial];
        r.scheme = to_string(scheme);
        r.sweep_name = to_string(cfg.sweep);
        r.sweep_value = value;
        r.trial = trial;
        r.seed = streams.seed;
        r.metric_name = "nmse_db";
        r.metric_value = err.db;
        r.coherence = coherence;
        r.iters = iterations;
        r.wall_ms = cfg.record_timing ? elapsed_ms(start) : 0.0;
      });
      records.insert(records.end(), block.begin(), block.end());
    }
  }
  return records;
}

std::vector<ResultRecord> run_downlink_experiment(const ExperimentConfig& cfg, ShapeCache* cache) {
  cfg.validate();
  ShapeCache local;
  if (!cache) cache = &local;
  const auto values = sweep_points(cfg);

  const std::vector<std::string> schemes = [&] {
    std::vector<std::string> s;
    if (cfg.runs(Scheme::fim)) s = {"fim-est", "fim-perfect"};
    if (cfg.runs(Scheme::upa)) s.push_back("upa");
    return s;
  }();

  // metrics[scheme][value][trial]
  std::map<std::string, std::vector<std::vector<ResultRecord>>> blocks;
  for (const auto& s : schemes) blocks[s].resize(values.size());

  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    const double value = values[vi];
    const auto c = with_sweep_value(cfg, value);
    const auto geometry = make_geometry(c);
    const auto grid = make_grid(c);
    const auto budget = make_budget(c);
    const MorphingBounds bounds(c.bound());
    const DownlinkConfig link{c.downlink_power_dbm, c.noise_power_dbm()};

    // CSI is always acquired with the coherence-optimized measurement shapes.
    const auto& entry = cache->get_or_optimize(c, c.slots, c.bound_wavelengths);
    const auto psi = measurement_matrix(geometry, entry.shapes, grid);
    const auto flat = SurfaceShape::flat(geometry.size());
    const Complex pilot(std::sqrt(budget.pilot_power()), 0.0);

    for (const auto& s : schemes) blocks[s][vi].resize(c.trials);
    parallel_trials(c.trials, [&](std::size_t trial) {
      const auto start = std::chrono::steady_clock::now();
      auto streams = trial_streams(cfg, trial);
      const auto paths = draw_paths(c, grid, budget.average_gain(), streams);
      const EstimatedChannelModel truth(geometry, paths);

      std::vector<std::uint64_t> seeds;
      for (int s = 1; s < c.dfp.starts; ++s)
        seeds.push_back(derive_seed(streams.seed, {kDownlinkStream, static_cast<std::uint64_t>(s)}));

      auto emit = [&](const std::string& scheme, double snr_db, int iters, double ms) {
        auto& r = blocks.at(scheme)[vi][trial];
        r.scheme = scheme;
        r.sweep_name = to_string(cfg.sweep);
        r.sweep_value = value;
        r.trial = trial;
        r.seed = streams.seed;
        r.metric_name = "snr_db";
        r.metric_value = snr_db;
        r.coherence = entry.coherence;
        r.iters = iters;
        r.wall_ms = cfg.record_timing ? ms : 0.0;
      };

      if (cfg.runs(Scheme::fim)) {
        const auto f = observe(geometry, entry.shapes, paths, budget, streams.noise);
        const auto est = omp(psi, f, pilot, grid, OmpOptions{c.paths, std::nullopt});
        const EstimatedChannelModel estimated(geometry, est.plane_waves(grid));
        const auto est_shape = optimize_shape_downlink(estimated, bounds, c.dfp, seeds);
        const auto w = mrt_beamformer(estimated.channel(est_shape.shape));
        emit("fim-est", realized_snr_db(truth.channel(est_shape.shape), w, link.p_tx(), link.noise_power()),
             est_shape.iterations, elapsed_ms(start));

        const auto perfect = optimize_shape_downlink(truth, bounds, c.dfp, seeds);
        const auto h = truth.channel(perfect.shape);
        emit("fim-perfect", realized_snr_db(h, mrt_beamformer(h), link.p_tx(), link.noise_power()),
             perfect.iterations, elapsed_ms(start));
      }
      if (cfg.runs(Scheme::upa)) {
        const auto h = truth.channel(flat);
        emit("upa", realized_snr_db(h, mrt_beamformer(h), link.p_tx(), link.noise_power()), 0, elapsed_ms(start));
      }
    });
  }

  std::vector<ResultRecord> records;
  for (const auto& s : schemes)
    for (const auto& block : blocks[s]) records.insert(records.end(), block.begin(), block.end());
  return records;
}

std::vector<ResultRecord> run_convergence_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto c0 = cfg;
  c0.sweep = SweepVariable::bound_wavelengths;
  const auto values = cfg.sweep == SweepVariable::bound_wavelengths ? sweep_points(cfg)
                                                                     : std::vector<double>{cfg.bound_wavelengths};
  std::vector<ResultRecord> records;
  for (double value : values) {
    const auto c = with_sweep_value(c0, value);
    const auto geometry = make_geometry(c);
    const auto grid = make_grid(c);
    const CoherenceProblem problem(geometry, grid, c.slots);
    const auto box = BoxBounds::symmetric(c.bound());

    std::vector<std::vector<ResultRecord>> runs(c.trials);
    parallel_trials(c.trials, [&](std::size_t trial) {
      const auto start = std::chrono::steady_clock::now();
      const auto seed = derive_seed(cfg.seed, {kConvergenceStream, trial});
      const auto run = dfp_minimize([&](const RealVector& y) { return problem.value(y); },
                                    [&](const RealVector& y) { return problem.gradient(y); },
                                    random_point(problem.dimension(), box, seed), box, c.dfp);
      const double ms = cfg.record_timing ? elapsed_ms(start) : 0.0;
      for (std::size_t k = 0; k < run.trace.size(); ++k) {
        ResultRecord r;
        r.scheme = "fim";
        r.sweep_name = to_string(SweepVariable::bound_wavelengths);
        r.sweep_value = value;
        r.trial = trial;
        r.seed = seed;
        r.metric_name = "coherence";
        r.metric_value = run.trace[k];
        r.coherence = run.trace[k];
        r.iters = static_cast<int>(k);
        r.wall_ms = ms;
        runs[trial].push_back(std::move(r));
      }
    });
    for (auto& r : runs) records.insert(records.end(), r.begin(), r.end());
  }
  return records;
}

std::vector<SweepSummary> summarize(const std::vector<ResultRecord>& records) {
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::map<std::tuple<std::string, std::string, double>, Acc> groups;
  std::vector<std::tuple<std::string, std::string, double>> order;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.scheme, r.metric_name, r.sweep_value);
    const bool db = r.metric_name.size() > 3 && r.metric_name.ends_with("_db");
    const double x = db ? db_to_linear(r.metric_value) : r.metric_value;
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.n += 1;
    it->second.sum += x;
    it->second.sum_sq += x * x;
  }
  std::vector<SweepSummary> out;
  for (const auto& key : order) {
    const auto& a = groups.at(key);
    const double mean = a.sum / static_cast<double>(a.n);
    const double var = a.n > 1 ? std::max(0.0, (a.sum_sq - a.sum * mean) / static_cast<double>(a.n - 1)) : 0.0;
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), a.n, mean,
                   std::sqrt(var / static_cast<double>(a.n)), linear_to_db(mean)});
  }
  return out;
}

}  // namespace fim
