#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "fim/channel.hpp"
#include "fim/config.hpp"
#include "fim/csv.hpp"
#include "fim/geometry.hpp"
#include "fim/optimizer.hpp"

namespace fim {

/// Optimized measurement shapes keyed by everything that determines them.
/// The coherence objective does not depend on the channel, so one result
/// serves every trial, SNR and path count of a configuration.
class ShapeCache {
 public:
  struct Entry {
    StackedShapes shapes;
    double coherence = 0.0;
    int iterations = 0;
  };

  const Entry& get_or_optimize(const ExperimentConfig& cfg, std::size_t slots, double bound_wavelengths);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

/// Moves every path onto the nearest valid grid direction, keeping its gain.
PathSet snap_to_grid(const PathSet& paths, const AngularGrid& grid);

/// NMSE per (scheme, sweep value, trial), evaluated at the flat shape.
std::vector<ResultRecord> run_uplink_experiment(const ExperimentConfig& cfg, ShapeCache* cache = nullptr);

/// Realized downlink SNR per trial for schemes fim-est (shape and MRT from
/// estimated CSI), fim-perfect (true CSI) and upa (flat, true CSI).
std::vector<ResultRecord> run_downlink_experiment(const ExperimentConfig& cfg, ShapeCache* cache = nullptr);

/// Coherence trace of single-start DFP runs, one record per iteration. The
/// sweep is over the morphing bound; `trial` indexes the random start.
std::vector<ResultRecord> run_convergence_experiment(const ExperimentConfig& cfg);

struct SweepSummary {
  std::string scheme;
  std::string metric_name;
  double sweep_value;
  std::size_t count;
  double mean_linear;
  double stderr_linear;
  double mean_db;
};

/// Groups per (scheme, metric, sweep value). NMSE and SNR are averaged in the
/// linear domain and converted back to dB.
std::vector<SweepSummary> summarize(const std::vector<ResultRecord>& records);

}  // namespace fim
