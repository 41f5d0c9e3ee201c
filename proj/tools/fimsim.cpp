// Command-line driver for the experiment campaigns. One subcommand per figure
// of the reference study; every run writes the common CSV schema.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fim/config.hpp"
#include "fim/csv.hpp"
#include "fim/harness.hpp"

namespace {

enum class Kind { uplink, downlink, convergence };

struct Experiment {
  const char* name;
  const char* description;
  Kind kind;
  fim::SweepVariable sweep;
  std::vector<double> values;
  // applied before the user's config file
  void (*defaults)(fim::ExperimentConfig&);
};

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> list = {
      {"uplink-snr", "NMSE versus uplink SNR", Kind::uplink, fim::SweepVariable::uplink_snr_db,
       {-10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10}, [](fim::ExperimentConfig&) {}},
      {"measurements", "NMSE versus number of pilot slots", Kind::uplink, fim::SweepVariable::slots,
       {2, 4, 6, 8, 10}, [](fim::ExperimentConfig& c) { c.uplink_snr_db = -10.0; }},
      {"morphing-range", "NMSE versus morphing range (in wavelengths)", Kind::uplink,
       fim::SweepVariable::bound_wavelengths, {0, 0.25, 0.5, 0.75, 1.0},
       [](fim::ExperimentConfig& c) {
         c.uplink_snr_db = 10.0;
         c.schemes = fim::SchemeSelection::fim;
       }},
      {"paths", "NMSE versus number of propagation paths", Kind::uplink, fim::SweepVariable::paths,
       {1, 2, 3, 4, 5, 6, 7, 8, 9}, [](fim::ExperimentConfig& c) { c.uplink_snr_db = 10.0; }},
      {"downlink-gain", "downlink SNR from estimated and perfect CSI", Kind::downlink,
       fim::SweepVariable::uplink_snr_db, {-10, -5, 0, 5, 10}, [](fim::ExperimentConfig&) {}},
      {"convergence", "coherence trace of single DFP runs per morphing range", Kind::convergence,
       fim::SweepVariable::bound_wavelengths, {0.25, 0.5, 1.0},
       [](fim::ExperimentConfig& c) { c.trials = 10; }},
  };
  return list;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  double scale = 1.0;
  std::string scheme;
  std::optional<std::size_t> trials;
  bool timing = false;
  bool print_config = false;
};

int run(const Experiment& e, const Options& opt) {
  fim::ExperimentConfig cfg;
  cfg.sweep = e.sweep;
  cfg.sweep_values = e.values;
  e.defaults(cfg);
  if (!opt.config.empty()) cfg = fim::load_config(opt.config, cfg);
  if (cfg.sweep != e.sweep) throw std::invalid_argument(std::string(e.name) + " sweeps " + fim::to_string(e.sweep));
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.scheme.empty())
    cfg.schemes = opt.scheme == "fim" ? fim::SchemeSelection::fim
                  : opt.scheme == "upa" ? fim::SchemeSelection::upa
                                        : fim::SchemeSelection::both;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.timing) cfg.record_timing = true;
  cfg = fim::apply_scale(cfg, opt.scale);
  cfg.validate();

  if (opt.print_config) {
    std::cout << fim::format_config(cfg);
    return 0;
  }

  std::vector<fim::ResultRecord> records;
  switch (e.kind) {
    case Kind::uplink: records = fim::run_uplink_experiment(cfg); break;
    case Kind::downlink: records = fim::run_downlink_experiment(cfg); break;
    case Kind::convergence: records = fim::run_convergence_experiment(cfg); break;
  }
  if (opt.out.empty() || opt.out == "-") {
    fim::write_csv(std::cout, records);
  } else {
    fim::emit_csv(records, opt.out);
    for (const auto& s : fim::summarize(records)) {
      if (e.kind == Kind::convergence) break;
      std::fprintf(stderr, "%-12s %s=%-8g %s mean=%.3f dB (n=%zu)\n", s.scheme.c_str(), fim::to_string(cfg.sweep),
                   s.sweep_value, s.metric_name.c_str(), s.mean_db, s.count);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible-metasurface channel estimation and downlink simulator"};
  app.require_subcommand(1);

  Options opt;
  std::vector<std::pair<CLI::App*, const Experiment*>> subs;
  for (const auto& e : experiments()) {
    auto* sub = app.add_subcommand(e.name, e.description);
    sub->add_option("--config", opt.config, "key = value config file (schema_version = 1)")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--out", opt.out, "output CSV path (stdout when omitted)");
    sub->add_option("--scale", opt.scale, "shrink array, grid and trials for quick runs")->check(CLI::PositiveNumber);
    sub->add_option("--scheme", opt.scheme, "fim|upa|both")->check(CLI::IsMember({"fim", "upa", "both"}));
    sub->add_option("--trials", opt.trials, "Monte-Carlo trials (overrides config)");
    sub->add_flag("--timing", opt.timing, "record wall-clock time per trial (output no longer reproducible)");
    sub->add_flag("--print-config", opt.print_config, "print the effective config and exit");
    subs.emplace_back(sub, &e);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    for (auto& [sub, e] : subs)
      if (sub->parsed()) return run(*e, opt);
  } catch (const std::exception& ex) {
    std::cerr << "fimsim: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
