#include "fim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "fim/channel.hpp"

namespace fim {

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::uplink_snr_db: return "uplink_snr_db";
    case SweepVariable::slots: return "slots";
    case SweepVariable::bound_wavelengths: return "bound_wavelengths";
    case SweepVariable::paths: return "paths";
  }
  return "?";
}

const char* to_string(Scheme s) { return s == Scheme::fim ? "fim" : "upa"; }

double ExperimentConfig::noise_power_dbm() const {
  return LinkBudget::thermal_noise_dbm(noise_density_dbm_hz, bandwidth_hz);
}

double ExperimentConfig::average_gain_db() const {
  return gamma0_sq_db - 10.0 * pathloss_exponent * std::log10(distance_m);
}

bool ExperimentConfig::runs(Scheme s) const {
  if (schemes == SchemeSelection::both) return true;
  return (s == Scheme::fim) == (schemes == SchemeSelection::fim);
}

namespace {

bool is_count(double v) { return v >= 1.0 && std::floor(v) == v; }

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(n_x >= 1 && n_z >= 1, "n_x and n_z must be >= 1");
  require(spacing_x_wavelengths > 0.0 && spacing_z_wavelengths > 0.0, "spacings must be positive");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(bound_wavelengths >= 0.0, "bound_wavelengths must be >= 0");
  require(slots >= 1, "slots must be >= 1");
  require(grid_x >= 1 && grid_z >= 1, "grid_x and grid_z must be >= 1");
  require(paths >= 1, "paths must be >= 1");
  require(distance_m > 0.0, "distance_m must be positive");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(trials >= 1, "trials must be >= 1");
  require(std::all_of(sweep_values.begin(), sweep_values.end(), [](double v) { return std::isfinite(v); }),
          "sweep values must be finite");
  require(std::is_sorted(sweep_values.begin(), sweep_values.end()), "sweep values must be sorted");
  switch (sweep) {
    case SweepVariable::slots:
    case SweepVariable::paths:
      require(std::all_of(sweep_values.begin(), sweep_values.end(), is_count), "count sweeps need integers >= 1");
      break;
    case SweepVariable::bound_wavelengths:
      require(std::all_of(sweep_values.begin(), sweep_values.end(), [](double v) { return v >= 0.0; }),
              "bound sweep values must be >= 0");
      break;
    case SweepVariable::uplink_snr_db:
      break;
  }
  dfp.validate();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("config key '" + key + "': not a number: " + v);
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || v.front() == '-')
    throw std::invalid_argument("config key '" + key + "': not a non-negative integer: " + v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got " + v);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

SweepVariable to_sweep(const std::string& v) {
  for (auto s : {SweepVariable::uplink_snr_db, SweepVariable::slots, SweepVariable::bound_wavelengths,
                 SweepVariable::paths})
    if (v == to_string(s)) return s;
  throw std::invalid_argument("config key 'sweep': unknown sweep variable " + v);
}

SchemeSelection to_schemes(const std::string& v) {
  if (v == "fim") return SchemeSelection::fim;
  if (v == "upa") return SchemeSelection::upa;
  if (v == "both") return SchemeSelection::both;
  throw std::invalid_argument("config key 'scheme': expected fim|upa|both, got " + v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_x", [](auto& c, auto& k, auto& v) { c.n_x = to_u64(k, v); }},
      {"n_z", [](auto& c, auto& k, auto& v) { c.n_z = to_u64(k, v); }},
      {"spacing_x_wavelengths", [](auto& c, auto& k, auto& v) { c.spacing_x_wavelengths = to_double(k, v); }},
      {"spacing_z_wavelengths", [](auto& c, auto& k, auto& v) { c.spacing_z_wavelengths = to_double(k, v); }},
      {"carrier_hz", [](auto& c, auto& k, auto& v) { c.carrier_hz = to_double(k, v); }},
      {"bound_wavelengths", [](auto& c, auto& k, auto& v) { c.bound_wavelengths = to_double(k, v); }},
      {"slots", [](auto& c, auto& k, auto& v) { c.slots = to_u64(k, v); }},
      {"grid_x", [](auto& c, auto& k, auto& v) { c.grid_x = to_u64(k, v); }},
      {"grid_z", [](auto& c, auto& k, auto& v) { c.grid_z = to_u64(k, v); }},
      {"invalid_columns",
       [](auto& c, auto& k, auto& v) {
         if (v == "keep") c.invalid_columns = InvalidColumns::keep;
         else if (v == "drop") c.invalid_columns = InvalidColumns::drop;
         else throw std::invalid_argument("config key '" + k + "': expected keep|drop, got " + v);
       }},
      {"paths", [](auto& c, auto& k, auto& v) { c.paths = to_u64(k, v); }},
      {"path_angles",
       [](auto& c, auto& k, auto& v) {
         if (v == "grid") c.path_angles = PathAngles::grid;
         else if (v == "continuous") c.path_angles = PathAngles::continuous;
         else throw std::invalid_argument("config key '" + k + "': expected grid|continuous, got " + v);
       }},
      {"gamma0_sq_db", [](auto& c, auto& k, auto& v) { c.gamma0_sq_db = to_double(k, v); }},
      {"distance_m", [](auto& c, auto& k, auto& v) { c.distance_m = to_double(k, v); }},
      {"pathloss_exponent", [](auto& c, auto& k, auto& v) { c.pathloss_exponent = to_double(k, v); }},
      {"bandwidth_hz", [](auto& c, auto& k, auto& v) { c.bandwidth_hz = to_double(k, v); }},
      {"noise_density_dbm_hz", [](auto& c, auto& k, auto& v) { c.noise_density_dbm_hz = to_double(k, v); }},
      {"uplink_snr_db", [](auto& c, auto& k, auto& v) { c.uplink_snr_db = to_double(k, v); }},
      {"downlink_power_dbm", [](auto& c, auto& k, auto& v) { c.downlink_power_dbm = to_double(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = to_u64(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"scheme", [](auto& c, auto&, auto& v) { c.schemes = to_schemes(v); }},
      {"sweep", [](auto& c, auto&, auto& v) { c.sweep = to_sweep(v); }},
      {"sweep_values", [](auto& c, auto& k, auto& v) { c.sweep_values = to_list(k, v); }},
      {"dfp_c", [](auto& c, auto& k, auto& v) { c.dfp.c = to_double(k, v); }},
      {"dfp_max_iterations", [](auto& c, auto& k, auto& v) { c.dfp.max_iterations = static_cast<int>(to_u64(k, v)); }},
      {"dfp_tolerance", [](auto& c, auto& k, auto& v) { c.dfp.tolerance = to_double(k, v); }},
      {"dfp_starts", [](auto& c, auto& k, auto& v) { c.dfp.starts = static_cast<int>(to_u64(k, v)); }},
      {"line_search_initial_step", [](auto& c, auto& k, auto& v) { c.dfp.line_search.initial_step = to_double(k, v); }},
      {"line_search_expand", [](auto& c, auto& k, auto& v) { c.dfp.line_search.expand = to_double(k, v); }},
      {"line_search_backtrack", [](auto& c, auto& k, auto& v) { c.dfp.line_search.backtrack = to_double(k, v); }},
      {"line_search_max_trials",
       [](auto& c, auto& k, auto& v) { c.dfp.line_search.max_trials = static_cast<int>(to_u64(k, v)); }},
      {"record_timing", [](auto& c, auto& k, auto& v) { c.record_timing = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "schema_version") {
      if (to_u64(key, value) != ExperimentConfig::kSchemaVersion)
        throw std::invalid_argument("unsupported config schema_version " + value);
      versioned = true;
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(base, key, value);
  }
  if (!versioned) throw std::invalid_argument("config is missing schema_version");
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "schema_version = " << ExperimentConfig::kSchemaVersion << '\n'
      << "n_x = " << c.n_x << '\n'
      << "n_z = " << c.n_z << '\n'
      << "spacing_x_wavelengths = " << c.spacing_x_wavelengths << '\n'
      << "spacing_z_wavelengths = " << c.spacing_z_wavelengths << '\n'
      << "carrier_hz = " << c.carrier_hz << '\n'
      << "bound_wavelengths = " << c.bound_wavelengths << '\n'
      << "slots = " << c.slots << '\n'
      << "grid_x = " << c.grid_x << '\n'
      << "grid_z = " << c.grid_z << '\n'
      << "invalid_columns = " << (c.invalid_columns == InvalidColumns::keep ? "keep" : "drop") << '\n'
      << "paths = " << c.paths << '\n'
      << "path_angles = " << (c.path_angles == PathAngles::grid ? "grid" : "continuous") << '\n'
      << "gamma0_sq_db = " << c.gamma0_sq_db << '\n'
      << "distance_m = " << c.distance_m << '\n'
      << "pathloss_exponent = " << c.pathloss_exponent << '\n'
      << "bandwidth_hz = " << c.bandwidth_hz << '\n'
      << "noise_density_dbm_hz = " << c.noise_density_dbm_hz << '\n'
      << "uplink_snr_db = " << c.uplink_snr_db << '\n'
      << "downlink_power_dbm = " << c.downlink_power_dbm << '\n'
      << "trials = " << c.trials << '\n'
      << "seed = " << c.seed << '\n'
      << "scheme = "
      << (c.schemes == SchemeSelection::both ? "both" : c.schemes == SchemeSelection::fim ? "fim" : "upa") << '\n'
      << "sweep = " << to_string(c.sweep) << '\n'
      << "sweep_values = ";
  for (std::size_t i = 0; i < c.sweep_values.size(); ++i) out << (i ? ", " : "") << c.sweep_values[i];
  out << '\n'
      << "dfp_c = " << c.dfp.c << '\n'
      << "dfp_max_iterations = " << c.dfp.max_iterations << '\n'
      << "dfp_tolerance = " << c.dfp.tolerance << '\n'
      << "dfp_starts = " << c.dfp.starts << '\n'
      << "line_search_initial_step = " << c.dfp.line_search.initial_step << '\n'
      << "line_search_expand = " << c.dfp.line_search.expand << '\n'
      << "line_search_backtrack = " << c.dfp.line_search.backtrack << '\n'
      << "line_search_max_trials = " << c.dfp.line_search.max_trials << '\n'
      << "record_timing = " << (c.record_timing ? "true" : "false") << '\n';
  return out.str();
}

ExperimentConfig apply_scale(ExperimentConfig cfg, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive");
  if (scale == 1.0) return cfg;
  const double side = std::sqrt(scale);
  auto shrink = [&](std::size_t v) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(static_cast<double>(v) * side)));
  };
  cfg.n_x = shrink(cfg.n_x);
  cfg.n_z = shrink(cfg.n_z);
  cfg.grid_x = shrink(cfg.grid_x);
  cfg.grid_z = shrink(cfg.grid_z);
  cfg.trials = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(cfg.trials) * scale)));
  return cfg;
}

}  // namespace fim
