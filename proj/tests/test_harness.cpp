#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fim/coherence.hpp"
#include "fim/harness.hpp"

using namespace fim;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_x = 3;
  c.n_z = 3;
  c.grid_x = 6;
  c.grid_z = 6;
  c.slots = 3;
  c.trials = 8;
  c.dfp.starts = 2;
  c.dfp.max_iterations = 8;
  c.seed = 17;
  return c;
}

std::string to_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config("schema_version = 1\n# comment\nn_x = 4\nsweep = paths\nsweep_values = 1, 2,3\n"
                        "scheme = upa  # trailing\nuplink_snr_db = -2.5\n");
  CHECK(c.n_x == 4);
  CHECK(c.n_z == 5);
  CHECK(c.sweep == SweepVariable::paths);
  CHECK(c.sweep_values == std::vector<double>{1, 2, 3});
  CHECK(c.schemes == SchemeSelection::upa);
  CHECK(c.uplink_snr_db == -2.5);

  CHECK_THROWS_WITH(parse_config("n_x = 4\n"), doctest::Contains("schema_version"));
  CHECK_THROWS_WITH(parse_config("schema_version = 2\n"), doctest::Contains("schema_version"));
  CHECK_THROWS_WITH(parse_config("schema_version = 1\ncolour = red\n"), doctest::Contains("colour"));
  CHECK_THROWS_WITH(parse_config("schema_version = 1\nn_x = many\n"), doctest::Contains("n_x"));
  CHECK_THROWS_WITH(parse_config("schema_version = 1\nscheme = both fim\n"), doctest::Contains("scheme"));
  CHECK_THROWS(parse_config("schema_version = 1\nnonsense\n"));

  auto round = parse_config(format_config(small_config()));
  CHECK(format_config(round) == format_config(small_config()));

  auto bad = small_config();
  bad.dfp.c = 0.7;
  CHECK_THROWS(bad.validate());
  bad = small_config();
  bad.sweep = SweepVariable::slots;
  bad.sweep_values = {2.5};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("derived link quantities") {
  ExperimentConfig c;
  CHECK(c.noise_power_dbm() == doctest::Approx(-174.0 + 10 * std::log10(50e6)));
  CHECK(c.average_gain_db() == doctest::Approx(-104.0));
  CHECK(c.wavelength() == doctest::Approx(kSpeedOfLight / 30e9));

  auto s = apply_scale(c, 0.25);
  CHECK(s.n_x == 3);
  CHECK(s.grid_x == 10);
  CHECK(s.trials == 25);
  CHECK(format_config(apply_scale(c, 1.0)) == format_config(c));
  CHECK_THROWS(apply_scale(c, 0.0));
}

TEST_CASE("CSV") {
  SUBCASE("empty record list gives a header-only file") {
    CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");
    std::istringstream in(to_csv({}));
    CHECK(read_csv(in).empty());
  }
  SUBCASE("round trip keeps full precision") {
    std::vector<ResultRecord> records{
        {"fim", "uplink_snr_db", -7.5, 3, 0xFFFFFFFFFFFFFFFFULL, "nmse_db", -12.345678901234567, 1.0 / 3.0, 7, 0.0},
        {"upa", "paths", 2, 0, 1, "snr_db", std::nextafter(10.0, 11.0), 1e-300, 0, 12.5}};
    std::istringstream in(to_csv(records));
    CHECK(read_csv(in) == records);
  }
  SUBCASE("malformed input") {
    std::istringstream wrong_header("a,b,c\n");
    CHECK_THROWS(read_csv(wrong_header));
    std::istringstream short_row(std::string(kCsvHeader) + "\nfim,x,1\n");
    CHECK_THROWS(read_csv(short_row));
    CHECK_THROWS_WITH(emit_csv({}, "/nonexistent-dir/out.csv"), doctest::Contains("/nonexistent-dir/out.csv"));
  }
  SUBCASE("file output") {
    const auto path = std::filesystem::temp_directory_path() / "fim_test_harness.csv";
    std::vector<ResultRecord> records{{"fim", "slots", 4, 1, 9, "nmse_db", -3.0, 2.0, 1, 0.0}};
    emit_csv(records, path);
    CHECK(read_csv(path) == records);
    std::filesystem::remove(path);
  }
}

TEST_CASE("snapping moves paths onto valid grid directions") {
  auto grid = build_grid(6, 6);
  auto r1 = make_rng(1), r2 = make_rng(2);
  auto paths = sample_paths(50, 1.0, r1, r2);
  auto snapped = snap_to_grid(paths, grid);
  for (std::size_t l = 0; l < paths.size(); ++l) {
    CHECK(snapped.paths[l].gain == paths.paths[l].gain);
    auto w = PlaneWave::from_path(snapped.paths[l]);
    bool on_grid = false;
    for (const auto& p : grid.points())
      on_grid |= p.valid && std::abs(p.phi_x - w.ux) < 1e-12 && std::abs(p.phi_z - w.uz) < 1e-12 &&
                 std::abs(p.phi_y - w.uy) < 1e-12;
    CHECK(on_grid);
  }
}

TEST_CASE("uplink experiment") {
  auto c = small_config();
  c.sweep_values = {0.0, 10.0};

  SUBCASE("record layout") {
    auto records = run_uplink_experiment(c);
    REQUIRE(records.size() == 2 * 2 * c.trials);
    CHECK(records.front().scheme == "fim");
    CHECK(records.back().scheme == "upa");
    for (const auto& r : records) {
      CHECK(r.metric_name == "nmse_db");
      CHECK(r.sweep_name == "uplink_snr_db");
      CHECK(r.wall_ms == 0.0);
      CHECK(std::isfinite(r.metric_value));
    }
  }
  SUBCASE("repeatable") {
    ShapeCache cache;
    CHECK(to_csv(run_uplink_experiment(c, &cache)) == to_csv(run_uplink_experiment(c)));
    CHECK(cache.size() == 1);
    auto other = c;
    other.seed = 18;
    CHECK(to_csv(run_uplink_experiment(other)) != to_csv(run_uplink_experiment(c)));
  }
  SUBCASE("rigid bound reproduces the UPA") {
    c.bound_wavelengths = 0.0;
    auto records = run_uplink_experiment(c);
    const std::size_t half = records.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      auto fim_record = records[i];
      fim_record.scheme = "upa";
      CHECK(fim_record == records[half + i]);
    }
  }
  SUBCASE("noiseless on-grid paths are recovered") {
    c.sweep_values = {250.0};
    c.paths = 2;
    // A 4x4 grid matches the resolution of a flat 4x4 array: orthogonal columns.
    c.n_x = c.n_z = 4;
    c.grid_x = c.grid_z = 4;
    for (const auto& r : run_uplink_experiment(c)) CHECK(r.metric_value < -80.0);
  }
  SUBCASE("timing is opt in") {
    c.record_timing = true;
    c.trials = 2;
    c.schemes = SchemeSelection::upa;
    for (const auto& r : run_uplink_experiment(c)) CHECK(r.wall_ms > 0.0);
  }
}

TEST_CASE("downlink experiment") {
  auto c = small_config();
  c.sweep_values = {10.0};
  auto records = run_downlink_experiment(c);
  REQUIRE(records.size() == 3 * c.trials);
  std::map<std::string, std::vector<double>> by_scheme;
  for (const auto& r : records) by_scheme[r.scheme].push_back(r.metric_value);
  REQUIRE(by_scheme.size() == 3);
  for (std::size_t t = 0; t < c.trials; ++t) CHECK(by_scheme["fim-perfect"][t] >= by_scheme["upa"][t] - 1e-9);

  c.schemes = SchemeSelection::upa;
  auto upa_only = run_downlink_experiment(c);
  CHECK(upa_only.size() == c.trials);
}

TEST_CASE("convergence experiment") {
  auto c = small_config();
  c.trials = 2;
  c.sweep = SweepVariable::bound_wavelengths;
  c.sweep_values = {0.5, 1.0};
  auto records = run_convergence_experiment(c);
  REQUIRE(!records.empty());
  CHECK(records.front().iters == 0);
  const auto geometry = build_upa(3, 3, c.wavelength() / 2, c.wavelength() / 2, c.wavelength());
  const auto grid = build_grid(6, 6);
  const CoherenceProblem problem(geometry, grid, c.slots);
  const auto start = random_point(problem.dimension(), BoxBounds::symmetric(0.5 * c.wavelength()), records.front().seed);
  CHECK(records.front().metric_value == doctest::Approx(problem.value(start)).epsilon(1e-12));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    if (a.sweep_value == b.sweep_value && a.trial == b.trial) {
      CHECK(b.iters == a.iters + 1);
      CHECK(b.metric_value <= a.metric_value);
    }
  }
}

TEST_CASE("summaries") {
  std::vector<ResultRecord> records{
      {"fim", "s", 1, 0, 0, "nmse_db", -10, 0, 0, 0}, {"fim", "s", 1, 1, 0, "nmse_db", -20, 0, 0, 0},
      {"fim", "s", 2, 0, 0, "nmse_db", 0, 0, 0, 0},   {"upa", "s", 1, 0, 0, "coherence", 4, 0, 0, 0},
      {"upa", "s", 1, 1, 0, "coherence", 6, 0, 0, 0},
  };
  auto s = summarize(records);
  REQUIRE(s.size() == 3);
  CHECK(s[0].count == 2);
  CHECK(s[0].mean_linear == doctest::Approx(0.055));
  CHECK(s[0].mean_db == doctest::Approx(10 * std::log10(0.055)));
  CHECK(s[0].stderr_linear == doctest::Approx(std::abs(0.1 - 0.01) / 2));
  CHECK(s[1].count == 1);
  CHECK(s[1].stderr_linear == 0.0);
  CHECK(s[2].metric_name == "coherence");
  CHECK(s[2].mean_linear == doctest::Approx(5.0));
}
