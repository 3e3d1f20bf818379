#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cwsradar/experiments.hpp"

using namespace cwsradar;

namespace {

std::string emit(const ResultTable& t) {
  std::ostringstream out;
  emit_table(t, out);
  return out.str();
}

std::vector<ResultRow> series(const ResultTable& t, const std::string& name) {
  auto rows = t.series(name);
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.x < b.x; });
  return rows;
}

}  // namespace

TEST_CASE("default config survives a JSON round trip") {
  const auto cfg = default_config();
  CHECK_NOTHROW(validate_config(cfg));
  const auto j = config_to_json(cfg);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  CHECK(back.carrier_hz == 24e9);
  CHECK(back.tau0_s == 4.0);
  CHECK(back.speed_of_light == 3e8);
}

TEST_CASE("shipped default config file matches the built-in defaults") {
  std::ifstream f(CWSRADAR_SOURCE_DIR "/configs/default.json");
  REQUIRE(f);
  const auto j = nlohmann::json::parse(f);
  CHECK(j == config_to_json(default_config()));
  CHECK(config_hash(load_config(CWSRADAR_SOURCE_DIR "/configs/default.json")) == config_hash(default_config()));
}

TEST_CASE("config schema violations name the field") {
  auto j = config_to_json(default_config());
  j["monte_carlo"].erase("trials");
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("monte_carlo.trials"), ConfigError);
  j = config_to_json(default_config());
  j["physics"]["colour"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("physics.colour"), ConfigError);
  j = config_to_json(default_config());
  j["pwdl_ids"] = {1, 7};
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("1, 2, 3, 4"), ConfigError);
  j = config_to_json(default_config());
  j["monte_carlo"]["trials"] = 50;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(default_config());
  j["tbp_grid"] = nlohmann::json::array();
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = config_to_json(default_config());
  j["snr_db"] = "twenty";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("snr_db"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config hash changes with any setting") {
  auto a = default_config();
  auto b = a;
  b.monte_carlo.trials += 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("CSV emit and parse round trip") {
  ResultTable t;
  t.config_hash = "00ff00ff00ff00ff";
  t.seed = 18446744073709551615ull;
  t.note("config", "{\"a\":[1,2]}");
  t.add(0.1, "theory/optimized/pwdl1", 1.0 / 3.0);
  t.add(1e-300, "mc/optimized/pwdl1", -2.5e10, 0.125);
  t.add(3.0, "x", 0.0);
  const auto text = emit(t);
  CHECK(text.rfind("# config_hash=00ff00ff00ff00ff\n# seed=18446744073709551615\n", 0) == 0);
  CHECK(text.find("x,series,value,stderr\n") != std::string::npos);
  CHECK(text.find("3,x,0,\n") != std::string::npos);
  std::istringstream in(text);
  const auto back = parse_table(in);
  CHECK(back.config_hash == t.config_hash);
  CHECK(back.seed == t.seed);
  CHECK(back.rows == t.rows);
  CHECK(back.meta("config") == t.meta("config"));
}

TEST_CASE("CSV rejects duplicate rows and separators") {
  ResultTable t;
  t.add(1.0, "a", 1.0);
  t.add(1.0, "a", 2.0);
  CHECK_THROWS(emit(t));
  ResultTable u;
  u.add(1.0, "a,b", 1.0);
  CHECK_THROWS(emit(u));
  std::istringstream bad("x,y\n1,2\n");
  CHECK_THROWS(parse_table(bad));
}

TEST_CASE("design table") {
  const auto cfg = default_config();
  const auto t = run_design(cfg);
  CHECK(t.config_hash == config_hash(cfg));
  CHECK(t.seed == cfg.seed);
  CHECK(series(t, "optimized/bandwidth_hz")[0].value == doctest::Approx(137e6).epsilon(0.5 / 137));
  CHECK(series(t, "conventional/tbp")[0].value == 3.125e6);
  CHECK(series(t, "ratio/error_index_gap_db")[0].value == doctest::Approx(4.0).epsilon(0.05 / 4));
  CHECK(series(t, "ratio/rho")[0].value == doctest::Approx(0.399).epsilon(0.001 / 0.399));
  for (const auto& r : t.rows) CHECK_FALSE(r.standard_error.has_value());
  CHECK(emit(t) == emit(run_design(cfg)));
}

TEST_CASE("error index sweep") {
  const auto cfg = default_config();
  const auto t = run_error_index_sweep(cfg);
  const auto curve = series(t, "error_index");
  CHECK(curve.size() == 201);
  const auto con = series(t, "conventional")[0];
  const auto opt = series(t, "optimized")[0];
  const double s = 3.125e6;
  CHECK(con.value == doctest::Approx(error_index_objective(con.x, s / con.x, 24e9, 4.0, 100.0, 3e8)).epsilon(1e-12));
  const auto best = *std::min_element(curve.begin(), curve.end(), [](auto& a, auto& b) { return a.value < b.value; });
  const double step = std::log(1e9 / 50e6) / 200;
  CHECK(std::abs(std::log(best.x / opt.x)) <= step);
  CHECK(10 * std::log10(con.value / opt.value) == doctest::Approx(4.0).epsilon(0.05 / 4));
  for (const auto& r : curve) CHECK(r.value >= opt.value * (1 - 1e-12));
}

TEST_CASE("rule comparison curves") {
  auto cfg = default_config();
  cfg.quadrature.nd = cfg.quadrature.nv = 200;
  cfg.rule_compare.lambda_nodes = 31;
  const auto t = run_rule_comparison(cfg);
  for (const char* design : {"optimized", "conventional"})
    for (int id = 1; id <= 4; ++id) {
      const auto g = series(t, series_name("glrt", design, id));
      const auto a = series(t, series_name("approx", design, id));
      REQUIRE(g.size() == 31);
      double mn = 1e300;
      int minima = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        mn = std::min(mn, g[i].value);
        CHECK(std::abs(g[i].value - a[i].value) < 0.02);
        if (i > 0 && i + 1 < g.size() && g[i].value < g[i - 1].value && g[i].value < g[i + 1].value) ++minima;
      }
      CHECK(mn == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(minima == 1);
    }
}

TEST_CASE("theoretical sweeps and offsets") {
  const auto cfg = default_config();
  const auto tbp = run_mtwdl_vs_tbp(cfg, false);
  const auto snr = run_mtwdl_vs_snr(cfg, false);
  for (int id = 1; id <= 4; ++id) {
    const auto opt = series(tbp, series_name("theory", "optimized", id));
    for (std::size_t i = 1; i < opt.size(); ++i) CHECK(opt[i].value < opt[i - 1].value);
    CHECK(series(tbp, "offset_log10_tbp/pwdl" + std::to_string(id))[0].value == doctest::Approx(0.40).epsilon(0.02 / 0.4));
    const auto so = series(snr, series_name("theory", "optimized", id));
    const auto sc = series(snr, series_name("theory", "conventional", id));
    REQUIRE(so.size() == sc.size());
    for (std::size_t i = 0; i < so.size(); ++i) CHECK(so[i].value <= sc[i].value);
    CHECK(series(snr, "offset_snr_db/pwdl" + std::to_string(id))[0].value == doctest::Approx(4.0).epsilon(0.1 / 4));
  }
  for (const auto& r : tbp.rows) CHECK_FALSE(r.standard_error.has_value());
  auto small = cfg;
  small.snr_grid_db = {10.0, 15.0, 20.0};
  CHECK(emit(run_mtwdl_vs_snr(small, false)) == emit(run_mtwdl_vs_snr(small, false)));
}

TEST_CASE("Monte Carlo rows carry standard errors") {
  auto cfg = default_config();
  cfg.monte_carlo.grid_z = 4;
  cfg.monte_carlo.grid_v = 2;
  cfg.monte_carlo.trials = 100;
  cfg.monte_carlo.bootstrap = 20;
  cfg.mc_snr_points_db = {20.0};
  cfg.snr_grid_db = {20.0};
  const auto t = run_mtwdl_vs_snr(cfg, true);
  int mc = 0;
  for (const auto& r : t.rows) {
    const bool is_mc = r.series.rfind("mc/", 0) == 0;
    CHECK(r.standard_error.has_value() == is_mc);
    mc += is_mc;
  }
  CHECK(mc == 8);
  CHECK(emit(t) == emit(run_mtwdl_vs_snr(cfg, true)));
}
