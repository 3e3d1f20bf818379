#include "cwsradar/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace cwsradar {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) +
                        "' must be an object");
  }

  double number(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_number()) throw ConfigError("field '" + full(key) + "' must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + full(key) + "' must be an integer");
    return v.get<int>();
  }

  std::uint64_t u64(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_number_unsigned())
      throw ConfigError("field '" + full(key) + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_string()) throw ConfigError("field '" + full(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_array()) throw ConfigError("field '" + full(key) + "' must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError("field '" + full(key) + "[" + std::to_string(i) + "]' must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    const auto& v = field(key);
    if (!v.is_array()) throw ConfigError("field '" + full(key) + "' must be an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer())
        throw ConfigError("field '" + full(key) + "[" + std::to_string(i) +
                          "]' must be an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  Reader object(const std::string& key) { return Reader(field(key), full(key)); }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError("unknown field '" + full(item.key()) + "'");
  }

 private:
  const json& field(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError("missing required field '" + full(key) + "'");
    used_.insert(key);
    return j_.at(key);
  }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  return out;
}

}  // namespace

std::vector<PwdlSpec> ExperimentConfig::pwdls() const {
  std::vector<PwdlSpec> out;
  for (int id : pwdl_ids) out.push_back(standard_pwdl(id));
  return out;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.scenario = "evaluation-defaults";
  c.seed = 20240917;
  c.output = "";
  c.speed_of_light = kRoundedSpeedOfLight;
  c.carrier_hz = 24e9;
  c.tau0_s = 4.0;
  c.domain = evaluation_domain();
  c.pwdl_ids = {1, 2, 3, 4};
  c.conventional = {0.5, 0.6};
  c.w_max_hz = 500e6;
  c.t_max_s = 0.05;
  c.snr_db = 20.0;
  for (int db = 5; db <= 25; ++db) c.snr_grid_db.push_back(db);
  c.tbp_grid = log_grid(1e6, 1e7, 21);
  c.error_sweep = {50e6, 1e9, 201};
  c.rule_compare = {3.0, 61, 64, 81};
  c.quadrature = QuadratureSpec{};
  c.monte_carlo = SimulationSettings{};
  c.monte_carlo.speed_of_light = c.speed_of_light;
  c.mc_tbp_points = {1e6, 3.125e6, 1e7};
  c.mc_snr_points_db = {10.0, 15.0, 20.0};
  c.crlb_check = CrlbCheckSettings{};
  c.crlb_check.f0 = c.carrier_hz;
  c.crlb_check.speed_of_light = c.speed_of_light;
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["physics"] = {{"speed_of_light", c.speed_of_light},
                  {"carrier_hz", c.carrier_hz},
                  {"tau0_s", c.tau0_s}};
  j["domain"] = {{"d_min", c.domain.d_min},
                 {"d_max", c.domain.d_max},
                 {"v_min", c.domain.v_min},
                 {"v_max", c.domain.v_max}};
  j["pwdl_ids"] = c.pwdl_ids;
  j["conventional"] = {{"delta_d", c.conventional.delta_d}, {"delta_v", c.conventional.delta_v}};
  j["limits"] = {{"w_max_hz", c.w_max_hz}, {"t_max_s", c.t_max_s}};
  j["snr_db"] = c.snr_db;
  j["snr_grid_db"] = c.snr_grid_db;
  j["tbp_grid"] = c.tbp_grid;
  j["error_sweep"] = {{"w_min_hz", c.error_sweep.w_min_hz},
                      {"w_max_hz", c.error_sweep.w_max_hz},
                      {"points", c.error_sweep.points}};
  j["rule_compare"] = {{"lambda_span_sigmas", c.rule_compare.lambda_span_sigmas},
                       {"lambda_nodes", c.rule_compare.lambda_nodes},
                       {"local_nodes", c.rule_compare.local_nodes},
                       {"box_nodes", c.rule_compare.box_nodes}};
  j["quadrature"] = {{"nd", c.quadrature.nd}, {"nv", c.quadrature.nv}};
  const auto& m = c.monte_carlo;
  j["monte_carlo"] = {{"sample_rate_hz", m.sample_rate},
                      {"chirp_interval_s", m.chirp_interval},
                      {"amplitude", m.amplitude},
                      {"noise_psd", m.noise_psd},
                      {"grid_z", m.grid_z},
                      {"grid_v", m.grid_v},
                      {"z_span_sigmas", m.z_span_sigmas},
                      {"trials", m.trials},
                      {"bootstrap", m.bootstrap},
                      {"lambda_nodes", m.lambda_nodes},
                      {"lambda_span_sigmas", m.lambda_span_sigmas},
                      {"max_failure_rate", m.max_failure_rate},
                      {"threads", m.threads},
                      {"tbp_points", c.mc_tbp_points},
                      {"snr_points_db", c.mc_snr_points_db}};
  const auto& k = c.crlb_check;
  j["crlb_check"] = {{"n", k.n},
                     {"m", k.m},
                     {"sample_rate_hz", k.sample_rate},
                     {"bandwidth_hz", k.bandwidth},
                     {"range_m", k.range},
                     {"velocity_mps", k.velocity},
                     {"snr_db", k.gamma_db},
                     {"trials", k.trials}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  c.scenario = r.string("scenario");
  c.seed = r.u64("seed");
  c.output = r.string("output");
  {
    auto p = r.object("physics");
    c.speed_of_light = p.number("speed_of_light");
    c.carrier_hz = p.number("carrier_hz");
    c.tau0_s = p.number("tau0_s");
    p.finish();
  }
  {
    auto d = r.object("domain");
    c.domain = {d.number("d_min"), d.number("d_max"), d.number("v_min"), d.number("v_max")};
    d.finish();
  }
  c.pwdl_ids = r.integers("pwdl_ids");
  {
    auto s = r.object("conventional");
    c.conventional = {s.number("delta_d"), s.number("delta_v")};
    s.finish();
  }
  {
    auto s = r.object("limits");
    c.w_max_hz = s.number("w_max_hz");
    c.t_max_s = s.number("t_max_s");
    s.finish();
  }
  c.snr_db = r.number("snr_db");
  c.snr_grid_db = r.numbers("snr_grid_db");
  c.tbp_grid = r.numbers("tbp_grid");
  {
    auto s = r.object("error_sweep");
    c.error_sweep = {s.number("w_min_hz"), s.number("w_max_hz"), s.integer("points")};
    s.finish();
  }
  {
    auto s = r.object("rule_compare");
    c.rule_compare = {s.number("lambda_span_sigmas"), s.integer("lambda_nodes"),
                      s.integer("local_nodes"), s.integer("box_nodes")};
    s.finish();
  }
  {
    auto s = r.object("quadrature");
    c.quadrature.nd = s.integer("nd");
    c.quadrature.nv = s.integer("nv");
    s.finish();
  }
  {
    auto s = r.object("monte_carlo");
    auto& m = c.monte_carlo;
    m.sample_rate = s.number("sample_rate_hz");
    m.chirp_interval = s.number("chirp_interval_s");
    m.amplitude = s.number("amplitude");
    m.noise_psd = s.number("noise_psd");
    m.grid_z = s.integer("grid_z");
    m.grid_v = s.integer("grid_v");
    m.z_span_sigmas = s.number("z_span_sigmas");
    m.trials = s.integer("trials");
    m.bootstrap = s.integer("bootstrap");
    m.lambda_nodes = s.integer("lambda_nodes");
    m.lambda_span_sigmas = s.number("lambda_span_sigmas");
    m.max_failure_rate = s.number("max_failure_rate");
    m.threads = s.integer("threads");
    m.speed_of_light = c.speed_of_light;
    c.mc_tbp_points = s.numbers("tbp_points");
    c.mc_snr_points_db = s.numbers("snr_points_db");
    s.finish();
  }
  {
    auto s = r.object("crlb_check");
    auto& k = c.crlb_check;
    k.n = s.integer("n");
    k.m = s.integer("m");
    k.sample_rate = s.number("sample_rate_hz");
    k.bandwidth = s.number("bandwidth_hz");
    k.range = s.number("range_m");
    k.velocity = s.number("velocity_mps");
    k.gamma_db = s.number("snr_db");
    k.trials = s.integer("trials");
    k.f0 = c.carrier_hz;
    k.speed_of_light = c.speed_of_light;
    k.threads = c.monte_carlo.threads;
    s.finish();
  }
  r.finish();
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const auto positive = [](double x, const char* path) {
    if (!(x > 0.0)) throw ConfigError(std::string("field '") + path + "' must be positive");
  };
  positive(c.speed_of_light, "physics.speed_of_light");
  positive(c.carrier_hz, "physics.carrier_hz");
  positive(c.tau0_s, "physics.tau0_s");
  positive(c.conventional.delta_d, "conventional.delta_d");
  positive(c.conventional.delta_v, "conventional.delta_v");
  positive(c.w_max_hz, "limits.w_max_hz");
  positive(c.t_max_s, "limits.t_max_s");
  try {
    c.domain.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("field 'domain': ") + e.what());
  }
  if (c.pwdl_ids.empty()) throw ConfigError("field 'pwdl_ids' must not be empty");
  for (std::size_t i = 0; i < c.pwdl_ids.size(); ++i) {
    const int id = c.pwdl_ids[i];
    if (id < 1 || id > 4)
      throw ConfigError("field 'pwdl_ids[" + std::to_string(i) + "]': unknown PWDL id " +
                        std::to_string(id) + " (valid ids: 1, 2, 3, 4)");
  }
  if (c.snr_grid_db.empty()) throw ConfigError("field 'snr_grid_db' must not be empty");
  if (c.tbp_grid.empty()) throw ConfigError("field 'tbp_grid' must not be empty");
  for (double s : c.tbp_grid) positive(s, "tbp_grid[]");
  if (c.error_sweep.points < 2) throw ConfigError("field 'error_sweep.points' must be >= 2");
  positive(c.error_sweep.w_min_hz, "error_sweep.w_min_hz");
  if (!(c.error_sweep.w_max_hz > c.error_sweep.w_min_hz))
    throw ConfigError("field 'error_sweep.w_max_hz' must exceed error_sweep.w_min_hz");
  if (c.rule_compare.lambda_nodes < 3)
    throw ConfigError("field 'rule_compare.lambda_nodes' must be >= 3");
  if (c.rule_compare.local_nodes < 4 || c.rule_compare.box_nodes < 4)
    throw ConfigError("fields 'rule_compare.local_nodes' and 'rule_compare.box_nodes' must be >= 4");
  positive(c.rule_compare.lambda_span_sigmas, "rule_compare.lambda_span_sigmas");
  if (c.quadrature.nd < 16 || c.quadrature.nv < 16)
    throw ConfigError("field 'quadrature' needs nd, nv >= 16");
  const auto& m = c.monte_carlo;
  if (m.trials < 100) throw ConfigError("field 'monte_carlo.trials' must be >= 100");
  if (m.bootstrap < 2) throw ConfigError("field 'monte_carlo.bootstrap' must be >= 2");
  if (m.grid_z < 2 || m.grid_v < 1) throw ConfigError("field 'monte_carlo.grid_z/grid_v' too small");
  if (m.lambda_nodes < 3) throw ConfigError("field 'monte_carlo.lambda_nodes' must be >= 3");
  positive(m.sample_rate, "monte_carlo.sample_rate_hz");
  positive(m.chirp_interval, "monte_carlo.chirp_interval_s");
  positive(m.amplitude, "monte_carlo.amplitude");
  positive(m.noise_psd, "monte_carlo.noise_psd");
  positive(m.z_span_sigmas, "monte_carlo.z_span_sigmas");
  positive(m.lambda_span_sigmas, "monte_carlo.lambda_span_sigmas");
  if (m.threads < 0) throw ConfigError("field 'monte_carlo.threads' must be >= 0");
  const double n = m.sample_rate * m.chirp_interval;
  if (std::abs(n - std::round(n)) > 1e-9 * n || std::round(n) < 1)
    throw ConfigError("fields 'monte_carlo.sample_rate_hz' x 'monte_carlo.chirp_interval_s' must be a positive integer");
  for (double s : c.mc_tbp_points) positive(s, "monte_carlo.tbp_points[]");
  if (c.crlb_check.trials < 100) throw ConfigError("field 'crlb_check.trials' must be >= 100");
  if (c.crlb_check.n < 2 || c.crlb_check.m < 2)
    throw ConfigError("fields 'crlb_check.n' and 'crlb_check.m' must be >= 2");
  positive(c.crlb_check.sample_rate, "crlb_check.sample_rate_hz");
  positive(c.crlb_check.bandwidth, "crlb_check.bandwidth_hz");
  positive(c.crlb_check.range, "crlb_check.range_m");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cwsradar
