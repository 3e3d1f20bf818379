// Command-line front end: one subcommand per experiment table.

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "cwsradar/experiments.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cwsradar;
  CLI::App app{"Collision-warning FMCW radar waveform design and loss experiments"};
  app.require_subcommand(0, 1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, quadrature;
  bool no_mc = false, no_timestamp = false, print_config = false;
  app.add_flag("--print-default-config", print_config, "Print the built-in config as JSON and exit");

  using Runner = std::function<ResultTable(const ExperimentConfig&)>;
  const std::map<std::string, std::pair<std::string, Runner>> commands = {
      {"design", {"Optimized and conventional waveforms with the comparison ratios", run_design}},
      {"error-sweep", {"Error index versus bandwidth at fixed TBP", run_error_index_sweep}},
      {"rule-compare", {"Normalized TWDL versus threshold for both decision rules",
                        run_rule_comparison}},
      {"mtwdl-tbp", {"Minimal TWDL versus TBP, theory and Monte Carlo",
                     [&](const ExperimentConfig& c) { return run_mtwdl_vs_tbp(c, !no_mc); }}},
      {"mtwdl-snr", {"Minimal TWDL versus SNR, theory and Monte Carlo",
                     [&](const ExperimentConfig& c) { return run_mtwdl_vs_snr(c, !no_mc); }}},
      {"ks-check", {"MLE error variances against the CRLB with KS Gaussianity tests",
                    run_ks_check}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "JSON config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out", out_path, "Output CSV path (stdout when omitted)");
    sub->add_option("--trials", trials, "Monte Carlo trials per grid point / CRLB check trials")
        ->check(CLI::PositiveNumber);
    sub->add_option("--quadrature", quadrature, "TWDL quadrature cells per axis")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp metadata line");
    if (name == "mtwdl-tbp" || name == "mtwdl-snr")
      sub->add_flag("--theory-only", no_mc, "Skip the Monte Carlo points");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (print_config) {
      std::cout << config_to_json(default_config()).dump(2) << '\n';
      return 0;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
      std::cerr << app.help();
      return 2;
    }
    ExperimentConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) {
      cfg.monte_carlo.trials = *trials;
      cfg.crlb_check.trials = *trials;
    }
    if (quadrature) cfg.quadrature.nd = cfg.quadrature.nv = *quadrature;
    validate_config(cfg);

    ResultTable table = commands.at(subs.front()->get_name()).second(cfg);
    if (!no_timestamp) table.note("timestamp", utc_timestamp());
    const std::string& dest = out_path.empty() ? cfg.output : out_path;
    if (dest.empty())
      emit_table(table, std::cout);
    else
      emit_table(table, dest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
