#pragma once

// Table-producing experiment drivers shared by the CLI, the acceptance
// binary and the Python module.

#include <cstdint>
#include <string>
#include <vector>

#include "cwsradar/config.hpp"
#include "cwsradar/decision.hpp"
#include "cwsradar/result_table.hpp"

namespace cwsradar {

/// Empty table stamped with the config hash, the seed and a config echo.
ResultTable make_table(const ExperimentConfig& cfg);

struct DesignPair {
  double tbp;  // S of the optimized design
  DesignResult optimized;
  ConventionalDesign conventional;
  double conventional_sigma_z2;
};

/// Optimized design at TBP `tbp` (or S_con when tbp <= 0) next to the
/// conventional design, both at SNR gamma.
DesignPair design_pair(const ExperimentConfig& cfg, double gamma, double tbp = 0.0);

/// Error model (large-M bounds) for waveform (W, T) at SNR gamma.
ErrorModel error_model_for(const ExperimentConfig& cfg, double bandwidth, double duration,
                           double gamma);

ResultTable run_design(const ExperimentConfig& cfg);
ResultTable run_error_index_sweep(const ExperimentConfig& cfg);

/// Loss-vs-threshold curves of both rules for one error model.
struct RuleCurves {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> approx;  // [pwdl][lambda]
  std::vector<std::vector<double>> glrt;    // [pwdl][lambda]
};

/// The GLRT curve is the approximate-rule curve plus the signed loss mass of
/// the disagreement region {T_A < lambda <= T_G}, integrated over the true
/// (d, v) near the domain corner where that region has support.
RuleCurves rule_comparison_curves(const ExperimentConfig& cfg, const ErrorModel& em);

ResultTable run_rule_comparison(const ExperimentConfig& cfg);

/// Monte Carlo of every configured loss at (W, T, gamma).
MonteCarloRun monte_carlo_mtwdl(const ExperimentConfig& cfg, double bandwidth, double duration,
                                double gamma, std::uint64_t seed);

/// log10 S_con - log10 S* where the optimized design at S* matches the
/// conventional design's minimal loss at the reference SNR.
double matched_tbp_offset(const ExperimentConfig& cfg, const PwdlSpec& pwdl);

/// Reference SNR minus the SNR at which the optimized design (S = S_con)
/// matches the conventional design's minimal loss at the reference SNR, in dB.
double matched_snr_offset(const ExperimentConfig& cfg, const PwdlSpec& pwdl);

ResultTable run_mtwdl_vs_tbp(const ExperimentConfig& cfg, bool with_monte_carlo = true);
ResultTable run_mtwdl_vs_snr(const ExperimentConfig& cfg, bool with_monte_carlo = true);

ResultTable run_ks_check(const ExperimentConfig& cfg);

/// Series label helpers, e.g. series_name("theory", "optimized", 1) = "theory/optimized/pwdl1".
std::string series_name(const std::string& kind, const std::string& design, int pwdl_id);

}  // namespace cwsradar
