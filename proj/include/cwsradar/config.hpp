#pragma once

// Experiment configuration: JSON schema, built-in evaluation defaults and the
// stable hash recorded in every output table.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwsradar/designer.hpp"
#include "cwsradar/monte_carlo.hpp"
#include "cwsradar/twdl.hpp"

namespace cwsradar {

struct ErrorSweepSettings {
  double w_min_hz;
  double w_max_hz;
  int points;
};

struct RuleCompareSettings {
  double lambda_span_sigmas;  // lambda in [-span, span] sigma_Z
  int lambda_nodes;
  int local_nodes;  // per axis, grid of true (d, v) where the two rules can differ
  int box_nodes;    // per axis, disagreement-region quadrature
};

struct ExperimentConfig {
  std::string scenario;
  std::uint64_t seed;
  std::string output;  // empty = stdout

  double speed_of_light;
  double carrier_hz;
  double tau0_s;
  DomainRect domain;
  std::vector<int> pwdl_ids;
  ConventionalSpec conventional;
  double w_max_hz;
  double t_max_s;

  double snr_db;                    // reference SNR
  std::vector<double> snr_grid_db;  // theory abscissae, SNR sweep
  std::vector<double> tbp_grid;     // theory abscissae, TBP sweep

  ErrorSweepSettings error_sweep;
  RuleCompareSettings rule_compare;
  QuadratureSpec quadrature;
  SimulationSettings monte_carlo;
  std::vector<double> mc_tbp_points;
  std::vector<double> mc_snr_points_db;
  CrlbCheckSettings crlb_check;

  std::vector<PwdlSpec> pwdls() const;
};

/// The evaluation settings: 24 GHz carrier, tau0 = 4 s, 0.5 m / 0.6 m/s
/// resolutions, d in [0.1, 100] m, v in [-30, 30] m/s, losses 1-4, c = 3e8.
ExperimentConfig default_config();

nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Every field is required; unknown fields are rejected. Errors are
/// ConfigError with the offending field path (e.g. "monte_carlo.trials").
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);

/// Checks cross-field invariants (non-empty grids, trials >= 100, PWDL ids).
void validate_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace cwsradar
