#pragma once

// Simulation side of the evaluation: MLE error statistics for a single
// scatterer and Monte Carlo estimates of the minimal wrong-decision loss.

#include <cstdint>
#include <string>
#include <vector>

#include "cwsradar/common.hpp"
#include "cwsradar/stats.hpp"
#include "cwsradar/twdl.hpp"

namespace cwsradar {

/// Discretization and sizing of the Monte Carlo loss estimate.
struct SimulationSettings {
  double sample_rate = 160e3;     // fs, Hz
  double chirp_interval = 200e-6; // T0, s; N = fs T0 = 32, M = round(T / T0)
  double amplitude = 1.0;         // A
  double noise_psd = 1e-4;        // N0, W/Hz
  int grid_z = 30;                // Gauss-Legendre nodes across Z = d + tau0 v (half per side)
  int grid_v = 30;                // Gauss-Legendre nodes along v for every Z node
  double z_span_sigmas = 13.0;    // Z nodes cover |Z| <= z_span * sigma_Z
  int trials = 1000;              // per (d, v) node
  int bootstrap = 200;
  int lambda_nodes = 201;
  double lambda_span_sigmas = 5.0;  // lambda grid covers +-span * sigma_Z
  double max_failure_rate = 0.01;
  int threads = 0;                // 0 = hardware concurrency
  double speed_of_light = kSpeedOfLight;
};

struct LossScenario {
  double f0;
  double tau0;
  DomainRect domain;
  std::vector<PwdlSpec> pwdls;  // every loss is scored on the same simulated estimates
};

struct MonteCarloResult {
  double value;           // minimal simulated loss over the lambda grid
  double standard_error;  // bootstrap, of `value`
  double lambda;          // minimizing threshold
  double grid_theory;     // same node set and lambda grid with the Gaussian Pw
};

struct MonteCarloRun {
  std::vector<MonteCarloResult> per_pwdl;  // same order as LossScenario::pwdls
  double sigma_z;                          // theoretical sigma_Z at the simulated duration
  int chirp_count;                         // M
  double simulated_duration;               // M T0
  long trials;
  long failures;
};

/// Simulates synthesize -> mle_estimate -> d_hat + tau0 v_hat on every node of
/// a (Z, v) Gauss-Legendre grid over the domain; true (d, v) is handed to the
/// estimator as the alias-resolution hint. Throws ConvergenceError if more
/// than max_failure_rate of the estimates fail.
MonteCarloRun monte_carlo_mtwdl(const LossScenario& scenario, const SimulationSettings& sim,
                                double bandwidth, double duration, double gamma,
                                std::uint64_t seed);

struct CrlbCheckSettings {
  int n = 256;
  int m = 64;
  double sample_rate = 2e6;
  double bandwidth = 300e6;
  double f0 = 24e9;
  double range = 30.0;
  double velocity = -10.0;
  double gamma_db = 20.0;
  int trials = 10000;
  int threads = 0;
  double speed_of_light = kSpeedOfLight;
};

struct CrlbCheckResult {
  double range_bound;      // B_d
  double velocity_bound;   // B_v
  MeanVar range_error;
  MeanVar velocity_error;
  KsResult range_ks;
  KsResult velocity_ks;
  std::vector<double> range_errors;
  std::vector<double> velocity_errors;
  long failures;
};

CrlbCheckResult crlb_check(const CrlbCheckSettings& s, std::uint64_t seed);

/// Number of worker threads actually used for `requested` (0 = hardware).
int resolve_threads(int requested);

}  // namespace cwsradar
