#include "cwsradar/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "cwsradar/crlb.hpp"
#include "cwsradar/decision.hpp"
#include "cwsradar/radar_model.hpp"
#include "cwsradar/rng.hpp"

namespace cwsradar {

namespace {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int workers = std::min<int>(resolve_threads(threads), static_cast<int>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      (void)w;
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Frequency-domain tolerance that stays well below the estimator spread.
double refinement_tolerance(double gamma, int n, int m) {
  const double sd = std::sqrt(3.0 / (2.0 * kPi * kPi * gamma)) / std::max(n, m);
  return std::min(1e-6, 1e-3 * sd);
}

struct Node {
  double d;
  double v;
  double weight;  // quadrature weight
  bool threat;
};

std::vector<Node> build_nodes(const LossScenario& sc, const SimulationSettings& sim,
                              double sigma_z) {
  const auto& dom = sc.domain;
  const double tau0 = sc.tau0;
  const double z_lo = std::max(dom.d_min + tau0 * dom.v_min, -sim.z_span_sigmas * sigma_z);
  const double z_hi = std::min(dom.d_max + tau0 * dom.v_max, sim.z_span_sigmas * sigma_z);
  const int per_side = std::max(1, sim.grid_z / 2);

  std::vector<std::pair<double, double>> z_nodes;
  if (z_lo < 0.0)
    for (const auto& q : gauss_legendre(per_side, z_lo, 0.0)) z_nodes.push_back(q);
  if (z_hi > 0.0)
    for (const auto& q : gauss_legendre(per_side, 0.0, z_hi)) z_nodes.push_back(q);

  std::vector<Node> nodes;
  for (const auto& [z, wz] : z_nodes) {
    const double v_lo = std::max(dom.v_min, (z - dom.d_max) / tau0);
    const double v_hi = std::min(dom.v_max, (z - dom.d_min) / tau0);
    if (!(v_hi > v_lo)) continue;
    for (const auto& [v, wv] : gauss_legendre(sim.grid_v, v_lo, v_hi)) {
      const double d = z - tau0 * v;
      nodes.push_back({d, v, wz * wv, z < 0.0});
    }
  }
  return nodes;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

MonteCarloRun monte_carlo_mtwdl(const LossScenario& sc, const SimulationSettings& sim,
                                double bandwidth, double duration, double gamma,
                                std::uint64_t seed) {
  sc.domain.validate();
  if (sc.pwdls.empty()) throw InvalidArgument("monte_carlo_mtwdl: no loss function given");
  if (!(bandwidth > 0 && duration > 0 && gamma > 0))
    throw InvalidArgument("monte_carlo_mtwdl: W, T and gamma must be positive");
  if (sim.trials < 2 || sim.bootstrap < 2 || sim.lambda_nodes < 3)
    throw InvalidArgument("monte_carlo_mtwdl: trials, bootstrap and lambda grid too small");
  const double c = sim.speed_of_light;
  const int m = std::max(1, static_cast<int>(std::lround(duration / sim.chirp_interval)));
  const WaveformParams wp(sc.f0, bandwidth, sim.chirp_interval, m, sim.sample_rate);
  const double t_sim = wp.duration();

  const auto bounds = crlb_range_velocity(gamma, bandwidth, t_sim, sc.f0, c);
  const double sigma_z = std::sqrt(error_index(bounds.range_var, bounds.velocity_var, sc.tau0));
  const auto nodes = build_nodes(sc, sim, sigma_z);
  const double alpha = reflectivity_for_snr(gamma, sim.amplitude, t_sim, sim.noise_psd);

  MleOptions opts;
  opts.tolerance = refinement_tolerance(gamma, wp.samples_per_chirp(), m);
  opts.speed_of_light = c;

  std::vector<std::vector<double>> stats(nodes.size());
  std::vector<long> failures(nodes.size(), 0);
  parallel_for(nodes.size(), sim.threads, [&](std::size_t i) {
    const Node& nd = nodes[i];
    Scene scene{{Scatterer{nd.d, nd.v, alpha}}, sim.noise_psd, sim.amplitude};
    MleOptions o = opts;
    o.hint = RangeVelocity{nd.d, nd.v};
    const std::uint64_t node_seed = split_seed(seed, i);
    auto& out = stats[i];
    out.reserve(sim.trials);
    for (int t = 0; t < sim.trials; ++t) {
      try {
        const auto grid = synthesize_if_samples(scene, wp, split_seed(node_seed, t), c);
        const auto est = mle_estimate(grid, 1, o);
        out.push_back(statistic_approx(est[0].range, est[0].velocity, sc.tau0));
      } catch (const DomainError&) {
        ++failures[i];
      }
    }
    std::sort(out.begin(), out.end());
  });

  MonteCarloRun run{};
  run.sigma_z = sigma_z;
  run.chirp_count = m;
  run.simulated_duration = t_sim;
  run.trials = static_cast<long>(nodes.size()) * sim.trials;
  for (long f : failures) run.failures += f;
  if (static_cast<double>(run.failures) > sim.max_failure_rate * run.trials)
    throw ConvergenceError("monte_carlo_mtwdl: MLE failure rate " +
                           std::to_string(static_cast<double>(run.failures) / run.trials) +
                           " exceeds limit");

  std::vector<double> lambdas(sim.lambda_nodes);
  for (int l = 0; l < sim.lambda_nodes; ++l)
    lambdas[l] = sigma_z * sim.lambda_span_sigmas * (2.0 * l / (sim.lambda_nodes - 1) - 1.0);

  // rank[i][l] = number of node-i statistics strictly below lambda_l
  std::vector<std::vector<int>> rank(nodes.size(), std::vector<int>(lambdas.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t l = 0; l < lambdas.size(); ++l)
      rank[i][l] = static_cast<int>(
          std::lower_bound(stats[i].begin(), stats[i].end(), lambdas[l]) - stats[i].begin());

  const std::size_t np = sc.pwdls.size();
  std::vector<std::vector<double>> weight(np, std::vector<double>(nodes.size()));
  for (std::size_t k = 0; k < np; ++k)
    for (std::size_t i = 0; i < nodes.size(); ++i)
      weight[k][i] = nodes[i].weight * pwdl_eval(sc.pwdls[k], nodes[i].d, nodes[i].v, sc.tau0);

  // Minimum over lambda of every loss curve; below(i, l) counts node-i
  // statistics under lambda_l out of stats[i].size().
  const auto curve_min = [&](const auto& below, std::vector<double>* arg) {
    std::vector<double> best(np, std::numeric_limits<double>::infinity());
    std::vector<double> pw(nodes.size());
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double n = static_cast<double>(stats[i].size());
        const double b = n == 0 ? 0.0 : below(i, l);
        pw[i] = n == 0 ? 0.0 : (nodes[i].threat ? (n - b) / n : b / n);
      }
      for (std::size_t k = 0; k < np; ++k) {
        double u = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) u += weight[k][i] * pw[i];
        if (u < best[k]) {
          best[k] = u;
          if (arg) (*arg)[k] = lambdas[l];
        }
      }
    }
    return best;
  };

  std::vector<double> arg(np, 0.0);
  const auto value =
      curve_min([&](std::size_t i, std::size_t l) { return double(rank[i][l]); }, &arg);

  const ErrorModel em(bounds.range_var, bounds.velocity_var, sc.tau0);
  std::vector<double> grid_theory(np, std::numeric_limits<double>::infinity());
  for (double l : lambdas) {
    std::vector<double> pw(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pw[i] = pw_approx(nodes[i].d, nodes[i].v, l, em);
    for (std::size_t k = 0; k < np; ++k) {
      double u = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) u += weight[k][i] * pw[i];
      grid_theory[k] = std::min(grid_theory[k], u);
    }
  }

  std::vector<std::vector<double>> boot(sim.bootstrap);
  parallel_for(boot.size(), sim.threads, [&](std::size_t b) {
    std::mt19937_64 rng(split_seed(seed ^ 0xB0075742A9ULL, b));
    std::vector<std::vector<int>> cum(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::size_t n = stats[i].size();
      if (n == 0) continue;
      std::vector<int> hist(n + 1, 0);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t t = 0; t < n; ++t) ++hist[pick(rng) + 1];
      for (std::size_t k = 1; k <= n; ++k) hist[k] += hist[k - 1];
      cum[i] = std::move(hist);
    }
    boot[b] = curve_min(
        [&](std::size_t i, std::size_t l) { return double(cum[i][rank[i][l]]); }, nullptr);
  });

  for (std::size_t k = 0; k < np; ++k) {
    std::vector<double> bk(boot.size());
    for (std::size_t b = 0; b < boot.size(); ++b) bk[b] = boot[b][k];
    run.per_pwdl.push_back({value[k], std::sqrt(mean_variance(bk).variance), arg[k], grid_theory[k]});
  }
  return run;
}

CrlbCheckResult crlb_check(const CrlbCheckSettings& s, std::uint64_t seed) {
  if (s.trials < 100) throw InvalidArgument("crlb_check: need at least 100 trials");
  const double t0 = s.n / s.sample_rate;
  const WaveformParams wp(s.f0, s.bandwidth, t0, s.m, s.sample_rate);
  const double gamma = db_to_linear(s.gamma_db);
  const double amplitude = 1.0, n0 = 1e-4;
  const double alpha = reflectivity_for_snr(gamma, amplitude, wp.duration(), n0);
  const Scene scene{{Scatterer{s.range, s.velocity, alpha}}, n0, amplitude};

  MleOptions opts;
  opts.tolerance = refinement_tolerance(gamma, s.n, s.m);
  opts.speed_of_light = s.speed_of_light;
  opts.hint = RangeVelocity{s.range, s.velocity};

  std::vector<double> ed(s.trials, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> ev(s.trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<std::size_t>(s.trials), s.threads, [&](std::size_t t) {
    try {
      const auto grid = synthesize_if_samples(scene, wp, split_seed(seed, t), s.speed_of_light);
      const auto est = mle_estimate(grid, 1, opts);
      ed[t] = est[0].range - s.range;
      ev[t] = est[0].velocity - s.velocity;
    } catch (const DomainError&) {
    }
  });

  CrlbCheckResult r{};
  for (std::size_t t = 0; t < ed.size(); ++t) {
    if (std::isnan(ed[t])) {
      ++r.failures;
      continue;
    }
    r.range_errors.push_back(ed[t]);
    r.velocity_errors.push_back(ev[t]);
  }
  const auto b = crlb_range_velocity(gamma, s.bandwidth, wp.duration(), s.f0, s.speed_of_light);
  r.range_bound = b.range_var;
  r.velocity_bound = b.velocity_var;
  r.range_error = mean_variance(r.range_errors);
  r.velocity_error = mean_variance(r.velocity_errors);
  r.range_ks = ks_gaussianity_check(r.range_errors, b.range_var);
  r.velocity_ks = ks_gaussianity_check(r.velocity_errors, b.velocity_var);
  return r;
}

}  // namespace cwsradar
