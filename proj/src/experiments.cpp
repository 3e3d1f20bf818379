#include "cwsradar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cwsradar/crlb.hpp"
#include "cwsradar/rng.hpp"

namespace cwsradar {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double theory_mtwdl(const ExperimentConfig& cfg, double sigma_z, const PwdlSpec& pwdl) {
  return mtwdl(sigma_z, pwdl, cfg.domain, cfg.tau0_s, cfg.quadrature).value;
}

// Illinois false position on a decreasing/increasing f with f(a), f(b) of
// opposite sign. The bracket is widened to the left if needed.
double find_root(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  for (int widen = 0; fa * fb > 0.0 && widen < 8; ++widen) {
    const double w = b - a;
    b = a;
    fb = fa;
    a -= w;
    fa = f(a);
  }
  if (fa * fb > 0.0) throw ConvergenceError("find_root: no sign change in bracket");
  int side = 0;
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if (fc * fb < 0.0) {
      a = b;
      fa = fb;
      side = 0;
    } else if (side == -1) {
      fa /= 2.0;
    }
    if (fc * fb >= 0.0 && side != -1) side = -1;
    b = c;
    fb = fc;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string series_name(const std::string& kind, const std::string& design, int pwdl_id) {
  return kind + "/" + design + "/pwdl" + std::to_string(pwdl_id);
}

ResultTable make_table(const ExperimentConfig& cfg) {
  ResultTable t;
  t.config_hash = config_hash(cfg);
  t.seed = cfg.seed;
  t.note("scenario", cfg.scenario);
  t.note("config", config_to_json(cfg).dump());
  return t;
}

DesignPair design_pair(const ExperimentConfig& cfg, double gamma, double tbp) {
  const double c = cfg.speed_of_light;
  DesignPair p{};
  p.conventional = conventional_design(cfg.conventional, cfg.carrier_hz, c);
  p.tbp = tbp > 0.0 ? tbp : p.conventional.tbp;
  const DesignConstraints dc{cfg.w_max_hz, cfg.t_max_s, p.tbp, cfg.carrier_hz, cfg.tau0_s, gamma};
  p.optimized = optimize_waveform(dc, c);
  p.conventional_sigma_z2 =
      conventional_error_index(gamma, cfg.carrier_hz, cfg.tau0_s, cfg.conventional, c);
  return p;
}

ErrorModel error_model_for(const ExperimentConfig& cfg, double bandwidth, double duration,
                           double gamma) {
  const auto b = crlb_range_velocity(gamma, bandwidth, duration, cfg.carrier_hz, cfg.speed_of_light);
  return ErrorModel(b.range_var, b.velocity_var, cfg.tau0_s);
}

ResultTable run_design(const ExperimentConfig& cfg) {
  const double gamma = db_to_linear(cfg.snr_db);
  const auto p = design_pair(cfg, gamma);
  const double rho = design_ratio(cfg.tau0_s, cfg.conventional);
  ResultTable t = make_table(cfg);
  const double x = p.tbp;
  t.add(x, "optimized/bandwidth_hz", p.optimized.bandwidth);
  t.add(x, "optimized/duration_s", p.optimized.duration);
  t.add(x, "optimized/error_index_m2", p.optimized.sigma_z2);
  t.add(x, "conventional/bandwidth_hz", p.conventional.bandwidth);
  t.add(x, "conventional/duration_s", p.conventional.duration);
  t.add(x, "conventional/tbp", p.conventional.tbp);
  t.add(x, "conventional/error_index_m2", p.conventional_sigma_z2);
  t.add(x, "ratio/rho", rho);
  t.add(x, "ratio/error_index_gap_db", -linear_to_db(rho));
  t.add(x, "ratio/tbp_factor", rho);
  t.add(x, "ratio/snr_saving_db", -linear_to_db(rho));
  t.add(x, "ratio/coexisting_radar_factor", 1.0 / rho);
  const char* regime[] = {"interior", "clamped_w", "clamped_t"};
  t.note("optimized_regime", regime[static_cast<int>(p.optimized.regime)]);
  return t;
}

ResultTable run_error_index_sweep(const ExperimentConfig& cfg) {
  const double gamma = db_to_linear(cfg.snr_db);
  const auto p = design_pair(cfg, gamma);
  const double s = p.tbp;
  const auto& es = cfg.error_sweep;
  ResultTable t = make_table(cfg);
  double best_w = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.points; ++i) {
    const double w = std::pow(
        10.0, std::log10(es.w_min_hz) +
                  (std::log10(es.w_max_hz) - std::log10(es.w_min_hz)) * i / (es.points - 1));
    const double e =
        error_index_objective(w, s / w, cfg.carrier_hz, cfg.tau0_s, gamma, cfg.speed_of_light);
    t.add(w, "error_index", e);
    if (e < best) {
      best = e;
      best_w = w;
    }
  }
  t.add(p.conventional.bandwidth, "conventional", p.conventional_sigma_z2);
  t.add(p.optimized.bandwidth, "optimized", p.optimized.sigma_z2);
  t.note("tbp", num(s));
  t.note("curve_min_bandwidth_hz", num(best_w));
  t.note("gap_db", num(linear_to_db(p.conventional_sigma_z2 / p.optimized.sigma_z2)));
  return t;
}

RuleCurves rule_comparison_curves(const ExperimentConfig& cfg, const ErrorModel& em) {
  const auto pwdls = cfg.pwdls();
  const auto& rc = cfg.rule_compare;
  const auto& dom = cfg.domain;
  const double tau0 = cfg.tau0_s;
  const double sz = em.sigma_z();
  const double sd = std::sqrt(em.range_var()), sv = std::sqrt(em.velocity_var());
  constexpr double kReach = 9.0;

  RuleCurves out;
  out.approx.assign(pwdls.size(), {});
  out.glrt.assign(pwdls.size(), {});
  for (int l = 0; l < rc.lambda_nodes; ++l) {
    const double lambda = sz * rc.lambda_span_sigmas * (2.0 * l / (rc.lambda_nodes - 1) - 1.0);
    out.lambdas.push_back(lambda);
    std::vector<double> corr(pwdls.size(), 0.0);
    if (lambda > 0.0) {
      const double d_lo = dom.d_min, d_hi = std::min(dom.d_max, lambda + kReach * sd);
      const double v_lo = std::max(dom.v_min, -kReach * sv);
      const double v_hi = std::min(dom.v_max, lambda / tau0 + kReach * sv);
      if (d_hi > d_lo && v_hi > v_lo) {
        const int n = rc.local_nodes;
        const double hd = (d_hi - d_lo) / n, hv = (v_hi - v_lo) / n;
        for (int j = 0; j < n; ++j) {
          const double v = v_lo + (j + 0.5) * hv;
          const double d_split = -tau0 * v;
          for (int i = 0; i < n; ++i) {
            const double a = d_lo + i * hd, b = d_lo + (i + 1) * hd;
            const auto piece = [&](double lo, double hi) {
              const double d = 0.5 * (lo + hi);
              const double p = rule_disagreement_probability(d, v, lambda, em, rc.box_nodes);
              if (p == 0.0) return;
              const double sign = true_hypothesis(d, v, tau0) == Hypothesis::Threat ? 1.0 : -1.0;
              for (std::size_t k = 0; k < pwdls.size(); ++k)
                corr[k] += sign * pwdl_eval(pwdls[k], d, v, tau0) * p * (hi - lo) * hv;
            };
            if (d_split > a && d_split < b) {
              piece(a, d_split);
              piece(d_split, b);
            } else {
              piece(a, b);
            }
          }
        }
      }
    }
    for (std::size_t k = 0; k < pwdls.size(); ++k) {
      const double ua = twdl(lambda, sz, pwdls[k], dom, tau0, cfg.quadrature);
      out.approx[k].push_back(ua);
      out.glrt[k].push_back(ua + corr[k]);
    }
  }
  return out;
}

ResultTable run_rule_comparison(const ExperimentConfig& cfg) {
  const double gamma = db_to_linear(cfg.snr_db);
  const auto p = design_pair(cfg, gamma);
  ResultTable t = make_table(cfg);
  const std::pair<const char*, std::pair<double, double>> designs[] = {
      {"optimized", {p.optimized.bandwidth, p.optimized.duration}},
      {"conventional", {p.conventional.bandwidth, p.conventional.duration}}};
  for (const auto& [name, wt] : designs) {
    const auto em = error_model_for(cfg, wt.first, wt.second, gamma);
    const auto curves = rule_comparison_curves(cfg, em);
    t.note(std::string("sigma_z.") + name, num(em.sigma_z()));
    for (std::size_t k = 0; k < cfg.pwdl_ids.size(); ++k) {
      const double norm = *std::min_element(curves.glrt[k].begin(), curves.glrt[k].end());
      double worst = 0.0;
      for (std::size_t l = 0; l < curves.lambdas.size(); ++l) {
        const double g = curves.glrt[k][l] / norm, a = curves.approx[k][l] / norm;
        t.add(curves.lambdas[l], series_name("glrt", name, cfg.pwdl_ids[k]), g);
        t.add(curves.lambdas[l], series_name("approx", name, cfg.pwdl_ids[k]), a);
        worst = std::max(worst, std::abs(g - a));
      }
      t.note("max_discrepancy." + std::string(name) + ".pwdl" + std::to_string(cfg.pwdl_ids[k]),
             num(worst));
    }
  }
  return t;
}

MonteCarloRun monte_carlo_mtwdl(const ExperimentConfig& cfg, double bandwidth, double duration,
                                double gamma, std::uint64_t seed) {
  const LossScenario sc{cfg.carrier_hz, cfg.tau0_s, cfg.domain, cfg.pwdls()};
  return monte_carlo_mtwdl(sc, cfg.monte_carlo, bandwidth, duration, gamma, seed);
}

double matched_tbp_offset(const ExperimentConfig& cfg, const PwdlSpec& pwdl) {
  const double gamma = db_to_linear(cfg.snr_db);
  const auto ref = design_pair(cfg, gamma);
  const double target = theory_mtwdl(cfg, std::sqrt(ref.conventional_sigma_z2), pwdl);
  const double log_con = std::log10(ref.conventional.tbp);
  const auto f = [&](double log_s) {
    const auto p = design_pair(cfg, gamma, std::pow(10.0, log_s));
    return theory_mtwdl(cfg, std::sqrt(p.optimized.sigma_z2), pwdl) - target;
  };
  return log_con - find_root(f, log_con - 1.0, log_con, 1e-7);
}

double matched_snr_offset(const ExperimentConfig& cfg, const PwdlSpec& pwdl) {
  const double ref_db = cfg.snr_db;
  const auto ref = design_pair(cfg, db_to_linear(ref_db));
  const double target = theory_mtwdl(cfg, std::sqrt(ref.conventional_sigma_z2), pwdl);
  const auto f = [&](double db) {
    const auto p = design_pair(cfg, db_to_linear(db), ref.tbp);
    return theory_mtwdl(cfg, std::sqrt(p.optimized.sigma_z2), pwdl) - target;
  };
  return ref_db - find_root(f, ref_db - 10.0, ref_db, 1e-6);
}

namespace {

void add_monte_carlo(ResultTable& t, const ExperimentConfig& cfg, double x, const char* design,
                     double w, double tt, double gamma, std::uint64_t seed) {
  const auto run = monte_carlo_mtwdl(cfg, w, tt, gamma, seed);
  const auto pwdls = cfg.pwdls();
  for (std::size_t k = 0; k < pwdls.size(); ++k) {
    const auto& r = run.per_pwdl[k];
    t.add(x, series_name("mc", design, cfg.pwdl_ids[k]), r.value, r.standard_error);
    t.add(x, series_name("theory_sim", design, cfg.pwdl_ids[k]),
          theory_mtwdl(cfg, run.sigma_z, pwdls[k]));
  }
  t.note(std::string("mc.") + design + "@" + num(x),
         "chirps=" + std::to_string(run.chirp_count) + " simulated_duration_s=" +
             num(run.simulated_duration) + " design_duration_s=" + num(tt) +
             " trials=" + std::to_string(run.trials) + " failures=" + std::to_string(run.failures));
}

}  // namespace

ResultTable run_mtwdl_vs_tbp(const ExperimentConfig& cfg, bool with_monte_carlo) {
  const double gamma = db_to_linear(cfg.snr_db);
  const auto pwdls = cfg.pwdls();
  ResultTable t = make_table(cfg);
  for (double s : cfg.tbp_grid) {
    const auto p = design_pair(cfg, gamma, s);
    for (std::size_t k = 0; k < pwdls.size(); ++k)
      t.add(s, series_name("theory", "optimized", cfg.pwdl_ids[k]),
            theory_mtwdl(cfg, std::sqrt(p.optimized.sigma_z2), pwdls[k]));
  }
  const auto ref = design_pair(cfg, gamma);
  for (std::size_t k = 0; k < pwdls.size(); ++k) {
    t.add(ref.conventional.tbp, series_name("theory", "conventional", cfg.pwdl_ids[k]),
          theory_mtwdl(cfg, std::sqrt(ref.conventional_sigma_z2), pwdls[k]));
    t.add(ref.conventional.tbp, "offset_log10_tbp/pwdl" + std::to_string(cfg.pwdl_ids[k]),
          matched_tbp_offset(cfg, pwdls[k]));
  }
  if (with_monte_carlo) {
    for (std::size_t i = 0; i < cfg.mc_tbp_points.size(); ++i) {
      const auto p = design_pair(cfg, gamma, cfg.mc_tbp_points[i]);
      add_monte_carlo(t, cfg, p.tbp, "optimized", p.optimized.bandwidth, p.optimized.duration,
                      gamma, split_seed(cfg.seed, 100 + i));
    }
    add_monte_carlo(t, cfg, ref.conventional.tbp, "conventional", ref.conventional.bandwidth,
                    ref.conventional.duration, gamma, split_seed(cfg.seed, 199));
  }
  return t;
}

ResultTable run_mtwdl_vs_snr(const ExperimentConfig& cfg, bool with_monte_carlo) {
  const auto pwdls = cfg.pwdls();
  ResultTable t = make_table(cfg);
  for (double db : cfg.snr_grid_db) {
    const auto p = design_pair(cfg, db_to_linear(db));
    for (std::size_t k = 0; k < pwdls.size(); ++k) {
      t.add(db, series_name("theory", "optimized", cfg.pwdl_ids[k]),
            theory_mtwdl(cfg, std::sqrt(p.optimized.sigma_z2), pwdls[k]));
      t.add(db, series_name("theory", "conventional", cfg.pwdl_ids[k]),
            theory_mtwdl(cfg, std::sqrt(p.conventional_sigma_z2), pwdls[k]));
    }
  }
  for (std::size_t k = 0; k < pwdls.size(); ++k)
    t.add(cfg.snr_db, "offset_snr_db/pwdl" + std::to_string(cfg.pwdl_ids[k]),
          matched_snr_offset(cfg, pwdls[k]));
  if (with_monte_carlo) {
    for (std::size_t i = 0; i < cfg.mc_snr_points_db.size(); ++i) {
      const double db = cfg.mc_snr_points_db[i];
      const double gamma = db_to_linear(db);
      const auto p = design_pair(cfg, gamma);
      add_monte_carlo(t, cfg, db, "optimized", p.optimized.bandwidth, p.optimized.duration, gamma,
                      split_seed(cfg.seed, 200 + i));
      add_monte_carlo(t, cfg, db, "conventional", p.conventional.bandwidth,
                      p.conventional.duration, gamma, split_seed(cfg.seed, 300 + i));
    }
  }
  return t;
}

ResultTable run_ks_check(const ExperimentConfig& cfg) {
  const auto r = crlb_check(cfg.crlb_check, split_seed(cfg.seed, 400));
  ResultTable t = make_table(cfg);
  const double x = cfg.crlb_check.gamma_db;
  const double n = static_cast<double>(r.range_errors.size());
  const auto add = [&](const char* name, const MeanVar& mv, double bound, const KsResult& ks) {
    const std::string s(name);
    t.add(x, s + "/sample_variance", mv.variance, mv.variance * std::sqrt(2.0 / (n - 1.0)));
    t.add(x, s + "/crlb", bound);
    t.add(x, s + "/mean_error", mv.mean, std::sqrt(mv.variance / n));
    t.note(s + ".ks_statistic", num(ks.statistic));
    t.note(s + ".ks_critical", num(1.358 / std::sqrt(n)));
    t.note(s + ".ks_reject", ks.reject ? "true" : "false");
  };
  add("range", r.range_error, r.range_bound, r.range_ks);
  add("velocity", r.velocity_error, r.velocity_bound, r.velocity_ks);
  t.note("failures", std::to_string(r.failures));
  return t;
}

}  // namespace cwsradar
