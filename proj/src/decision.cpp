#include "cwsradar/decision.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace cwsradar {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Mass of [a, b] under the standard normal, accurate in both tails.
double gauss_interval(double a, double b) {
  if (!(b > a)) return 0.0;
  if (a >= 0.0) return 0.5 * (std::erfc(a / std::sqrt(2.0)) - std::erfc(b / std::sqrt(2.0)));
  return normal_cdf(b) - normal_cdf(a);
}

// Smallest d_hat > 0 with T_G(d_hat, v_hat) >= lambda. T_G increases with
// d_hat: elliptic below d_hat = k v_hat (v_hat > 0), linear above.
double glrt_crossing(double v_hat, double lambda, const ErrorModel& em) {
  const double tau0 = em.tau0();
  if (v_hat <= 0.0) return std::max(0.0, lambda - tau0 * v_hat);
  const double sv2 = em.velocity_var();
  const double k = em.range_var() / (sv2 * tau0);
  const double sz = em.sigma_z();
  if (lambda <= sz * v_hat / std::sqrt(sv2)) return 0.0;
  if (lambda <= (k + tau0) * v_hat)
    return std::sqrt(em.range_var() * std::max(0.0, lambda * lambda / (sz * sz) - v_hat * v_hat / sv2));
  return lambda - tau0 * v_hat;
}

// v_hat cells of equal width on [lo, hi] with exact N(v, sv^2) masses; the
// d_hat direction is integrated in closed form by `row`.
template <class Row>
double integrate_rows(double lo, double hi, int cells, double v, double sv, Row row) {
  const double h = (hi - lo) / cells;
  double total = 0.0;
  double prev = normal_cdf((lo - v) / sv);
  for (int j = 0; j < cells; ++j) {
    const double next = normal_cdf((lo + (j + 1) * h - v) / sv);
    const double mass = next - prev;
    prev = next;
    if (mass > 0.0) total += mass * row(lo + (j + 0.5) * h);
  }
  return total;
}

double pw_glrt_rows(double d, double v, double lambda, const ErrorModel& em, int nodes,
                    double half_width) {
  const double sd = std::sqrt(em.range_var());
  const double sv = std::sqrt(em.velocity_var());
  const bool threat = true_hypothesis(d, v, em.tau0()) == Hypothesis::Threat;
  const double inf = std::numeric_limits<double>::infinity();
  return integrate_rows(v - half_width * sv, v + half_width * sv, nodes, v, sv, [&](double v_hat) {
    // d_hat <= 0 is scored with the linear statistic: Threat below a
    const double a = lambda - em.tau0() * v_hat;
    const double c = glrt_crossing(v_hat, lambda, em);
    const double x0 = -d / sd, xa = (a - d) / sd, xc = (c - d) / sd;
    if (threat)  // wrong = decided Safe: [a, 0] and [c, inf)
      return gauss_interval(xa, x0) + gauss_interval(xc, inf);
    return gauss_interval(-inf, std::min(x0, xa)) + gauss_interval(x0, xc);
  });
}

}  // namespace

ErrorModel::ErrorModel(double range_var, double velocity_var, double tau0)
    : range_var_(range_var), velocity_var_(velocity_var), tau0_(tau0) {
  if (!(range_var > 0.0)) throw InvalidArgument("ErrorModel: range variance must be positive");
  if (!(velocity_var > 0.0))
    throw InvalidArgument("ErrorModel: velocity variance must be positive");
  if (!(tau0 > 0.0)) throw InvalidArgument("ErrorModel: tau0 must be positive");
}

double ErrorModel::sigma_z() const { return std::sqrt(sigma_z2()); }

Hypothesis true_hypothesis(double d, double v, double tau0) {
  return d + tau0 * v < 0.0 ? Hypothesis::Threat : Hypothesis::Safe;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

GlrtBranch glrt_branch(double d_hat, double v_hat, const ErrorModel& em) {
  const double slope = em.range_var() / (em.velocity_var() * em.tau0());
  return d_hat >= slope * v_hat ? GlrtBranch::Linear : GlrtBranch::Elliptic;
}

GlrtDistances glrt_distances(double d_hat, double v_hat, const ErrorModel& em) {
  const double z = statistic_approx(d_hat, v_hat, em.tau0());
  const double sz = em.sigma_z();
  GlrtDistances s{};
  if (z < 0.0) {
    s.safe = -z / sz;
    s.threat = 0.0;
  } else {
    s.safe = 0.0;
    s.threat = glrt_branch(d_hat, v_hat, em) == GlrtBranch::Linear
                   ? z / sz
                   : std::sqrt(d_hat * d_hat / em.range_var() + v_hat * v_hat / em.velocity_var());
  }
  return s;
}

double statistic_glrt_branches(double d_hat, double v_hat, const ErrorModel& em) {
  if (glrt_branch(d_hat, v_hat, em) == GlrtBranch::Linear)
    return statistic_approx(d_hat, v_hat, em.tau0());
  return em.sigma_z() *
         std::sqrt(d_hat * d_hat / em.range_var() + v_hat * v_hat / em.velocity_var());
}

double statistic_glrt(double d_hat, double v_hat, const ErrorModel& em) {
  if (!(d_hat > 0.0)) throw DomainError("statistic_glrt: estimate outside model domain (d_hat <= 0)");
  const auto s = glrt_distances(d_hat, v_hat, em);
  const double log_lr = -(s.threat - s.safe) / 2.0;
  const double t = -2.0 * em.sigma_z() * log_lr;
  assert(std::abs(t - statistic_glrt_branches(d_hat, v_hat, em)) <=
         1e-9 * std::max(1.0, std::abs(t)));
  return t;
}

double pw_approx(double d, double v, double lambda, const ErrorModel& em) {
  const double z = d + em.tau0() * v;
  const double x = (z - lambda) / em.sigma_z();
  return z >= 0.0 ? q_function(x) : q_function(-x);
}

double pw_glrt_numeric(double d, double v, double lambda, const ErrorModel& em,
                       const GlrtQuadrature& quad) {
  if (quad.nodes < 3) throw InvalidArgument("pw_glrt_numeric: need at least 3 nodes per axis");
  const double coarse = pw_glrt_rows(d, v, lambda, em, quad.nodes, quad.half_width_sigmas);
  if (!quad.check_refinement) return coarse;
  const double fine = pw_glrt_rows(d, v, lambda, em, 2 * quad.nodes - 1, quad.half_width_sigmas);
  if (std::abs(fine - coarse) > quad.refinement_tolerance)
    throw ConvergenceError("pw_glrt_numeric: refinement changed Pw by " +
                           std::to_string(std::abs(fine - coarse)));
  return fine;
}

double rule_disagreement_probability(double d, double v, double lambda, const ErrorModel& em,
                                     int nodes) {
  if (!(lambda > 0.0)) return 0.0;
  const double sd = std::sqrt(em.range_var());
  const double sv = std::sqrt(em.velocity_var());
  constexpr double kFar = 9.0;
  if (d - lambda > kFar * sd || -d > kFar * sd || v - lambda / em.tau0() > kFar * sv ||
      -v > kFar * sv)
    return 0.0;
  // the two rules differ only for 0 < v_hat < lambda / tau0, on d_hat in [crossing, a)
  const double lo = std::max(0.0, v - kFar * sv);
  const double hi = std::min(lambda / em.tau0(), v + kFar * sv);
  if (!(hi > lo)) return 0.0;
  return integrate_rows(lo, hi, nodes, v, sv, [&](double v_hat) {
    const double a = lambda - em.tau0() * v_hat;
    const double c = glrt_crossing(v_hat, lambda, em);
    return gauss_interval((c - d) / sd, (a - d) / sd);
  });
}

}  // namespace cwsradar
