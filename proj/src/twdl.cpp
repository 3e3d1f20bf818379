#include "cwsradar/twdl.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>
#include <string>

#include "cwsradar/decision.hpp"

namespace cwsradar {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kNegligible = 40.0;  // Q(40) underflows far below any loss resolution

// Neumaier compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double std_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

// Integral of Q over [a, b], arranged so the large terms never cancel.
double integral_q(double a, double b) {
  if (a + b >= 0.0) {
    const auto g = [](double x) { return x * q_function(x) - std_pdf(x); };
    return g(b) - g(a);
  }
  return (b - a) - integral_q(-b, -a);
}

// Phi(b) - Phi(a).
double phi_diff(double a, double b) {
  if (a > 0.0) return q_function(a) - q_function(b);
  return q_function(-b) - q_function(-a);
}

// Integral of y Q(y) over [a, b], with the same arrangement as integral_q.
double integral_yq(double a, double b) {
  if (a + b >= 0.0) {
    const auto g = [](double y) { return 0.5 * (y * y - 1.0) * q_function(y) - 0.5 * y * std_pdf(y); };
    return g(b) - g(a);
  }
  return 0.5 * (b * b - a * a) + integral_yq(-b, -a);
}

double miss_loss(const PwdlSpec& spec, double d, double v) {
  return spec.kind() == PwdlSpec::Kind::Constant ? spec.weight() : spec.weight() * (-v / d);
}

// Splits [lo, hi] into `cells` equal cells, additionally cut at every
// (ascending) break point, and calls f(a, b) on each piece in increasing order.
template <class F>
void for_each_cell(double lo, double hi, int cells, std::span<const double> breaks, F&& f) {
  const double h = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) {
    double a = lo + i * h;
    const double b = (i + 1 == cells) ? hi : lo + (i + 1) * h;
    for (double x : breaks) {
      if (x > a && x < b) {
        f(a, x);
        a = x;
      }
    }
    f(a, b);
  }
}

// Piece of a v-row in d, with x = (Z - lambda) / sigma at both ends.
struct Piece {
  bool safe;
  double lo, hi;  // d range
  double v;
  double hv;      // row weight
  double xa, xb;
};

constexpr double kGrading = 1.1;

// Row breaks: the lines Z = 0 and Z = lambda leave the domain through d_min
// and d_max at four values of v. Near each one the row integral changes on a
// sigma / tau0 scale, so rows there are graded down to sigma / (4 tau0).
std::vector<double> row_breaks(double lambda, double sigma, const DomainRect& dom, double tau0) {
  static constexpr double kOffsets[] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  std::vector<double> out;
  for (double d : {dom.d_min, dom.d_max}) {
    const double zero = -d / tau0;
    out.push_back(zero);
    for (double centre : {zero, (lambda - d) / tau0})
      for (double k : kOffsets)
        for (double s : {-1.0, 1.0}) out.push_back(centre + s * k * sigma / tau0);
  }
  std::erase_if(out, [&](double v) { return !(v > dom.v_min && v < dom.v_max); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Walks the rows of the scheme. Every row is cut at the boundary line
// d = -tau0 v, so each piece lies entirely on one side of it.
template <class Visit>
void for_each_piece(double lambda, double sigma, const DomainRect& dom, double tau0, int nd,
                    int nv, Visit&& visit) {
  const auto breaks = row_breaks(lambda, sigma, dom, tau0);
  // The TTC loss varies as 1/d; cells are graded geometrically until the
  // uniform cells are finer in ratio than the grading.
  std::vector<double> graded;
  const double hd = (dom.d_max - dom.d_min) / nd;
  const double graded_until = std::min(dom.d_max, hd / (kGrading - 1.0));
  for (double d = dom.d_min * kGrading; d < graded_until; d *= kGrading) graded.push_back(d);
  std::vector<double> d_breaks;
  // Three-point Gauss-Legendre across each row; the row integral is smooth
  // between breaks but curved near the corners.
  static constexpr double kNode = 0.7745966692414834;
  static constexpr double kGl[3][2] = {{-kNode, 5.0 / 18.0}, {0.0, 8.0 / 18.0}, {kNode, 5.0 / 18.0}};
  for_each_cell(dom.v_min, dom.v_max, nv, breaks, [&](double va, double vb) {
    for (const auto& [t, w] : kGl) {
      const double v = 0.5 * (va + vb) + 0.5 * (vb - va) * t;
      const double hv = (vb - va) * w;
      const double d_split = -tau0 * v;
      d_breaks = graded;
      d_breaks.insert(std::upper_bound(d_breaks.begin(), d_breaks.end(), d_split), d_split);
      for_each_cell(dom.d_min, dom.d_max, nd, d_breaks, [&](double lo, double hi) {
        const double xa = (lo + tau0 * v - lambda) / sigma;
        const double xb = (hi + tau0 * v - lambda) / sigma;
        const bool safe = lo >= d_split;
        if (safe ? xa > kNegligible : -xb > kNegligible) return;
        visit(Piece{safe, lo, hi, v, hv, xa, xb});
      });
    }
  });
}

// d of the piece point at normalized position x.
double d_at(const Piece& p, double x, double lambda, double sigma, double tau0) {
  return std::clamp(lambda - tau0 * p.v + sigma * x, p.lo, p.hi);
}

// Mean of 1/d over [lo, hi] divided by 1/midpoint: exact for a flat weight.
double inverse_d_correction(double lo, double hi) {
  const double r = (hi - lo) / (hi + lo);
  if (r < 1e-4) return 1.0 + r * r / 3.0;
  return std::atanh(r) / r;
}

double twdl_once(double lambda, double sigma, const PwdlSpec& spec, const DomainRect& dom,
                 double tau0, int nd, int nv) {
  Accumulator acc;
  for_each_piece(lambda, sigma, dom, tau0, nd, nv, [&](const Piece& p) {
    if (p.safe) {
      acc.add(sigma * integral_q(p.xa, p.xb) * p.hv);
      return;
    }
    // Miss side: Pw = Q(-x); the loss is taken at the Pw-weighted centroid.
    const double mass = integral_q(-p.xb, -p.xa);
    if (mass <= 0.0) return;
    double loss = miss_loss(spec, 0.5 * (p.lo + p.hi), p.v);
    if (spec.kind() == PwdlSpec::Kind::TtcDependent)
      loss = miss_loss(spec, d_at(p, -integral_yq(-p.xb, -p.xa) / mass, lambda, sigma, tau0), p.v) *
             inverse_d_correction(p.lo, p.hi);
    acc.add(loss * sigma * mass * p.hv);
  });
  return acc.value();
}

void check_common(double sigma_z, const DomainRect& dom, double tau0, const QuadratureSpec& quad) {
  if (!(sigma_z > 0.0)) throw InvalidArgument("twdl: sigma_Z must be positive");
  if (!(tau0 > 0.0)) throw InvalidArgument("twdl: tau0 must be positive");
  dom.validate();
  quad.validate();
}

}  // namespace

PwdlSpec PwdlSpec::constant(double u1) {
  if (!(u1 > 0.0)) throw InvalidArgument("PwdlSpec: u1 must be positive");
  return PwdlSpec(Kind::Constant, u1);
}

PwdlSpec PwdlSpec::ttc_dependent(double u2) {
  if (!(u2 > 0.0)) throw InvalidArgument("PwdlSpec: u2 must be positive");
  return PwdlSpec(Kind::TtcDependent, u2);
}

PwdlSpec standard_pwdl(int id) {
  switch (id) {
    case 1: return PwdlSpec::constant(5.0);
    case 2: return PwdlSpec::constant(10.0);
    case 3: return PwdlSpec::ttc_dependent(5.0);
    case 4: return PwdlSpec::ttc_dependent(10.0);
    default:
      throw InvalidArgument("unknown PWDL id " + std::to_string(id) + " (valid ids: 1, 2, 3, 4)");
  }
}

double pwdl_eval(const PwdlSpec& spec, double d, double v, double tau0) {
  if (true_hypothesis(d, v, tau0) == Hypothesis::Safe) return 1.0;
  return miss_loss(spec, d, v);
}

void DomainRect::validate() const {
  if (!(d_min > 0.0 && d_max > d_min))
    throw InvalidArgument("DomainRect: need 0 < d_min < d_max");
  if (!(v_max > v_min)) throw InvalidArgument("DomainRect: need v_min < v_max");
}

DomainRect evaluation_domain() { return {0.1, 100.0, -30.0, 30.0}; }

void QuadratureSpec::validate() const {
  if (nd < 16 || nv < 16) throw InvalidArgument("QuadratureSpec: need at least 16 nodes per axis");
}

double twdl(double lambda, double sigma_z, const PwdlSpec& spec, const DomainRect& dom,
            double tau0, const QuadratureSpec& quad) {
  check_common(sigma_z, dom, tau0, quad);
  const double coarse = twdl_once(lambda, sigma_z, spec, dom, tau0, quad.nd, quad.nv);
  if (!quad.check_refinement) return coarse;
  const double fine = twdl_once(lambda, sigma_z, spec, dom, tau0, 2 * quad.nd, 2 * quad.nv);
  const double scale = std::max(std::abs(fine), 1e-300);
  if (std::abs(fine - coarse) / scale > quad.refinement_tolerance)
    throw ConvergenceError("twdl: node doubling changed U by " +
                           std::to_string(std::abs(fine - coarse) / scale) + " relative");
  return fine;
}

TwdlPartials twdl_partials(double lambda, double sigma_z, const PwdlSpec& spec,
                           const DomainRect& dom, double tau0, const QuadratureSpec& quad) {
  check_common(sigma_z, dom, tau0, quad);
  const double s = sigma_z;
  // e0 = int exp(-(Z-l)^2/2s^2) dd, e1 = int exp(.)(Z-l) dd, |Z| term = e1 + l e0 signed
  Accumulator signed_e0, signed_e1, abs_z;
  for_each_piece(lambda, s, dom, tau0, quad.nd, quad.nv, [&](const Piece& p) {
    const double pd = phi_diff(p.xa, p.xb);
    const double e0 = s * kSqrt2Pi * pd;
    const double e1 = s * s * (std::exp(-0.5 * p.xa * p.xa) - std::exp(-0.5 * p.xb * p.xb));
    double loss = 1.0;
    if (!p.safe) {
      double d = 0.5 * (p.lo + p.hi);
      if (spec.kind() == PwdlSpec::Kind::TtcDependent && pd > 0.0)
        d = d_at(p, (std_pdf(p.xa) - std_pdf(p.xb)) / pd, lambda, s, tau0);
      loss = -miss_loss(spec, d, p.v);
      if (spec.kind() == PwdlSpec::Kind::TtcDependent) loss *= inverse_d_correction(p.lo, p.hi);
    }
    signed_e0.add(loss * e0 * p.hv);
    signed_e1.add(loss * e1 * p.hv);
    abs_z.add(loss * (e1 + lambda * e0) * p.hv);
  });
  TwdlPartials p{};
  p.d_lambda = signed_e0.value() / (kSqrt2Pi * s);
  p.d_sigma = signed_e1.value() / (kSqrt2Pi * s * s);
  p.d2_lambda = abs_z.value() / (kSqrt2Pi * s * s * s) - lambda / (s * s) * p.d_lambda;
  return p;
}

double optimal_threshold(double sigma_z, const PwdlSpec& spec, const DomainRect& dom, double tau0,
                         const QuadratureSpec& quad) {
  check_common(sigma_z, dom, tau0, quad);
  QuadratureSpec q = quad;
  q.check_refinement = false;
  // The bracket search runs on a quarter-resolution grid; Newton below
  // recovers the optimum of the full grid.
  const int cd = std::max(16, q.nd / 4), cv = std::max(16, q.nv / 4);
  const auto f = [&](double l) { return twdl_once(l, sigma_z, spec, dom, tau0, cd, cv); };

  const double lo0 = -20.0 * sigma_z, hi0 = 20.0 * sigma_z, tol = 1e-2 * sigma_z;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo0, b = hi0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  double best = f1 <= f2 ? x1 : x2;
  if (best - lo0 < 2.0 * tol || hi0 - best < 2.0 * tol)
    throw ConvergenceError("optimal_threshold: minimum at bracket endpoint");

  // Newton on dU/dlambda, kept inside the final golden bracket widened to
  // allow for the coarse-grid shift of the minimum.
  const double lo = a - 5.0 * tol, hi = b + 5.0 * tol;
  for (int it = 0; it < 8; ++it) {
    const auto p = twdl_partials(best, sigma_z, spec, dom, tau0, q);
    if (!(p.d2_lambda > 0.0)) break;
    const double next = best - p.d_lambda / p.d2_lambda;
    if (!(next > lo && next < hi)) break;
    const double step = std::abs(next - best);
    best = next;
    if (step < 1e-8 * sigma_z) break;
  }
  return best;
}

Mtwdl mtwdl(double sigma_z, const PwdlSpec& spec, const DomainRect& dom, double tau0,
            const QuadratureSpec& quad) {
  const double l = optimal_threshold(sigma_z, spec, dom, tau0, quad);
  return {twdl(l, sigma_z, spec, dom, tau0, quad), l};
}

}  // namespace cwsradar
