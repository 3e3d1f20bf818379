#include <doctest.h>

#include <cmath>
#include <random>

#include "cwsradar/decision.hpp"
#include "cwsradar/twdl.hpp"

using namespace cwsradar;

namespace {

// d_min + d_max + tau0 (v_min + v_max) = 0 makes the domain symmetric under Z -> -Z.
const DomainRect kSymmetric{1.0, 9.0, -3.5, 1.0};

double brute_force_twdl(double lambda, double sigma_z, const PwdlSpec& spec, const DomainRect& dom,
                        double tau0, int n) {
  const ErrorModel em(sigma_z * sigma_z / 2.0, sigma_z * sigma_z / (2.0 * tau0 * tau0), tau0);
  const double hd = (dom.d_max - dom.d_min) / n, hv = (dom.v_max - dom.v_min) / n;
  long double sum = 0.0L;
  for (int i = 0; i < n; ++i) {
    const double d = dom.d_min + (i + 0.5) * hd;
    for (int j = 0; j < n; ++j) {
      const double v = dom.v_min + (j + 0.5) * hv;
      sum += pwdl_eval(spec, d, v, tau0) * pw_approx(d, v, lambda, em);
    }
  }
  return static_cast<double>(sum) * hd * hv;
}

}  // namespace

TEST_CASE("loss functions") {
  CHECK(pwdl_eval(PwdlSpec::constant(5.0), 10.0, -5.0, 4.0) == 5.0);
  CHECK(pwdl_eval(PwdlSpec::ttc_dependent(10.0), 10.0, -5.0, 4.0) == doctest::Approx(5.0));
  for (int id = 1; id <= 4; ++id) {
    CHECK(pwdl_eval(standard_pwdl(id), 10.0, 0.0, 4.0) == 1.0);
    CHECK(pwdl_eval(standard_pwdl(id), 10.0, -2.5, 4.0) == 1.0);
  }
  CHECK(standard_pwdl(1).kind() == PwdlSpec::Kind::Constant);
  CHECK(standard_pwdl(2).weight() == 10.0);
  CHECK(standard_pwdl(3).kind() == PwdlSpec::Kind::TtcDependent);
  CHECK(standard_pwdl(4).weight() == 10.0);
  CHECK_THROWS_WITH_AS(standard_pwdl(5), doctest::Contains("1, 2, 3, 4"), InvalidArgument);
  CHECK_THROWS(PwdlSpec::constant(0.0));
  CHECK_THROWS(PwdlSpec::ttc_dependent(-1.0));
}

TEST_CASE("domain and quadrature validation") {
  CHECK_THROWS(DomainRect{0.0, 1.0, -1.0, 1.0}.validate());
  CHECK_THROWS(DomainRect{2.0, 1.0, -1.0, 1.0}.validate());
  CHECK_THROWS(DomainRect{0.1, 1.0, 1.0, 1.0}.validate());
  CHECK(evaluation_domain().area() == doctest::Approx(99.9 * 60.0));
  QuadratureSpec q;
  q.nd = 8;
  CHECK_THROWS(q.validate());
  CHECK_THROWS(twdl(0.0, 0.0, standard_pwdl(1), evaluation_domain(), 4.0));
}

TEST_CASE("vanishing error gives vanishing loss") {
  const auto dom = evaluation_domain();
  for (int id = 1; id <= 4; ++id) {
    const auto spec = standard_pwdl(id);
    const double umax = spec.kind() == PwdlSpec::Kind::Constant ? spec.weight() : spec.weight() * 300.0;
    CHECK(twdl(0.0, 1e-9, spec, dom, 4.0) < 1e-6 * dom.area() * umax);
  }
}

TEST_CASE("small safe cell integrates to Q(2) times its area") {
  const DomainRect cell{10.0, 10.001, 0.0, 1e-4};
  const double u = twdl(8.0, 1.0, standard_pwdl(1), cell, 4.0);
  CHECK(u == doctest::Approx(q_function(2.0) * cell.area()).epsilon(1e-3));
}

TEST_CASE("agreement with a 2000 x 2000 brute-force Riemann sum") {
  const auto dom = evaluation_domain();
  const double u = twdl(0.0, 0.1, standard_pwdl(1), dom, 4.0);
  const double b = brute_force_twdl(0.0, 0.1, standard_pwdl(1), dom, 4.0, 2000);
  CHECK(u == doctest::Approx(b).epsilon(5e-3));
  const double u3 = twdl(0.05, 0.3, standard_pwdl(3), dom, 4.0);
  const double b3 = brute_force_twdl(0.05, 0.3, standard_pwdl(3), dom, 4.0, 2000);
  CHECK(u3 == doctest::Approx(b3).epsilon(5e-3));
}

TEST_CASE("refinement changes the loss by under 0.5% and shrinks with n") {
  const auto dom = evaluation_domain();
  for (int id = 1; id <= 4; ++id) {
    QuadratureSpec q;
    q.check_refinement = true;
    CHECK_NOTHROW(twdl(0.02, 0.1, standard_pwdl(id), dom, 4.0, q));
  }
  double prev = 1e300;
  double last = 0.0;
  for (int n : {25, 50, 100, 200, 400, 800}) {
    QuadratureSpec q;
    q.nd = q.nv = n;
    const double u = twdl(0.0, 0.1, standard_pwdl(3), dom, 4.0, q);
    if (last > 0.0) {
      const double change = std::abs(u - last) / last;
      CHECK(change <= prev * 1.05);
      prev = change;
    }
    last = u;
  }
}

TEST_CASE("loss is positive for every positive error") {
  for (double s : {1e-3, 0.01, 0.3, 2.0})
    for (int id = 1; id <= 4; ++id) CHECK(twdl(0.0, s, standard_pwdl(id), evaluation_domain(), 4.0) > 0.0);
}

TEST_CASE("partial derivatives") {
  const auto dom = evaluation_domain();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ls(-2.0, 2.0), ss(-2.5, 0.0);
  for (int i = 0; i < 8; ++i) {
    const double sigma = std::pow(10.0, ss(rng)), lambda = ls(rng) * sigma;
    const auto spec = standard_pwdl(1 + i % 4);
    const auto p = twdl_partials(lambda, sigma, spec, dom, 4.0);
    CHECK(p.d_sigma == doctest::Approx(sigma * p.d2_lambda).epsilon(1e-3));
    const double h = 1e-4 * sigma;
    const double fd = (twdl(lambda + h, sigma, spec, dom, 4.0) - twdl(lambda - h, sigma, spec, dom, 4.0)) / (2 * h);
    CHECK(p.d_lambda == doctest::Approx(fd).epsilon(5e-3));
  }
}

TEST_CASE("optimal threshold on a symmetric domain") {
  const double tol = 1e-4 * 0.2;
  CHECK(std::abs(optimal_threshold(0.2, PwdlSpec::constant(1.0), kSymmetric, 4.0)) <= tol);
  CHECK(optimal_threshold(0.2, PwdlSpec::constant(5.0), kSymmetric, 4.0) > 0.0);
  // dU/dlambda at 0 is negative when misses cost more
  CHECK(twdl_partials(0.0, 0.2, PwdlSpec::constant(5.0), kSymmetric, 4.0).d_lambda < 0.0);
}

TEST_CASE("stationarity and convexity at the optimal threshold") {
  const auto dom = evaluation_domain();
  for (int id = 1; id <= 4; ++id)
    for (double s : {0.01, 0.1, 1.0}) {
      const auto m = mtwdl(s, standard_pwdl(id), dom, 4.0);
      const auto p = twdl_partials(m.lambda, s, standard_pwdl(id), dom, 4.0);
      CHECK(std::abs(p.d_lambda) < 1e-3 * m.value);
      CHECK(p.d2_lambda > 0.0);
      CHECK(m.value == doctest::Approx(twdl(m.lambda, s, standard_pwdl(id), dom, 4.0)).epsilon(1e-12));
      CHECK(m.value <= twdl(0.0, s, standard_pwdl(id), dom, 4.0));
      for (double k : {-3.0, -1.0, -0.1, 0.1, 1.0, 3.0})
        CHECK(m.value <= twdl(m.lambda + k * s, s, standard_pwdl(id), dom, 4.0));
    }
}

TEST_CASE("single minimum over the threshold bracket") {
  const auto dom = evaluation_domain();
  for (int id = 1; id <= 4; ++id) {
    const double s = 0.1;
    std::vector<double> u;
    for (int i = 0; i <= 100; ++i) u.push_back(twdl(s * (-20.0 + 0.4 * i), s, standard_pwdl(id), dom, 4.0));
    int minima = 0;
    for (int i = 1; i < 100; ++i)
      if (u[i] < u[i - 1] * (1 - 1e-9) && u[i] < u[i + 1] * (1 - 1e-9)) ++minima;
    CHECK(minima == 1);
  }
}

TEST_CASE("minimal loss increases with the error index") {
  const auto dom = evaluation_domain();
  for (int id = 1; id <= 4; ++id) {
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double s = std::pow(10.0, -3.0 + 3.0 * i / 9.0);
      const double u = mtwdl(s, standard_pwdl(id), dom, 4.0).value;
      CHECK(u > prev);
      prev = u;
    }
    CHECK(mtwdl(1e-7, standard_pwdl(id), dom, 4.0).value < 1e-4 * mtwdl(0.1, standard_pwdl(id), dom, 4.0).value);
  }
}
