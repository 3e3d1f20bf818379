#include <doctest.h>

#include <cmath>
#include <random>

#include "cwsradar/decision.hpp"
#include "cwsradar/crlb.hpp"

using namespace cwsradar;

TEST_CASE("true hypothesis from the collision line") {
  CHECK(true_hypothesis(10.0, -5.0, 4.0) == Hypothesis::Threat);
  CHECK(true_hypothesis(10.0, 0.0, 4.0) == Hypothesis::Safe);
  CHECK(true_hypothesis(16.0, -4.0, 4.0) == Hypothesis::Safe);
}

TEST_CASE("error model invariants") {
  CHECK_THROWS(ErrorModel(0.0, 1.0, 4.0));
  CHECK_THROWS(ErrorModel(1.0, -1.0, 4.0));
  CHECK_THROWS(ErrorModel(1.0, 1.0, 0.0));
  const ErrorModel em(2.0, 3.0, 4.0);
  CHECK(em.sigma_z2() == doctest::Approx(50.0));
  CHECK(em.sigma_z() == doctest::Approx(std::sqrt(50.0)));
}

TEST_CASE("GLRT statistic branches") {
  const ErrorModel em(1.0, 1.0, 4.0);
  CHECK(glrt_branch(5.0, -1.0, em) == GlrtBranch::Linear);
  CHECK(statistic_glrt(5.0, -1.0, em) == doctest::Approx(1.0));
  CHECK(glrt_branch(1.0, 10.0, em) == GlrtBranch::Elliptic);
  CHECK(statistic_glrt(1.0, 10.0, em) == doctest::Approx(std::sqrt(17.0) * std::sqrt(101.0)));
  CHECK(statistic_glrt(1.0, 10.0, em) == doctest::Approx(41.44).epsilon(1e-3));
  CHECK_THROWS_AS(statistic_glrt(0.0, 1.0, em), DomainError);
  CHECK_THROWS_AS(statistic_glrt(-2.0, 1.0, em), DomainError);
}

TEST_CASE("GLRT branch formulas agree on the branch boundary") {
  const ErrorModel em(0.3, 0.7, 2.5);
  for (double v : {0.1, 1.0, 7.5}) {
    const double d = em.range_var() / (em.velocity_var() * em.tau0()) * v;
    const double lin = d + em.tau0() * v;
    const double ell = em.sigma_z() * std::sqrt(d * d / em.range_var() + v * v / em.velocity_var());
    CHECK(std::abs(lin - ell) < 1e-9 * lin);
    CHECK(statistic_glrt(d, v, em) == doctest::Approx(lin).epsilon(1e-9));
  }
}

TEST_CASE("GLRT statistic properties on random estimates") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.01, 50.0), uv(-20.0, 20.0), us(0.1, 3.0);
  for (int i = 0; i < 500; ++i) {
    const ErrorModel em(us(rng), us(rng), 4.0);
    const double d = ud(rng), v = uv(rng);
    const double tg = statistic_glrt(d, v, em), ta = statistic_approx(d, v, 4.0);
    CHECK(tg == doctest::Approx(statistic_glrt_branches(d, v, em)).epsilon(1e-9));
    CHECK(tg >= ta - 1e-9 * std::abs(ta));
    if (glrt_branch(d, v, em) == GlrtBranch::Linear)
      CHECK(tg == doctest::Approx(ta).epsilon(1e-12));
    else
      CHECK(tg >= 0.0);
    // joint scaling of the error model, the estimate and lambda
    const double s = us(rng) * 3.0, lambda = uv(rng);
    const ErrorModel scaled(em.range_var() * s * s, em.velocity_var() * s * s, 4.0);
    CHECK(decide(statistic_glrt(d * s, v * s, scaled), lambda * s) ==
          decide(statistic_glrt(d, v, em), lambda));
  }
}

TEST_CASE("approximate statistic and the decision rule") {
  CHECK(statistic_approx(5.0, -1.0, 4.0) == 1.0);
  CHECK(statistic_approx(0.0, 0.0, 4.0) == 0.0);
  CHECK(decide(1.0, 0.0) == Hypothesis::Safe);
  CHECK(decide(-1.0, 0.0) == Hypothesis::Threat);
  CHECK(decide(0.7, 0.7) == Hypothesis::Safe);
  // the approximate rule splits the plane along d + tau0 v = lambda
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = u(rng), v = u(rng) / 4.0, lambda = 2.0;
    CHECK((decide(statistic_approx(d, v, 4.0), lambda) == Hypothesis::Threat) ==
          (d + 4.0 * v < lambda));
  }
}

TEST_CASE("Q-function and approximate-rule wrong-decision probability") {
  CHECK(q_function(0.0) == 0.5);
  CHECK(q_function(2.0) == doctest::Approx(0.0227501319481792).epsilon(1e-12));
  const ErrorModel em(0.01, 0.0025, 4.0);  // sigma_Z^2 = 0.05
  const double sz = em.sigma_z();
  CHECK(pw_approx(3.0, -0.5, 1.0, em) == doctest::Approx(0.5));
  CHECK(pw_approx(3.0, 0.0, 3.0 - 2.0 * sz, em) == doctest::Approx(q_function(2.0)));
  CHECK(pw_approx(3.0, 0.0, 3.0 - 100.0 * sz, em) < 1e-300);
  // miss side: Z < 0, wrong when the statistic lands above lambda
  CHECK(pw_approx(1.0, -0.5, -1.0 + 1.5 * sz, em) == doctest::Approx(q_function(1.5)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = 2.0 + u(rng), v = u(rng), lambda = u(rng);
    const double p = pw_approx(d, v, lambda, em), z = d + 4.0 * v;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    if ((z >= 0 ? 1.0 : -1.0) * (z - lambda) >= 0.0) CHECK(p <= 0.5);
  }
}

TEST_CASE("GLRT wrong-decision probability limits") {
  // sigma_v -> 0 collapses to the one-dimensional form
  const ErrorModel thin(0.04, 1e-10, 4.0);
  for (double lambda : {-0.1, 0.0, 0.15}) {
    const double d = 2.0, v = -0.49;
    CHECK(std::abs(pw_glrt_numeric(d, v, lambda, thin) - pw_approx(d, v, lambda, thin)) < 1e-3);
  }
  const ErrorModel em(0.01, 0.0025, 4.0);
  const double sz = em.sigma_z();
  CHECK(pw_glrt_numeric(5.0, 0.0, 5.0 - 8.0 * sz, em) < 1e-6);
}

TEST_CASE("GLRT and approximate rules agree across the evaluation region") {
  // optimized waveform at 20 dB: W = 136.9 MHz, T = 22.8 ms
  const auto b = crlb_range_velocity(100.0, 136.93e6, 22.82e-3, 24e9, 3e8);
  const ErrorModel em(b.range_var, b.velocity_var, 4.0);
  const double sz = em.sigma_z();
  for (double lambda : {-2.0 * sz, 0.0, 1.0 * sz, 3.0 * sz})
    for (double d : {0.1, 0.12, 0.2, 0.5, 5.0})
      for (double v : {-30.0, -1.2, -0.03, -0.02, 0.0, 0.01, 1.0}) {
        const double g = pw_glrt_numeric(d, v, lambda, em);
        const double a = pw_approx(d, v, lambda, em);
        CHECK(std::abs(g - a) < 0.02);
        const double s = true_hypothesis(d, v, 4.0) == Hypothesis::Threat ? 1.0 : -1.0;
        const double p = rule_disagreement_probability(d, v, lambda, em, 201);
        CHECK(std::abs(g - (a + s * p)) < 2e-4);
      }
}

TEST_CASE("disagreement vanishes for non-positive thresholds") {
  const ErrorModel em(0.01, 0.01, 4.0);
  CHECK(rule_disagreement_probability(0.2, 0.0, 0.0, em) == 0.0);
  CHECK(rule_disagreement_probability(0.2, 0.0, -0.3, em) == 0.0);
  CHECK(rule_disagreement_probability(0.05, 0.01, 0.3, em) > 0.0);
}

TEST_CASE("decisions of the two rules differ on under 1% of the domain") {
  const auto b = crlb_range_velocity(100.0, 136.93e6, 22.82e-3, 24e9, 3e8);
  const ErrorModel em(b.range_var, b.velocity_var, 4.0);
  const double sz = em.sigma_z();
  const int n = 400;
  for (double k : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    const double lambda = k * sz;
    long differ = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = 0.1 + (i + 0.5) * 99.9 / n, v = -30.0 + (j + 0.5) * 60.0 / n;
        differ += decide(statistic_glrt(d, v, em), lambda) != decide(statistic_approx(d, v, 4.0), lambda);
      }
    CHECK(static_cast<double>(differ) / (n * n) < 0.01);
  }
}
