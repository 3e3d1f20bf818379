#include <doctest.h>

#include <cmath>
#include <complex>

#include "cwsradar/crlb.hpp"

using namespace cwsradar;

namespace {

constexpr double kC = 3e8;

// F = (2 / sigma^2) Re sum conj(d mu / d xi_i) (d mu / d xi_j) for
// mu[n,m] = sum_k b_k exp(j (psi_k + 2 pi (f1_k n + f2_k m))).
Eigen::MatrixXd brute_force_fim(const XiParams& xi) {
  const int k = xi.k();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(4 * k, 4 * k);
  for (int n = 0; n < xi.n; ++n)
    for (int m = 0; m < xi.m; ++m) {
      Eigen::VectorXcd g(4 * k);
      for (int i = 0; i < k; ++i) {
        const auto& c = xi.components[i];
        const std::complex<double> e =
            std::polar(1.0, c.phase + 2.0 * M_PI * (c.f1 * n + c.f2 * m));
        const std::complex<double> j(0.0, 1.0);
        g(4 * i + 0) = e;
        g(4 * i + 1) = j * c.amplitude * e;
        g(4 * i + 2) = j * (2.0 * M_PI * n * c.amplitude) * e;
        g(4 * i + 3) = j * (2.0 * M_PI * m * c.amplitude) * e;
      }
      f += (g.conjugate() * g.transpose()).real();
    }
  return 2.0 / xi.noise_variance * f;
}

XiParams two_tone(int n, int m) {
  XiParams xi;
  xi.components = {{1.0, 0.3, 0.05, -0.2}, {0.8, 1.9, 0.05 + 4.37 / 32.0, -0.2 + 4.61 / 16.0}};
  xi.noise_variance = 0.5;
  xi.n = n;
  xi.m = m;
  return xi;
}

}  // namespace

TEST_CASE("single component X^(0,0,0) equals N M") {
  CHECK(x_sum(0, 0, 0, 0.0, 0.0, 0.0, 16, 8) == doctest::Approx(128.0));
  CHECK(std::abs(x_sum(1, 0, 0, 0.0, 0.0, 0.0, 16, 8)) < 1e-12);
}

TEST_CASE("exact FIM agrees with a four-sample hand evaluation") {
  XiParams xi;
  xi.components = {{1.0, 0.4, 0.1, 0.3}};
  xi.noise_variance = 1.0;
  xi.n = 2;
  xi.m = 2;
  const auto f = build_exact_fim(xi);
  const auto g = brute_force_fim(xi);
  CHECK((f - g).cwiseAbs().maxCoeff() < 1e-12 * g.cwiseAbs().maxCoeff());
}

TEST_CASE("exact FIM agrees with brute force for two components") {
  const auto xi = two_tone(8, 6);
  const auto f = build_exact_fim(xi);
  const auto g = brute_force_fim(xi);
  CHECK((f - g).norm() < 1e-10 * g.norm());
  CHECK((f - f.transpose()).norm() < 1e-10 * f.norm());
}

TEST_CASE("orthogonal bins give vanishing cross sums") {
  for (int l0 : {0, 1}) {
    CHECK(std::abs(x_sum(l0, 0, 0, 0.7, 3.0 / 32, -2.0 / 16, 32, 16)) < 1e-9);
    CHECK(std::abs(x_sum_closed_form(l0, 0.7, 3.0 / 32, -2.0 / 16, 32, 16)) < 1e-9);
  }
}

TEST_CASE("Dirichlet closed form matches direct summation away from zero offsets") {
  for (double df1 : {0.013, -0.21, 0.4})
    for (double df2 : {0.031, -0.17})
      for (int l0 : {0, 1}) {
        const double a = x_sum(l0, 0, 0, 1.1, df1, df2, 24, 10);
        const double b = x_sum_closed_form(l0, 1.1, df1, df2, 24, 10);
        CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
      }
}

TEST_CASE("asymptotic CRLB block entries, scaling and inverse") {
  const double b = 1.7, s2 = 0.3;
  const int n = 64, m = 32;
  const auto c = asymptotic_crlb_block(b, n, m, s2);
  CHECK(c(2, 2) == doctest::Approx(s2 * 3.0 / (2.0 * b * b * std::pow(n, 3) * m * M_PI * M_PI)));
  CHECK(c(3, 3) == doctest::Approx(s2 * 3.0 / (2.0 * b * b * n * std::pow(m, 3) * M_PI * M_PI)));
  const auto c2 = asymptotic_crlb_block(b, 2 * n, m, s2);
  CHECK(c(2, 2) / c2(2, 2) == doctest::Approx(8.0));
  const Eigen::Matrix4d id = c * asymptotic_fim_block(b, n, m, s2);
  CHECK((id - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(c);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK((c - c.transpose()).norm() < 1e-14 * c.norm());
}

TEST_CASE("crlb_theta_finite limits and correlation") {
  const double gamma = 100.0, w = 300e6, f0 = 24e9, t0 = 100e-6;
  const int m = 4096;
  const auto big = crlb_theta_finite(gamma, w, f0, t0, m, kC);
  const auto rv = crlb_range_velocity(gamma, w, m * t0, f0, kC);
  CHECK(big(0, 0) == doctest::Approx(rv.range_var).epsilon(1e-6));
  CHECK(big(1, 1) == doctest::Approx(rv.velocity_var).epsilon(1e-12));
  for (int mm : {1, 2, 7, 64}) {
    const auto c = crlb_theta_finite(gamma, w, f0, t0, mm, kC);
    const double rho = c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
    CHECK(std::abs(rho) == doctest::Approx(1.0 / std::sqrt(mm * mm + 1.0)).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  const auto one = crlb_theta_finite(gamma, w, f0, t0, 1, kC);
  CHECK(one(0, 0) == doctest::Approx(2.0 * crlb_range_velocity(gamma, w, t0, f0, kC).range_var));
}

TEST_CASE("finite CRLB is the congruence of the frequency block") {
  const int n = 200, m = 48;
  const double b = 0.9, s2 = 2.0, w = 300e6, f0 = 24e9, t0 = 100e-6;
  const double gamma = b * b * n * m / s2;
  const Eigen::Matrix2d sub = asymptotic_crlb_block(b, n, m, s2).block<2, 2>(2, 2);
  const Eigen::Matrix2d j = frequency_to_kinematics(n, w, f0, t0, kC);
  const Eigen::Matrix2d mapped = j * sub * j.transpose();
  const Eigen::Matrix2d direct = crlb_theta_finite(gamma, w, f0, t0, m, kC);
  CHECK((mapped - direct).norm() < 1e-10 * direct.norm());
}

TEST_CASE("range/velocity bound example and scalings") {
  const auto rv = crlb_range_velocity(100.0, 300e6, 10.4167e-3, 24e9, kC);
  CHECK(rv.range_var == doctest::Approx(3.80e-4).epsilon(2e-3));
  CHECK(rv.velocity_var == doctest::Approx(5.47e-4).epsilon(2e-3));
  CHECK(rv.cross == 0.0);
  const auto q = crlb_range_velocity(400.0, 300e6, 10.4167e-3, 24e9, kC);
  CHECK(q.range_var == doctest::Approx(rv.range_var / 4));
  CHECK(q.velocity_var == doctest::Approx(rv.velocity_var / 4));
  const double x = 2.5e8;
  CHECK(crlb_range_velocity(50.0, x, 1.0, 1.0, kC).range_var ==
        doctest::Approx(crlb_range_velocity(50.0, 1.0, x, 1.0, kC).velocity_var));
  CHECK_THROWS(crlb_range_velocity(0.0, 300e6, 1e-2, 24e9));
}

TEST_CASE("error index arithmetic") {
  CHECK(error_index(3.80e-4, 5.47e-4, 4.0) == doctest::Approx(9.13e-3).epsilon(2e-3));
  CHECK(error_index(3.80e-4, 0.0, 4.0) == 3.80e-4);
  CHECK(error_index(3.80e-4, 5.47e-4, 0.0) == 3.80e-4);
}

TEST_CASE("off-diagonal blocks vanish as the grid grows") {
  double prev = 1e300;
  for (auto [n, m] : {std::pair{32, 16}, {64, 32}, {128, 64}, {256, 128}}) {
    const auto xi = two_tone(n, m);
    const double r = offdiagonal_block_ratio(build_exact_fim(xi), xi);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("inverse exact FIM approaches the asymptotic block") {
  const auto xi = two_tone(128, 64);
  const auto inv = exact_crlb(build_exact_fim(xi), xi);
  for (int k = 0; k < 2; ++k) {
    const auto& c = xi.components[k];
    const Eigen::Matrix4d lam = fim_normalizer(c.amplitude, xi.n, xi.m);
    const Eigen::Matrix4d exact = lam * inv.block<4, 4>(4 * k, 4 * k) * lam;
    const Eigen::Matrix4d asym = lam * asymptotic_crlb_block(c.amplitude, xi.n, xi.m, xi.noise_variance) * lam;
    CHECK((exact - asym).norm() / asym.norm() < 0.10);
    for (int i = 0; i < 4; ++i) CHECK(exact(i, i) == doctest::Approx(asym(i, i)).epsilon(0.10));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inv + inv.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("ill-conditioned matrices are reported") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0 + 1e-15;
  CHECK_THROWS_AS(invert_checked(a), IllConditionedError);
  Eigen::MatrixXd b(2, 2);
  b << 2.0, 0.5, 0.5, 1.0;
  CHECK((invert_checked(b) * b - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}
