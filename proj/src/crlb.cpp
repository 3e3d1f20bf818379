#include "cwsradar/crlb.hpp"

#include <cmath>
#include <string>

namespace cwsradar {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

Eigen::VectorXd normalizer_diagonal(const XiParams& xi) {
  Eigen::VectorXd diag(4 * xi.k());
  for (int k = 0; k < xi.k(); ++k)
    diag.segment<4>(4 * k) = fim_normalizer(xi.components[k].amplitude, xi.n, xi.m).diagonal();
  return diag;
}

}  // namespace

void XiParams::validate() const {
  if (components.empty()) throw InvalidArgument("XiParams: K must be >= 1");
  if (!(noise_variance > 0.0)) throw InvalidArgument("XiParams: noise variance must be positive");
  if (n < 1 || m < 1) throw InvalidArgument("XiParams: N and M must be >= 1");
  for (const auto& c : components) {
    if (!(c.amplitude > 0.0)) throw InvalidArgument("XiParams: amplitude b must be positive");
    if (c.f1 < -0.5 || c.f1 >= 0.5 || c.f2 < -0.5 || c.f2 >= 0.5)
      throw InvalidArgument("XiParams: frequencies must lie in [-0.5, 0.5)");
  }
}

double x_sum(int l0, int l1, int l2, double dpsi, double df1, double df2, int n, int m) {
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const double wm = std::pow(kTwoPi * j, l2);
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const double arg = dpsi + kTwoPi * df1 * i + kTwoPi * df2 * j;
      row += std::pow(kTwoPi * i, l1) * (l0 == 0 ? std::cos(arg) : std::sin(arg));
    }
    total += wm * row;
  }
  return total;
}

double x_sum_closed_form(int l0, double dpsi, double df1, double df2, int n, int m) {
  const auto dirichlet = [](double df, int len) {
    const double s = std::sin(kPi * df);
    if (std::abs(s) < 1e-15) return static_cast<double>(len);
    return std::sin(kPi * len * df) / s;
  };
  // Phase of the geometric sum is pi (N-1) df per axis.
  const double arg = dpsi + kPi * (n - 1) * df1 + kPi * (m - 1) * df2;
  return dirichlet(df1, n) * dirichlet(df2, m) * (l0 == 0 ? std::cos(arg) : std::sin(arg));
}

Eigen::MatrixXd build_exact_fim(const XiParams& xi) {
  xi.validate();
  const int k = xi.k();
  Eigen::MatrixXd f(4 * k, 4 * k);
  const double scale = 2.0 / xi.noise_variance;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const auto& ca = xi.components[a];
      const auto& cb = xi.components[b];
      const double dpsi = ca.phase - cb.phase;
      const double df1 = ca.f1 - cb.f1;
      const double df2 = ca.f2 - cb.f2;
      const auto x = [&](int l0, int l1, int l2) {
        return x_sum(l0, l1, l2, dpsi, df1, df2, xi.n, xi.m);
      };
      const double ba = ca.amplitude, bb = cb.amplitude;
      const double x000 = x(0, 0, 0), x100 = x(1, 0, 0), x110 = x(1, 1, 0), x101 = x(1, 0, 1);
      const double x010 = x(0, 1, 0), x001 = x(0, 0, 1), x020 = x(0, 2, 0), x011 = x(0, 1, 1),
                   x002 = x(0, 0, 2);
      Eigen::Matrix4d blk;
      blk << x000, bb * x100, bb * x110, bb * x101,
          -ba * x100, ba * bb * x000, ba * bb * x010, ba * bb * x001,
          -ba * x110, ba * bb * x010, ba * bb * x020, ba * bb * x011,
          -ba * x101, ba * bb * x001, ba * bb * x011, ba * bb * x002;
      f.block<4, 4>(4 * a, 4 * b) = scale * blk;
    }
  }
  return f;
}

Eigen::Matrix4d fim_normalizer(double amplitude, int n, int m) {
  const double nm = static_cast<double>(n) * m;
  return Eigen::Vector4d(std::sqrt(nm), amplitude * std::sqrt(nm),
                         amplitude * std::sqrt(nm * n * n), amplitude * std::sqrt(nm * m * m))
      .asDiagonal();
}

Eigen::Matrix4d asymptotic_fim_shape() {
  const double p = kPi, p2 = kPi * kPi;
  Eigen::Matrix4d c;
  c << 1, 0, 0, 0,
      0, 1, p, p,
      0, p, 4 * p2 / 3, p2,
      0, p, p2, 4 * p2 / 3;
  return c;
}

Eigen::Matrix4d asymptotic_fim_block(double amplitude, int n, int m, double noise_variance) {
  const Eigen::Matrix4d lam = fim_normalizer(amplitude, n, m);
  return (2.0 / noise_variance) * lam * asymptotic_fim_shape() * lam;
}

Eigen::Matrix4d asymptotic_crlb_block(double amplitude, int n, int m, double noise_variance) {
  if (!(amplitude > 0.0) || n < 2 || m < 2 || !(noise_variance > 0.0))
    throw InvalidArgument("asymptotic_crlb_block: need b > 0, N >= 2, M >= 2, sigma^2 > 0");
  const double nn = n, mm = m;
  const double b2 = amplitude * amplitude;
  Eigen::Matrix4d core;
  core << b2, 0, 0, 0,
      0, 7, -3 / (kPi * nn), -3 / (kPi * mm),
      0, -3 / (kPi * nn), 3 / (kPi * kPi * nn * nn), 0,
      0, -3 / (kPi * mm), 0, 3 / (kPi * kPi * mm * mm);
  return noise_variance / (2.0 * b2 * nn * mm) * core;
}

double offdiagonal_block_ratio(const Eigen::MatrixXd& fim, const XiParams& xi) {
  const Eigen::VectorXd inv = normalizer_diagonal(xi).cwiseInverse();
  const Eigen::MatrixXd g = inv.asDiagonal() * fim * inv.asDiagonal();
  double diag = 0.0, off = 0.0;
  for (int a = 0; a < xi.k(); ++a)
    for (int b = 0; b < xi.k(); ++b) {
      const double s = g.block<4, 4>(4 * a, 4 * b).squaredNorm();
      (a == b ? diag : off) += s;
    }
  return std::sqrt(off / diag);
}

Eigen::MatrixXd invert_checked(const Eigen::MatrixXd& a, double max_condition) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                            : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition))
    throw IllConditionedError("matrix condition number " + std::to_string(cond) +
                              " exceeds " + std::to_string(max_condition));
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd exact_crlb(const Eigen::MatrixXd& fim, const XiParams& xi, double max_condition) {
  const Eigen::VectorXd inv = normalizer_diagonal(xi).cwiseInverse();
  const Eigen::MatrixXd g = inv.asDiagonal() * fim * inv.asDiagonal();
  return inv.asDiagonal() * invert_checked(g, max_condition) * inv.asDiagonal();
}

Eigen::Matrix2d frequency_to_kinematics(int n, double bandwidth, double f0, double chirp_interval,
                                        double c) {
  Eigen::Matrix2d j;
  j << n / bandwidth, -1.0 / bandwidth, 0.0, 1.0 / (f0 * chirp_interval);
  return 0.5 * c * j;
}

Eigen::Matrix2d crlb_theta_finite(double gamma, double bandwidth, double f0, double chirp_interval,
                                  int m, double c) {
  if (!(gamma > 0.0) || !(bandwidth > 0.0) || !(f0 > 0.0) || !(chirp_interval > 0.0) || m < 1)
    throw InvalidArgument("crlb_theta_finite: arguments must be positive, M >= 1");
  const double mm = m;
  const double t = mm * chirp_interval;
  const double k = 3.0 * c * c / (8.0 * kPi * kPi * gamma);
  const double cross = -1.0 / (f0 * chirp_interval * bandwidth * mm * mm);
  Eigen::Matrix2d b;
  b << (1.0 + 1.0 / (mm * mm)) / (bandwidth * bandwidth), cross, cross, 1.0 / (f0 * f0 * t * t);
  return k * b;
}

CrlbRangeVelocity crlb_range_velocity(double gamma, double bandwidth, double duration, double f0,
                                      double c) {
  if (!(gamma > 0.0) || !(bandwidth > 0.0) || !(duration > 0.0) || !(f0 > 0.0))
    throw InvalidArgument("crlb_range_velocity: arguments must be positive");
  const double k = 3.0 * c * c / (8.0 * kPi * kPi * gamma);
  return {k / (bandwidth * bandwidth), k / (f0 * f0 * duration * duration), 0.0};
}

double error_index(double range_var, double velocity_var, double tau0) {
  if (!(range_var >= 0.0) || !(velocity_var >= 0.0) || !(tau0 >= 0.0))
    throw InvalidArgument("error_index: variances and tau0 must be nonnegative");
  return range_var + tau0 * tau0 * velocity_var;
}

}  // namespace cwsradar
