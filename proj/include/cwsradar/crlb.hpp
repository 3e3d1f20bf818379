#pragma once

// Fisher information and Cramer-Rao bounds for the 2-D multi-sinusoid model
// y[n,m] = sum_k b_k e^{j(psi_k + 2pi(f1_k n + f2_k m))} + w[n,m].

#include <vector>

#include <Eigen/Dense>

#include "cwsradar/common.hpp"

namespace cwsradar {

struct SinusoidComponent {
  double amplitude;  // b > 0
  double phase;      // psi, rad
  double f1;         // cycles/sample
  double f2;         // cycles/chirp
};

struct XiParams {
  std::vector<SinusoidComponent> components;
  double noise_variance;  // sigma_w^2
  int n;
  int m;

  void validate() const;
  int k() const { return static_cast<int>(components.size()); }
};

/// X^{(l0,l1,l2)} = sum_n sum_m (2pi n)^l1 (2pi m)^l2 g_l0(dpsi + 2pi df1 n + 2pi df2 m),
/// g_0 = cos, g_1 = sin. Direct double summation.
double x_sum(int l0, int l1, int l2, double dpsi, double df1, double df2, int n, int m);

/// Dirichlet-kernel closed form of X^{(l0,0,0)}; only valid away from df -> 0.
double x_sum_closed_form(int l0, double dpsi, double df1, double df2, int n, int m);

/// Exact 4K x 4K Fisher information, parameter order (b, psi, f1, f2) per component.
Eigen::MatrixXd build_exact_fim(const XiParams& xi);

/// Lambda_k = diag(sqrt(NM), b sqrt(NM), b sqrt(N^3 M), b sqrt(N M^3)).
Eigen::Matrix4d fim_normalizer(double amplitude, int n, int m);

/// Limit of Lambda^-1 F_kk Lambda^-1 up to the 2/sigma^2 factor.
Eigen::Matrix4d asymptotic_fim_shape();

/// (2/sigma^2) Lambda C Lambda.
Eigen::Matrix4d asymptotic_fim_block(double amplitude, int n, int m, double noise_variance);

/// Closed-form inverse of asymptotic_fim_block.
Eigen::Matrix4d asymptotic_crlb_block(double amplitude, int n, int m, double noise_variance);

/// Relative Frobenius norm of the off-diagonal 4x4 blocks of Lambda^-1 F Lambda^-1.
double offdiagonal_block_ratio(const Eigen::MatrixXd& fim, const XiParams& xi);

/// Inverse with a condition-number guard (throws IllConditionedError above max_condition).
Eigen::MatrixXd invert_checked(const Eigen::MatrixXd& a, double max_condition = 1e12);

/// (c/2) [[N/W, -1/W], [0, 1/(f0 T0)]]: maps (f1, f2) to (d, v).
Eigen::Matrix2d frequency_to_kinematics(int n, double bandwidth, double f0, double chirp_interval,
                                        double c = kSpeedOfLight);

/// Asymptotic (range, velocity) CRLB keeping the finite-M terms.
Eigen::Matrix2d crlb_theta_finite(double gamma, double bandwidth, double f0, double chirp_interval,
                                  int m, double c = kSpeedOfLight);

struct CrlbRangeVelocity {
  double range_var;     // B_d, m^2
  double velocity_var;  // B_v, (m/s)^2
  double cross;         // 0 for the large-M form
};

CrlbRangeVelocity crlb_range_velocity(double gamma, double bandwidth, double duration, double f0,
                                      double c = kSpeedOfLight);

/// sigma_Z^2 = sigma_d^2 + tau0^2 sigma_v^2.
double error_index(double range_var, double velocity_var, double tau0);

}  // namespace cwsradar

namespace cwsradar {

/// inv(F) computed through the Lambda-equilibrated matrix; the condition
/// guard applies to the equilibrated form.
Eigen::MatrixXd exact_crlb(const Eigen::MatrixXd& fim, const XiParams& xi,
                           double max_condition = 1e12);

}  // namespace cwsradar
