#pragma once

// Collision-warning hypotheses, decision statistics and wrong-decision
// probabilities for Gaussian range/velocity errors.

#include "cwsradar/common.hpp"

namespace cwsradar {

/// Range/velocity error variances plus the TTC threshold tau0.
class ErrorModel {
 public:
  ErrorModel(double range_var, double velocity_var, double tau0);

  double range_var() const { return range_var_; }
  double velocity_var() const { return velocity_var_; }
  double tau0() const { return tau0_; }
  double sigma_z2() const { return range_var_ + tau0_ * tau0_ * velocity_var_; }
  double sigma_z() const;

 private:
  double range_var_;
  double velocity_var_;
  double tau0_;
};

enum class Hypothesis { Safe, Threat };  // H0, H1

/// Threat iff d + tau0 v < 0.
Hypothesis true_hypothesis(double d, double v, double tau0);

/// Upper tail of the standard normal.
double q_function(double x);

enum class GlrtBranch { Linear, Elliptic };

/// Branch 1 holds when d_hat >= (sigma_d^2 / (sigma_v^2 tau0)) v_hat.
GlrtBranch glrt_branch(double d_hat, double v_hat, const ErrorModel& em);

/// Minimized normalized distances to the safe and threatening parameter sets.
struct GlrtDistances {
  double safe;    // s0
  double threat;  // s1
};
GlrtDistances glrt_distances(double d_hat, double v_hat, const ErrorModel& em);

/// T_G = -2 sigma_Z ln L_G, with ln L_G = -(s1 - s0)/2. Throws DomainError for d_hat <= 0.
double statistic_glrt(double d_hat, double v_hat, const ErrorModel& em);

/// T_G from the closed-form branch expressions (d_hat > 0 not checked).
double statistic_glrt_branches(double d_hat, double v_hat, const ErrorModel& em);

inline double statistic_approx(double d_hat, double v_hat, double tau0) {
  return d_hat + tau0 * v_hat;
}

/// Threat if T < lambda; ties go to Safe.
inline Hypothesis decide(double statistic, double lambda) {
  return statistic < lambda ? Hypothesis::Threat : Hypothesis::Safe;
}

/// Wrong-decision probability of the approximate rule.
double pw_approx(double d, double v, double lambda, const ErrorModel& em);

struct GlrtQuadrature {
  int nodes = 201;               // v_hat cells
  double half_width_sigmas = 6;  // v_hat spans +-half_width sigma_v
  bool check_refinement = true;  // re-run at 2*nodes-1 and compare
  double refinement_tolerance = 1e-3;
};

/// Wrong-decision probability of the GLRT rule. T_G is increasing in d_hat at
/// fixed v_hat, so each v_hat cell contributes its exact Gaussian mass times a
/// closed-form d_hat interval probability. Estimates with d_hat <= 0 fall
/// outside the GLRT model and are scored with the linear statistic
/// d_hat + tau0 v_hat.
double pw_glrt_numeric(double d, double v, double lambda, const ErrorModel& em,
                       const GlrtQuadrature& quad = {});

/// Probability that the GLRT and approximate rules disagree at true (d, v),
/// i.e. mass of {T_A < lambda <= T_G}. Because T_G >= T_A everywhere, that set
/// is the entire difference between the two rules, and it lies inside the
/// box [0, lambda] x [0, lambda/tau0]; empty for lambda <= 0. `nodes` cells
/// along v_hat, closed form along d_hat.
double rule_disagreement_probability(double d, double v, double lambda, const ErrorModel& em,
                                     int nodes = 121);

}  // namespace cwsradar
