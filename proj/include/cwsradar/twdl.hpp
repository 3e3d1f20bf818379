#pragma once

// Total wrong-decision loss over a rectangular (range, velocity) domain and the
// minimal-loss performance metric derived from it.

#include "cwsradar/common.hpp"

namespace cwsradar {

/// Per-wrong-decision loss. False alarms always cost 1; a miss costs u1
/// (Constant) or u2 / TTC = u2 (-v/d) (TtcDependent).
class PwdlSpec {
 public:
  enum class Kind { Constant, TtcDependent };

  static PwdlSpec constant(double u1);
  static PwdlSpec ttc_dependent(double u2);

  Kind kind() const { return kind_; }
  double weight() const { return weight_; }

 private:
  PwdlSpec(Kind kind, double weight) : kind_(kind), weight_(weight) {}
  Kind kind_;
  double weight_;
};

/// The four losses used throughout the evaluation: 1, 2 constant (5, 10);
/// 3, 4 TTC-dependent (5 s, 10 s). Throws InvalidArgument for other ids.
PwdlSpec standard_pwdl(int id);

double pwdl_eval(const PwdlSpec& spec, double d, double v, double tau0);

struct DomainRect {
  double d_min;
  double d_max;
  double v_min;
  double v_max;

  void validate() const;
  double area() const { return (d_max - d_min) * (v_max - v_min); }
};

/// d in [0.1, 100] m, v in [-30, 30] m/s.
DomainRect evaluation_domain();

/// nv midpoint rows in v. Along d each row is cut into nd cells plus a split
/// at the boundary d = -tau0 v; on every piece the Gaussian tail of the error
/// is integrated in closed form and the loss is taken at the piece midpoint.
struct QuadratureSpec {
  int nd = 400;
  int nv = 400;
  bool check_refinement = false;  // recompute with 2nd x 2nv and compare
  double refinement_tolerance = 5e-3;

  void validate() const;
};

double twdl(double lambda, double sigma_z, const PwdlSpec& spec, const DomainRect& dom,
            double tau0, const QuadratureSpec& quad = {});

struct TwdlPartials {
  double d_lambda;
  double d2_lambda;
  double d_sigma;
};

/// The three derivative integrals, each evaluated from its own integral form.
TwdlPartials twdl_partials(double lambda, double sigma_z, const PwdlSpec& spec,
                           const DomainRect& dom, double tau0, const QuadratureSpec& quad = {});

/// Golden-section minimization over [-20 sigma_Z, 20 sigma_Z] to 1e-4 sigma_Z,
/// then a bracketed Newton polish on dU/dlambda. Throws ConvergenceError when
/// the minimum is at a bracket endpoint.
double optimal_threshold(double sigma_z, const PwdlSpec& spec, const DomainRect& dom, double tau0,
                         const QuadratureSpec& quad = {});

struct Mtwdl {
  double value;   // U at the optimal threshold
  double lambda;  // optimal threshold
};

Mtwdl mtwdl(double sigma_z, const PwdlSpec& spec, const DomainRect& dom, double tau0,
            const QuadratureSpec& quad = {});

}  // namespace cwsradar
