#include "cwsradar/designer.hpp"

#include <cmath>

#include "cwsradar/crlb.hpp"

namespace cwsradar {

void DesignConstraints::validate() const {
  if (!(w_max > 0 && t_max > 0 && tbp > 0 && f0 > 0 && tau0 > 0 && gamma > 0))
    throw InvalidArgument("DesignConstraints: all fields must be positive");
  if (tbp > w_max * t_max)
    throw InvalidArgument("DesignConstraints: S exceeds W_max * T_max");
}

double error_index_objective(double bandwidth, double duration, double f0, double tau0,
                             double gamma, double c) {
  const auto b = crlb_range_velocity(gamma, bandwidth, duration, f0, c);
  return error_index(b.range_var, b.velocity_var, tau0);
}

DesignResult optimize_waveform(const DesignConstraints& dc, double c) {
  dc.validate();
  DesignResult r{};
  r.bandwidth = std::sqrt(dc.f0 * dc.tbp / dc.tau0);
  r.duration = std::sqrt(dc.tau0 * dc.tbp / dc.f0);
  r.regime = DesignRegime::Interior;
  if (r.bandwidth > dc.w_max) {
    r.bandwidth = dc.w_max;
    r.duration = dc.tbp / dc.w_max;
    r.regime = DesignRegime::ClampedW;
  } else if (r.duration > dc.t_max) {
    r.bandwidth = dc.tbp / dc.t_max;
    r.duration = dc.t_max;
    r.regime = DesignRegime::ClampedT;
  }
  if (r.regime == DesignRegime::Interior)
    r.sigma_z2 = 3.0 * c * c * dc.tau0 / (4.0 * kPi * kPi * dc.gamma * dc.f0 * dc.tbp);
  else
    r.sigma_z2 = error_index_objective(r.bandwidth, r.duration, dc.f0, dc.tau0, dc.gamma, c);
  return r;
}

void ConventionalSpec::validate() const {
  if (!(delta_d > 0 && delta_v > 0))
    throw InvalidArgument("ConventionalSpec: resolutions must be positive");
}

ConventionalDesign conventional_design(const ConventionalSpec& spec, double f0, double c) {
  spec.validate();
  if (!(f0 > 0)) throw InvalidArgument("conventional_design: f0 must be positive");
  ConventionalDesign d{};
  d.bandwidth = c / (2.0 * spec.delta_d);
  d.duration = c / (2.0 * f0 * spec.delta_v);
  d.tbp = c * c / (4.0 * f0 * spec.delta_d * spec.delta_v);
  return d;
}

double conventional_error_index(double gamma, double f0, double tau0, const ConventionalSpec& spec,
                                double c) {
  if (!(gamma > 0 && f0 > 0 && tau0 > 0))
    throw InvalidArgument("conventional_error_index: inputs must be positive");
  const auto con = conventional_design(spec, f0, c);
  const double r = spec.delta_d / spec.delta_v;
  return 3.0 * c * c * tau0 / (8.0 * kPi * kPi * gamma * f0 * con.tbp) * (r / tau0 + tau0 / r);
}

double design_ratio(double tau0, const ConventionalSpec& spec) {
  spec.validate();
  if (!(tau0 > 0)) throw InvalidArgument("design_ratio: tau0 must be positive");
  const double r = spec.delta_d / spec.delta_v;
  return 2.0 * tau0 * r / (tau0 * tau0 + r * r);
}

long max_coexisting_radars(double w_max, double t_max, double tbp) {
  if (!(w_max > 0 && t_max > 0 && tbp > 0))
    throw InvalidArgument("max_coexisting_radars: inputs must be positive");
  return static_cast<long>(std::floor(w_max * t_max / tbp));
}

}  // namespace cwsradar
