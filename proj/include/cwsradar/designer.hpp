#pragma once

// Bandwidth/duration selection under a time-bandwidth-product budget, and the
// resolution-driven baseline it is compared against.

#include "cwsradar/common.hpp"

namespace cwsradar {

struct DesignConstraints {
  double w_max;  // Hz
  double t_max;  // s
  double tbp;    // S
  double f0;     // Hz
  double tau0;   // s
  double gamma;  // linear SNR

  void validate() const;  // all positive and S <= W_max T_max
};

enum class DesignRegime { Interior, ClampedW, ClampedT };

struct DesignResult {
  double bandwidth;  // W, Hz
  double duration;   // T, s
  double sigma_z2;   // m^2
  DesignRegime regime;
};

/// sigma_Z^2 at (W, T) from the large-M range/velocity bounds.
double error_index_objective(double bandwidth, double duration, double f0, double tau0,
                             double gamma, double c = kSpeedOfLight);

DesignResult optimize_waveform(const DesignConstraints& dc, double c = kSpeedOfLight);

struct ConventionalSpec {
  double delta_d;  // range resolution, m
  double delta_v;  // velocity resolution, m/s

  void validate() const;
};

struct ConventionalDesign {
  double bandwidth;  // c / (2 delta_d)
  double duration;   // c / (2 f0 delta_v)
  double tbp;        // product of the two
};

ConventionalDesign conventional_design(const ConventionalSpec& spec, double f0,
                                       double c = kSpeedOfLight);

double conventional_error_index(double gamma, double f0, double tau0, const ConventionalSpec& spec,
                                double c = kSpeedOfLight);

/// rho = 2 tau0 r / (tau0^2 + r^2), r = delta_d / delta_v. Simultaneously the
/// error-index ratio, the TBP ratio and the SNR ratio of the two designs.
double design_ratio(double tau0, const ConventionalSpec& spec);

/// floor(W_max T_max / S).
long max_coexisting_radars(double w_max, double t_max, double tbp);

}  // namespace cwsradar
