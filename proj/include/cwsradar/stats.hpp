#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cwsradar/common.hpp"

namespace cwsradar {

double normal_cdf(double x);

struct KsResult {
  double statistic;
  bool reject;  // statistic > 1.358 / sqrt(n)
};

/// One-sample Kolmogorov-Smirnov test against N(0, sigma2) at the 5% level
/// (asymptotic critical value). Needs at least 100 samples.
KsResult ks_gaussianity_check(std::span<const double> samples, double sigma2);

/// Gauss-Legendre nodes and weights on [a, b].
std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b);

struct MeanVar {
  double mean;
  double variance;  // unbiased
};
MeanVar mean_variance(std::span<const double> x);

}  // namespace cwsradar
