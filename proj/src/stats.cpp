#include "cwsradar/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cwsradar {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KsResult ks_gaussianity_check(std::span<const double> samples, double sigma2) {
  if (samples.size() < 100) throw InvalidArgument("ks_gaussianity_check: need at least 100 samples");
  if (!(sigma2 > 0.0)) throw InvalidArgument("ks_gaussianity_check: variance must be positive");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double sd = std::sqrt(sigma2);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i] / sd);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, d > 1.358 / std::sqrt(n)};
}

std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need n >= 1");
  std::vector<std::pair<double, double>> out(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    out[i] = {mid - half * z, half * w};
    out[n - 1 - i] = {mid + half * z, half * w};
  }
  return out;
}

MeanVar mean_variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("mean_variance: need at least 2 samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, ss / (x.size() - 1)};
}

}  // namespace cwsradar
