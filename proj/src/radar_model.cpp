#include "cwsradar/radar_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <tuple>

#include <boost/random/normal_distribution.hpp>
#include <fftw3.h>

namespace cwsradar {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_unit(double f) {
  // [-0.5, 0.5)
  double w = f - std::floor(f + 0.5);
  return w;
}

// FFTW planning is not thread safe; execution with new-array calls is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

class Dft2Plan {
 public:
  Dft2Plan(int n, int m) : n_(n), m_(m) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * m));
    // Column-major N x M: M rows of contiguous length-N chirps.
    plan_ = fftw_plan_dft_2d(m, n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Dft2Plan() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  Dft2Plan(const Dft2Plan&) = delete;
  Dft2Plan& operator=(const Dft2Plan&) = delete;

  Eigen::MatrixXcd run(const Eigen::MatrixXcd& x) {
    std::memcpy(buffer_, x.data(), sizeof(fftw_complex) * n_ * m_);
    fftw_execute(plan_);
    Eigen::MatrixXcd out(n_, m_);
    std::memcpy(static_cast<void*>(out.data()), buffer_, sizeof(fftw_complex) * n_ * m_);
    return out;
  }

 private:
  int n_;
  int m_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Dft2Plan& plan_for(int n, int m) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Dft2Plan>> cache;
  auto& slot = cache[{n, m}];
  if (!slot) slot = std::make_unique<Dft2Plan>(n, m);
  return *slot;
}

// |sum_n z[n] e^{-j2pi f n}| by Horner recurrence.
double dtft_magnitude(const Eigen::VectorXcd& z, double f) {
  const std::complex<double> w = std::polar(1.0, -kTwoPi * f);
  std::complex<double> acc{0.0, 0.0};
  for (Eigen::Index i = z.size() - 1; i >= 0; --i) acc = acc * w + z[i];
  return std::abs(acc);
}

Eigen::VectorXcd steering(int len, double f) {
  Eigen::VectorXcd e(len);
  for (int i = 0; i < len; ++i) e[i] = std::polar(1.0, -kTwoPi * wrap_unit(f * i));
  return e;
}

template <typename F>
double golden_maximize(F&& objective, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double g1 = objective(x1);
  double g2 = objective(x2);
  while (b - a > tol) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + inv_phi * (b - a);
      g2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - inv_phi * (b - a);
      g1 = objective(x1);
    }
  }
  return 0.5 * (a + b);
}

double parabolic_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

WaveformParams::WaveformParams(double f0, double bandwidth, double chirp_interval,
                               int chirp_count, double sample_rate)
    : f0_(f0),
      bandwidth_(bandwidth),
      chirp_interval_(chirp_interval),
      chirp_count_(chirp_count),
      sample_rate_(sample_rate) {
  if (!(f0 > 0.0)) throw InvalidArgument("WaveformParams: carrier f0 must be positive");
  if (!(bandwidth > 0.0)) throw InvalidArgument("WaveformParams: bandwidth must be positive");
  if (!(chirp_interval > 0.0))
    throw InvalidArgument("WaveformParams: chirp interval T0 must be positive");
  if (chirp_count < 1) throw InvalidArgument("WaveformParams: chirp count M must be >= 1");
  if (!(sample_rate > 0.0)) throw InvalidArgument("WaveformParams: sample rate must be positive");
  const double n = sample_rate * chirp_interval;
  const double rounded = std::round(n);
  if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw InvalidArgument("WaveformParams: fs*T0 = " + std::to_string(n) +
                          " is not a positive integer");
  samples_per_chirp_ = static_cast<int>(rounded);
}

void Scatterer::validate() const {
  if (!(range > 0.0)) throw InvalidArgument("Scatterer: range must be positive");
  if (!(std::abs(reflectivity) > 0.0))
    throw InvalidArgument("Scatterer: reflectivity must be nonzero");
}

void Scene::validate() const {
  if (scatterers.empty()) throw InvalidArgument("Scene: at least one scatterer required");
  if (!(noise_psd >= 0.0)) throw InvalidArgument("Scene: noise PSD must be >= 0");
  if (!(amplitude > 0.0)) throw InvalidArgument("Scene: amplitude must be positive");
  for (const auto& s : scatterers) s.validate();
}

BeatFrequencies derive_frequencies(const Scatterer& s, const WaveformParams& p, double c) {
  BeatFrequencies out{};
  out.beat = 2.0 * p.chirp_rate() * s.range / c;
  out.doppler = 2.0 * p.carrier() * s.velocity / c;
  out.f1 = (out.beat + out.doppler) / p.sample_rate();
  out.f2 = out.doppler * p.chirp_interval();
  out.phase = std::fmod(4.0 * kPi * p.carrier() * s.range / c, kTwoPi);
  if (out.phase < 0.0) out.phase += kTwoPi;
  return out;
}

RangeVelocity frequencies_to_range_velocity(double f1, double f2, const WaveformParams& p,
                                            double c) {
  // d = (c/2)(N f1 - f2)/W,  v = c f2 / (2 f0 T0)
  const double n = p.samples_per_chirp();
  return {0.5 * c * (n * f1 - f2) / p.bandwidth(),
          0.5 * c * f2 / (p.carrier() * p.chirp_interval())};
}

RangeVelocity unwrap_to_hint(double f1, double f2, const WaveformParams& p,
                             const RangeVelocity& hint, double c) {
  const auto target = derive_frequencies(Scatterer{hint.range, hint.velocity, 1.0}, p, c);
  const double f2u = f2 + std::round(target.f2 - f2);
  const double f1u = f1 + std::round(target.f1 - f1);
  return frequencies_to_range_velocity(f1u, f2u, p, c);
}

Eigen::MatrixXcd noiseless_if_samples(const Scene& scene, const WaveformParams& p, double c) {
  const int n = p.samples_per_chirp();
  const int m = p.chirp_count();
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, m);
  for (const auto& s : scene.scatterers) {
    const auto fr = derive_frequencies(s, p, c);
    const std::complex<double> coeff =
        scene.amplitude * std::conj(s.reflectivity) * std::polar(1.0, fr.phase);
    Eigen::VectorXcd fast(n);
    for (int i = 0; i < n; ++i) fast[i] = std::polar(1.0, kTwoPi * wrap_unit(fr.f1 * i));
    Eigen::RowVectorXcd slow(m);
    for (int j = 0; j < m; ++j) slow[j] = coeff * std::polar(1.0, kTwoPi * wrap_unit(fr.f2 * j));
    y.noalias() += fast * slow;
  }
  return y;
}

IfSampleGrid synthesize_if_samples(const Scene& scene, const WaveformParams& p,
                                   std::uint64_t seed, double c) {
  scene.validate();
  if (static_cast<long long>(p.samples_per_chirp()) * p.chirp_count() == 0)
    throw InvalidArgument("synthesize_if_samples: empty grid");
  IfSampleGrid grid{noiseless_if_samples(scene, p, c), p};
  const double variance = scene.noise_variance(p);
  if (variance > 0.0) {
    std::mt19937_64 engine(seed);
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    std::complex<double>* data = grid.samples.data();
    const Eigen::Index total = grid.samples.size();
    for (Eigen::Index i = 0; i < total; ++i) {
      const double re = normal(engine);
      const double im = normal(engine);
      data[i] += std::complex<double>(re, im);
    }
  }
  return grid;
}

double snr_after_mf(const Scatterer& s, const Scene& scene, const WaveformParams& p) {
  if (scene.noise_psd == 0.0) throw DomainError("snr_after_mf: infinite SNR (noise PSD is zero)");
  return std::norm(s.reflectivity) * scene.amplitude * scene.amplitude * p.duration() /
         scene.noise_psd;
}

double reflectivity_for_snr(double gamma, double amplitude, double duration, double noise_psd) {
  if (!(gamma > 0.0) || !(amplitude > 0.0) || !(duration > 0.0) || !(noise_psd > 0.0))
    throw InvalidArgument("reflectivity_for_snr: arguments must be positive");
  return std::sqrt(gamma * noise_psd / (amplitude * amplitude * duration));
}

Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& samples) {
  return plan_for(static_cast<int>(samples.rows()), static_cast<int>(samples.cols()))
      .run(samples);
}

std::vector<Estimate> mle_estimate(const IfSampleGrid& grid, int k, const MleOptions& options) {
  if (k < 1) throw InvalidArgument("mle_estimate: K must be >= 1");
  const Eigen::MatrixXcd& y = grid.samples;
  const int n = static_cast<int>(y.rows());
  const int m = static_cast<int>(y.cols());
  const Eigen::MatrixXd power = dft2(y).cwiseAbs2();

  struct Peak {
    double value;
    int row;
    int col;
  };
  std::vector<Peak> peaks;
  if (k == 1) {
    // The global maximum is always a local one; scanning in (row, col) order
    // keeps the lowest bin among equal values.
    Peak best{-1.0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (power(i, j) > best.value) best = {power(i, j), i, j};
    peaks.push_back(best);
  }
  for (int j = 0; j < m && k > 1; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = power(i, j);
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = (i + di + n) % n;
          const int jj = (j + dj + m) % m;
          if (ii == i && jj == j) continue;
          if (power(ii, jj) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({v, i, j});
    }
  }
  if (static_cast<int>(peaks.size()) < k)
    throw DomainError("mle_estimate: found " + std::to_string(peaks.size()) +
                      " local maxima, fewer than K = " + std::to_string(k));
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });

  std::vector<Estimate> out;
  out.reserve(k);
  for (int p = 0; p < k; ++p) {
    const Peak& pk = peaks[p];
    const auto mag = [&](int i, int j) { return std::sqrt(power((i + n) % n, (j + m) % m)); };
    const double d1 = n > 2 ? parabolic_offset(mag(pk.row - 1, pk.col), mag(pk.row, pk.col),
                                               mag(pk.row + 1, pk.col))
                            : 0.0;
    const double d2 = m > 2 ? parabolic_offset(mag(pk.row, pk.col - 1), mag(pk.row, pk.col),
                                               mag(pk.row, pk.col + 1))
                            : 0.0;
    double f1 = (pk.row + d1) / n;
    double f2 = (pk.col + d2) / m;
    const double lo1 = (pk.row - 1.0) / n, hi1 = (pk.row + 1.0) / n;
    const double lo2 = (pk.col - 1.0) / m, hi2 = (pk.col + 1.0) / m;

    for (int sweep = 0; sweep < options.sweeps; ++sweep) {
      const double prev1 = f1, prev2 = f2;
      if (n > 1) {
        const Eigen::VectorXcd z = y * steering(m, f2);
        f1 = golden_maximize([&](double f) { return dtft_magnitude(z, f); }, lo1, hi1,
                             options.tolerance);
      }
      if (m > 1) {
        const Eigen::VectorXcd w = (steering(n, f1).transpose() * y).transpose();
        f2 = golden_maximize([&](double f) { return dtft_magnitude(w, f); }, lo2, hi2,
                             options.tolerance);
      }
      if (std::abs(f1 - prev1) < options.tolerance && std::abs(f2 - prev2) < options.tolerance)
        break;
    }

    const std::complex<double> amp =
        (steering(n, f1).transpose() * y * steering(m, f2))(0, 0) / static_cast<double>(n * m);
    f1 = wrap_unit(f1);
    f2 = wrap_unit(f2);
    if (options.hint) {
      const auto t = derive_frequencies(
          Scatterer{options.hint->range, options.hint->velocity, 1.0}, grid.params,
          options.speed_of_light);
      f2 += std::round(t.f2 - f2);
      f1 += std::round(t.f1 - f1);
    }
    const RangeVelocity rv =
        frequencies_to_range_velocity(f1, f2, grid.params, options.speed_of_light);
    out.push_back({rv.range, rv.velocity, f1, f2, amp});
  }
  return out;
}

std::optional<std::size_t> select_critical_scatterer(const std::vector<Estimate>& estimates) {
  std::optional<std::size_t> best;
  double best_ttc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    if (!(e.velocity < 0.0) || !(e.range > 0.0)) continue;
    const double ttc = -e.range / e.velocity;
    if (!best || ttc < best_ttc) {
      best = i;
      best_ttc = ttc;
    }
  }
  return best;
}

}  // namespace cwsradar
