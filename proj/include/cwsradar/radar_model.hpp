#pragma once

// Discrete dechirped FMCW observation model and the 2-D maximum-likelihood
// range/velocity estimator built on it.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cwsradar/common.hpp"

namespace cwsradar {

/// Chirp-sequence waveform. N = fs*T0 samples per chirp, M chirps, T = M*T0.
class WaveformParams {
 public:
  WaveformParams(double f0, double bandwidth, double chirp_interval, int chirp_count,
                 double sample_rate);

  double carrier() const { return f0_; }
  double bandwidth() const { return bandwidth_; }
  double chirp_interval() const { return chirp_interval_; }
  int chirp_count() const { return chirp_count_; }
  double sample_rate() const { return sample_rate_; }

  int samples_per_chirp() const { return samples_per_chirp_; }
  double duration() const { return chirp_count_ * chirp_interval_; }
  double chirp_rate() const { return bandwidth_ / chirp_interval_; }

 private:
  double f0_;
  double bandwidth_;
  double chirp_interval_;
  int chirp_count_;
  double sample_rate_;
  int samples_per_chirp_;
};

struct Scatterer {
  double range;     // m
  double velocity;  // m/s, negative = closing
  std::complex<double> reflectivity;

  void validate() const;
};

struct Scene {
  std::vector<Scatterer> scatterers;
  double noise_psd = 0.0;  // N0, W/Hz
  double amplitude = 1.0;  // A

  void validate() const;
  double noise_variance(const WaveformParams& p) const { return p.sample_rate() * noise_psd; }
};

/// N x M complex samples, rows = fast time n, columns = slow time m.
struct IfSampleGrid {
  Eigen::MatrixXcd samples;
  WaveformParams params;
};

struct Estimate {
  double range;
  double velocity;
  double f1;  // cycles/sample; wrapped to [-0.5, 0.5) unless a hint picked another alias
  double f2;  // cycles/chirp
  std::complex<double> amplitude;
};

struct BeatFrequencies {
  double beat;     // f_d, Hz
  double doppler;  // f_v, Hz
  double f1;       // (f_d + f_v) / fs, cycles/sample (not wrapped)
  double f2;       // f_v * T0, cycles/chirp (not wrapped)
  double phase;    // 4 pi f0 d / c wrapped to [0, 2 pi)
};

BeatFrequencies derive_frequencies(const Scatterer& s, const WaveformParams& p,
                                   double c = kSpeedOfLight);

/// Inverse of derive_frequencies for the (f1, f2) pair.
struct RangeVelocity {
  double range;
  double velocity;
};
RangeVelocity frequencies_to_range_velocity(double f1, double f2, const WaveformParams& p,
                                            double c = kSpeedOfLight);

/// Picks the integer alias (f1 + p, f2 + q) whose range/velocity is closest to
/// `hint`. Used when the detection stage already localizes the object to
/// within half an ambiguity interval.
RangeVelocity unwrap_to_hint(double f1, double f2, const WaveformParams& p,
                             const RangeVelocity& hint, double c = kSpeedOfLight);

/// Noise realizations are drawn from a generator seeded with `seed`; the
/// result is a pure function of (scene, params, seed).
IfSampleGrid synthesize_if_samples(const Scene& scene, const WaveformParams& p,
                                   std::uint64_t seed, double c = kSpeedOfLight);

/// Signal-only part of synthesize_if_samples.
Eigen::MatrixXcd noiseless_if_samples(const Scene& scene, const WaveformParams& p,
                                      double c = kSpeedOfLight);

/// |alpha|^2 A^2 T / N0. Throws DomainError ("infinite SNR") when N0 == 0.
double snr_after_mf(const Scatterer& s, const Scene& scene, const WaveformParams& p);

/// |alpha| that produces post-MF SNR `gamma` for the given amplitude, duration and N0.
double reflectivity_for_snr(double gamma, double amplitude, double duration, double noise_psd);

/// Unnormalized forward 2-D DFT: Y[k,l] = sum_n sum_m y[n,m] e^{-j2pi(kn/N + lm/M)}.
Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& samples);

struct MleOptions {
  double tolerance = 1e-6;  // cycles/sample for golden-section refinement
  int sweeps = 3;           // alternating f1/f2 refinement passes
  std::optional<RangeVelocity> hint;  // alias resolution; wrap to [-0.5, 0.5) if absent
  double speed_of_light = kSpeedOfLight;
};

/// K largest 2-D periodogram peaks, each refined to the local maximum of
/// |sum y e^{-j2pi(f1 n + f2 m)}| within +-1 bin. Throws DomainError if fewer
/// than K local maxima exist.
std::vector<Estimate> mle_estimate(const IfSampleGrid& grid, int k,
                                   const MleOptions& options = {});

/// Index of the estimate with the smallest positive time-to-collision, or
/// nullopt when no estimate is closing.
std::optional<std::size_t> select_critical_scatterer(const std::vector<Estimate>& estimates);

}  // namespace cwsradar
