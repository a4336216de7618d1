#include "fatigue/synth.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fatigue/error.hpp"
#include "fatigue/rng.hpp"
#include "fftw_lock.hpp"

namespace fatigue {

namespace synth {

namespace {

std::vector<double> time_axis(double fs, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / fs;
  return t;
}

void check_rate(double fs, std::size_t n) {
  if (!(fs > 0.0) || !std::isfinite(fs)) fail(ErrorCode::domain_error, "sampling rate must be > 0");
  if (n < 2) fail(ErrorCode::too_few_samples, "synthetic series needs at least 2 samples");
}

}  // namespace

TimeSeries sine(double amp, double freq, double fs, double duration, double phase) {
  if (!(duration > 0.0)) fail(ErrorCode::domain_error, "duration must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  check_rate(fs, n);
  auto t = time_axis(fs, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = amp * std::sin(2.0 * std::numbers::pi * freq * t[i] + phase);
  return TimeSeries(std::move(t), std::move(v), "sine");
}

TimeSeries white_noise(double fs, std::size_t n_samples, std::uint64_t seed) {
  check_rate(fs, n_samples);
  Rng rng(seed);
  std::vector<double> v(n_samples);
  for (auto& x : v) x = rng.normal();
  return TimeSeries(time_axis(fs, n_samples), std::move(v), "white_noise");
}

TimeSeries band_noise(double center, double bandwidth, double fs, std::size_t n_samples,
                      double stddev, std::uint64_t seed) {
  check_rate(fs, n_samples);
  if (!(bandwidth > 0.0) || !(center - bandwidth / 2.0 >= 0.0) || !(center + bandwidth / 2.0 <= fs / 2.0))
    fail(ErrorCode::domain_error, "band must lie within [0, fs/2] and have positive width");
  if (!(stddev > 0.0)) fail(ErrorCode::domain_error, "stddev must be > 0");

  Rng rng(seed);
  const std::size_t n = n_samples;
  const std::size_t n_freq = n / 2 + 1;
  double* x = nullptr;
  fftw_complex* X = nullptr;
  fftw_plan fwd = nullptr, inv = nullptr;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    x = fftw_alloc_real(n);
    X = fftw_alloc_complex(n_freq);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x, X, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), X, x, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
  fftw_execute(fwd);
  const double lo = center - bandwidth / 2.0, hi = center + bandwidth / 2.0;
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n_freq; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < lo || f > hi || k == 0) {
      X[k][0] = 0.0;
      X[k][1] = 0.0;
    } else {
      ++kept;
    }
  }
  fftw_execute(inv);
  std::vector<double> v(x, x + n);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(x);
    fftw_free(X);
  }
  if (kept == 0) fail(ErrorCode::domain_error, "band contains no frequency bins at this resolution");

  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double s : v) var += (s - mean) * (s - mean);
  var /= static_cast<double>(n);
  const double scale = stddev / std::sqrt(var);
  for (auto& s : v) s = (s - mean) * scale;
  return TimeSeries(time_axis(fs, n), std::move(v), "band_noise");
}

}  // namespace synth
}  // namespace fatigue
