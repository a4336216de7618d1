#include "fatigue/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fatigue/error.hpp"
#include "fftw_lock.hpp"

namespace fatigue {

Window parse_window(std::string_view name) {
  if (name == "hann" || name == "hanning" || name == "cosine-bell") return Window::hann;
  if (name == "rect" || name == "rectangular" || name == "boxcar") return Window::rectangular;
  fail(ErrorCode::invalid_argument, "unknown window '" + std::string(name) + "'");
}

std::string_view to_string(Window w) noexcept {
  return w == Window::hann ? "hann" : "rectangular";
}

std::size_t default_segment_len(std::size_t n_samples) noexcept {
  const std::size_t target = std::max<std::size_t>(n_samples / 8, 2);
  std::size_t p = 1;
  while (p * 2 <= target) p *= 2;
  return std::min(p, n_samples);
}

namespace {

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    in_ = fftw_alloc_real(n_);
    out_ = fftw_alloc_complex(n_ / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() noexcept { return in_; }
  void execute() noexcept { fftw_execute(plan_); }
  double power(std::size_t k) const noexcept {
    return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::hann && n > 1) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
  }
  return out;
}

double sampling_interval(const TimeSeries& s) {
  const auto t = s.times();
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * dt) {
      std::ostringstream os;
      os << "sample spacing at " << i << " deviates from mean dt " << dt;
      fail(ErrorCode::non_uniform_sampling, os.str());
    }
  }
  return dt;
}

}  // namespace

PSD estimate_psd(const TimeSeries& s, const PsdOptions& options) {
  const std::size_t n = s.size();
  const std::size_t seg = options.segment_len == 0 ? default_segment_len(n) : options.segment_len;
  if (seg < 2) fail(ErrorCode::invalid_argument, "PSD segment length must be >= 2");
  if (seg > n)
    fail(ErrorCode::segment_too_long,
         "segment length " + std::to_string(seg) + " exceeds series length " + std::to_string(n));
  if (!(options.overlap >= 0.0 && options.overlap < 1.0))
    fail(ErrorCode::invalid_argument, "PSD overlap must lie in [0, 1)");

  const double dt = sampling_interval(s);
  const double fs = 1.0 / dt;
  const auto step = std::max<std::size_t>(
      1, seg - static_cast<std::size_t>(std::llround(options.overlap * static_cast<double>(seg))));
  const auto w = make_window(options.window, seg);
  double w2 = 0.0;
  for (double x : w) w2 += x * x;

  const std::size_t n_freq = seg / 2 + 1;
  PSD psd;
  psd.segment_len = seg;
  psd.overlap = options.overlap;
  psd.window = options.window;
  psd.f.resize(n_freq);
  psd.G.assign(n_freq, 0.0);
  for (std::size_t k = 0; k < n_freq; ++k)
    psd.f[k] = static_cast<double>(k) * fs / static_cast<double>(seg);

  RealFft fft(seg);
  const auto v = s.values();
  for (std::size_t start = 0; start + seg <= n; start += step) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += v[start + i];
    mean /= static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) fft.input()[i] = (v[start + i] - mean) * w[i];
    fft.execute();
    for (std::size_t k = 0; k < n_freq; ++k) {
      const bool unpaired = k == 0 || (seg % 2 == 0 && k == seg / 2);
      psd.G[k] += (unpaired ? 1.0 : 2.0) * fft.power(k) / (fs * w2);
    }
    ++psd.segments;
  }
  for (auto& g : psd.G) g /= static_cast<double>(psd.segments);
  return psd;
}

SpectralMoments spectral_moments(const PSD& psd) {
  if (psd.f.empty() || psd.f.size() != psd.G.size())
    fail(ErrorCode::empty_input, "spectral moments need a non-empty PSD");
  SpectralMoments m;
  const double two_pi = 2.0 * std::numbers::pi;
  auto integrand = [&](std::size_t i, int order) {
    return std::pow(two_pi * psd.f[i], order) * psd.G[i];
  };
  for (std::size_t i = 0; i + 1 < psd.f.size(); ++i) {
    const double df = psd.f[i + 1] - psd.f[i];
    m.lambda0 += 0.5 * df * (integrand(i, 0) + integrand(i + 1, 0));
    m.lambda1 += 0.5 * df * (integrand(i, 1) + integrand(i + 1, 1));
    m.lambda2 += 0.5 * df * (integrand(i, 2) + integrand(i + 1, 2));
    m.lambda4 += 0.5 * df * (integrand(i, 4) + integrand(i + 1, 4));
  }
  return m;
}

BandwidthParams bandwidth_params(const SpectralMoments& m) {
  if (!(m.lambda0 > 0.0) || !(m.lambda2 > 0.0) || !(m.lambda4 > 0.0))
    fail(ErrorCode::degenerate_signal, "bandwidth parameters need lambda0, lambda2, lambda4 > 0");
  return {m.lambda1 / std::sqrt(m.lambda0 * m.lambda2),
          m.lambda2 / std::sqrt(m.lambda0 * m.lambda4)};
}

double narrowband_rate(const SpectralMoments& m, const SNCurve& sn, CycleRate rate) {
  sn.validate();
  if (!(m.lambda2 > 0.0)) fail(ErrorCode::degenerate_signal, "narrow-band rate needs lambda2 > 0");
  if (!(m.lambda0 >= 0.0) || !(m.lambda4 >= 0.0))
    fail(ErrorCode::degenerate_signal, "negative spectral moment");
  const SNCurve r = sn.in_range_convention();
  const double cycles_per_second =
      rate == CycleRate::peak ? std::sqrt(m.lambda4 / m.lambda2) / (2.0 * std::numbers::pi)
                              : std::sqrt(m.lambda2 / m.lambda0) / (2.0 * std::numbers::pi);
  return cycles_per_second / r.K * std::pow(2.0 * std::sqrt(2.0 * m.lambda0), r.k) *
         std::tgamma(1.0 + r.k / 2.0);
}

BenasciuttiCorrection benasciutti_correction(const BandwidthParams& a, double k) {
  BenasciuttiCorrection c;
  if (std::abs(a.alpha2 - 1.0) < 1e-9) {
    c.narrowband_limit = true;
    return c;
  }
  const double a1 = a.alpha1, a2 = a.alpha2;
  c.b = (a1 - a2) * (1.112 * (1.0 + a1 * a2 - (a1 + a2)) * std::exp(2.11 * a2) + (a1 - a2)) /
        ((a2 - 1.0) * (a2 - 1.0));
  c.factor = c.b + (1.0 - c.b) * std::pow(a2, k + 1.0);
  return c;
}

double benasciutti_rate(const SpectralMoments& m, const SNCurve& sn) {
  const auto a = bandwidth_params(m);
  const auto c = benasciutti_correction(a, sn.k);
  if (c.factor < 0.0 || c.factor > 1.0) {
    std::ostringstream os;
    os << "Benasciutti correction factor " << c.factor << " outside [0, 1] (alpha1=" << a.alpha1
       << ", alpha2=" << a.alpha2 << ")";
    warn(os.str());
  }
  return narrowband_rate(m, sn) * c.factor;
}

}  // namespace fatigue
