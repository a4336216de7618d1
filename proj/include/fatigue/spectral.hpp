#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/damage.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

enum class Window { hann, rectangular };

Window parse_window(std::string_view name);
std::string_view to_string(Window w) noexcept;

/// Averaged-periodogram settings. segment_len == 0 picks the largest power
/// of two not exceeding a eighth of the series.
struct PsdOptions {
  std::size_t segment_len = 0;
  double overlap = 0.5;
  Window window = Window::hann;
};

/// One-sided power spectral density, load^2 / Hz.
struct PSD {
  std::vector<double> f;
  std::vector<double> G;
  // Estimator settings actually used; echoed into outputs.
  std::size_t segment_len = 0;
  std::size_t segments = 0;
  double overlap = 0.0;
  Window window = Window::hann;
};

std::size_t default_segment_len(std::size_t n_samples) noexcept;

/// Welch estimate: tapered, mean-removed, overlapping segments. The sum of
/// G over the frequency grid times df reproduces the windowed sample variance.
PSD estimate_psd(const TimeSeries& s, const PsdOptions& options = {});

/// lambda_m = integral of (2 pi f)^m G(f) df, so lambda0 is the variance and
/// lambda2, lambda4 are the variances of the first and second derivative.
struct SpectralMoments {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda4 = 0.0;

  bool is_degenerate() const noexcept { return !(lambda0 > 0.0); }
};

SpectralMoments spectral_moments(const PSD& psd);

struct BandwidthParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

BandwidthParams bandwidth_params(const SpectralMoments& m);

/// Which cycle rate multiplies the narrow-band formula.
enum class CycleRate { peak, zero_crossing };

/// Narrow-band (Rayleigh) damage rate per second. The formula is a
/// range-convention expression; amplitude-convention curves are converted
/// with SNCurve::in_range_convention first.
double narrowband_rate(const SpectralMoments& m, const SNCurve& sn,
                       CycleRate rate = CycleRate::peak);

struct BenasciuttiCorrection {
  double b = 0.0;
  double factor = 1.0;
  bool narrowband_limit = false;  // |alpha2 - 1| < 1e-9, factor taken as 1
};

BenasciuttiCorrection benasciutti_correction(const BandwidthParams& a, double k);

double benasciutti_rate(const SpectralMoments& m, const SNCurve& sn);

}  // namespace fatigue
