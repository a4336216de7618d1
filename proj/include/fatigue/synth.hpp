#pragma once

#include <cstddef>
#include <cstdint>

#include "fatigue/signal.hpp"

namespace fatigue::synth {

/// amp * sin(2 pi freq t + phase), sampled at fs for duration seconds
/// (round(duration * fs) samples starting at t = 0).
TimeSeries sine(double amp, double freq, double fs, double duration, double phase = 0.0);

/// Gaussian noise band-limited to [center - bandwidth/2, center + bandwidth/2]
/// by zeroing FFT bins outside the band, rescaled to the requested standard
/// deviation. Deterministic for a given seed.
TimeSeries band_noise(double center, double bandwidth, double fs, std::size_t n_samples,
                      double stddev, std::uint64_t seed);

/// Unit-variance white Gaussian noise.
TimeSeries white_noise(double fs, std::size_t n_samples, std::uint64_t seed);

}  // namespace fatigue::synth
