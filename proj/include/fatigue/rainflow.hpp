#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fatigue/signal.hpp"

namespace fatigue {

/// A counted fatigue cycle. weight is 1.0 for a closed loop, 0.5 for a
/// residual half cycle. start_idx/end_idx are the source indices of the two
/// extrema forming the cycle; damage is attributed to end_idx.
struct Cycle {
  double amplitude = 0.0;
  double mean = 0.0;
  double weight = 1.0;
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;

  double range() const noexcept { return 2.0 * amplitude; }
  double min() const noexcept { return mean - amplitude; }
  double max() const noexcept { return mean + amplitude; }
};

/// Four-point rainflow counting. Closed loops are emitted as they close;
/// the residual follows as half cycles, one per flank.
std::vector<Cycle> count_cycles(const TurningPoints& tp);

/// Cycle counts binned by (min level, max level). Strictly upper triangular.
class RainflowMatrix {
 public:
  explicit RainflowMatrix(LevelGrid grid);

  const LevelGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.n_levels(); }
  double at(std::size_t min_bin, std::size_t max_bin) const;
  void add(std::size_t min_bin, std::size_t max_bin, double weight);
  double total() const noexcept;
  const std::vector<double>& dense() const noexcept { return counts_; }

  /// Weight of cycles whose min and max fell into the same bin; such
  /// cycles cannot be represented and are left out of the matrix.
  double dropped_weight() const noexcept { return dropped_; }
  void add_dropped(double w) noexcept { dropped_ += w; }

 private:
  LevelGrid grid_;
  std::vector<double> counts_;  // row-major, row = min bin
  double dropped_ = 0.0;
};

RainflowMatrix build_rfm(const std::vector<Cycle>& cycles, const LevelGrid& grid);

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<double> counts;  // weighted
  double total() const noexcept;
};

/// Weighted (amplitude, mean) histograms over the observed ranges.
std::pair<Histogram, Histogram> histograms(const std::vector<Cycle>& cycles, std::size_t n_bins);

}  // namespace fatigue
