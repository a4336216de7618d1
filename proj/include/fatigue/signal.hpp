#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fatigue {

/// Sampled load history. Validated on construction: at least two samples,
/// strictly increasing time, finite values.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> t, std::vector<double> v, std::string label = "value");

  std::span<const double> times() const noexcept { return t_; }
  std::span<const double> values() const noexcept { return v_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return v_.size(); }
  double duration() const noexcept { return t_.back() - t_.front(); }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
  std::string label_;
};

/// Alternating extrema of a load history, with indices into the source.
class TurningPoints {
 public:
  TurningPoints(std::vector<std::size_t> idx, std::vector<double> v, std::size_t source_len);

  /// Already-alternating values taken as their own source (idx = 0..n-1).
  static TurningPoints from_values(std::vector<double> v);

  std::span<const std::size_t> indices() const noexcept { return idx_; }
  std::span<const double> values() const noexcept { return v_; }
  std::size_t source_len() const noexcept { return source_len_; }
  std::size_t size() const noexcept { return v_.size(); }

 private:
  std::vector<std::size_t> idx_;
  std::vector<double> v_;
  std::size_t source_len_;
};

/// Uniform level grid over [lo, hi] with n_levels bins.
class LevelGrid {
 public:
  LevelGrid(std::size_t n_levels, double lo, double hi);

  std::size_t n_levels() const noexcept { return n_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return (hi_ - lo_) / static_cast<double>(n_); }
  double edge(std::size_t i) const noexcept;
  double center(std::size_t bin) const noexcept;
  std::vector<double> edges() const;

  bool contains(double v) const noexcept { return v >= lo_ && v <= hi_; }
  /// Bin holding v; the right edge belongs to the last bin. Throws OutOfGrid.
  std::size_t bin_of(double v) const;

 private:
  std::size_t n_;
  double lo_;
  double hi_;
};

/// Level-index turning-point sequence (bins alternate up/down).
struct DiscreteTPSeries {
  std::vector<std::size_t> idx;   // source indices (or step numbers for simulated chains)
  std::vector<std::size_t> bins;
};

struct CsvOptions {
  // Column selector: a header name, or a 0-based index written as digits.
  std::string time_column = "0";
  std::string value_column = "1";
  char delimiter = ',';
};

TimeSeries load_series(const std::filesystem::path& path, const CsvOptions& options = {});
TimeSeries parse_series(std::string_view text, const CsvOptions& options = {},
                        const std::string& source_name = "<memory>");

TurningPoints extract_turning_points(const TimeSeries& s, double min_range = 0.0);
TurningPoints extract_turning_points(std::span<const double> values, double min_range = 0.0);

DiscreteTPSeries discretize(const TurningPoints& tp, const LevelGrid& grid);

}  // namespace fatigue
