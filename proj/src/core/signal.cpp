#include "fatigue/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fatigue/error.hpp"

namespace fatigue {

TimeSeries::TimeSeries(std::vector<double> t, std::vector<double> v, std::string label)
    : t_(std::move(t)), v_(std::move(v)), label_(std::move(label)) {
  if (t_.size() != v_.size())
    fail(ErrorCode::invalid_argument, "time and value arrays differ in length");
  if (v_.size() < 2)
    fail(ErrorCode::too_few_samples, "a series needs at least 2 samples, got " +
                                         std::to_string(v_.size()));
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(v_[i]))
      fail(ErrorCode::non_finite_value, "sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(t_[i] > t_[i - 1]))
      fail(ErrorCode::non_monotone_time,
           "time is not strictly increasing at sample " + std::to_string(i));
  }
}

TurningPoints::TurningPoints(std::vector<std::size_t> idx, std::vector<double> v,
                             std::size_t source_len)
    : idx_(std::move(idx)), v_(std::move(v)), source_len_(source_len) {
  if (idx_.size() != v_.size())
    fail(ErrorCode::invalid_argument, "turning point index/value length mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!std::isfinite(v_[i]))
      fail(ErrorCode::non_finite_value, "turning point " + std::to_string(i));
    if (idx_[i] >= source_len_)
      fail(ErrorCode::index_out_of_range, "turning point index beyond source length");
    if (i > 0 && idx_[i] <= idx_[i - 1])
      fail(ErrorCode::invalid_argument, "turning point indices must increase");
    if (i > 0 && v_[i] == v_[i - 1])
      fail(ErrorCode::invalid_argument, "consecutive turning points are equal");
    if (i > 1 && (v_[i] - v_[i - 1]) * (v_[i - 1] - v_[i - 2]) > 0)
      fail(ErrorCode::invalid_argument, "turning points do not alternate at " + std::to_string(i));
  }
}

TurningPoints TurningPoints::from_values(std::vector<double> v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto n = v.size();
  return TurningPoints(std::move(idx), std::move(v), n);
}

LevelGrid::LevelGrid(std::size_t n_levels, double lo, double hi) : n_(n_levels), lo_(lo), hi_(hi) {
  if (n_ == 0) fail(ErrorCode::invalid_argument, "level grid needs at least one level");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    fail(ErrorCode::invalid_argument, "level grid requires finite lo < hi");
}

double LevelGrid::edge(std::size_t i) const noexcept {
  if (i >= n_) return hi_;
  return lo_ + width() * static_cast<double>(i);
}

double LevelGrid::center(std::size_t bin) const noexcept {
  return lo_ + width() * (static_cast<double>(bin) + 0.5);
}

std::vector<double> LevelGrid::edges() const {
  std::vector<double> e(n_ + 1);
  for (std::size_t i = 0; i <= n_; ++i) e[i] = edge(i);
  return e;
}

std::size_t LevelGrid::bin_of(double v) const {
  if (!contains(v)) {
    std::ostringstream os;
    os << "value " << v << " outside grid [" << lo_ << ", " << hi_ << "]";
    fail(ErrorCode::out_of_grid, os.str());
  }
  const auto b = static_cast<std::size_t>(std::floor((v - lo_) / width()));
  return std::min(b, n_ - 1);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool is_index(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string_view>& header,
                           const std::string& source) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == spec) return i;
  if (is_index(spec)) return static_cast<std::size_t>(std::stoul(spec));
  fail(ErrorCode::column_not_found, source + ": no column named '" + spec + "'");
}

}  // namespace

TimeSeries parse_series(std::string_view text, const CsvOptions& options,
                        const std::string& source_name) {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<std::string_view> header;
  std::size_t tcol = 0, vcol = 0;
  bool columns_resolved = false;
  std::size_t line_no = 0;
  std::string label = options.value_column;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, options.delimiter);
    if (!columns_resolved) {
      double probe = 0.0;
      const bool numeric =
          std::all_of(fields.begin(), fields.end(), [&](auto f) { return parse_double(f, probe); });
      if (!numeric) header = fields;
      tcol = resolve_column(options.time_column, header, source_name);
      vcol = resolve_column(options.value_column, header, source_name);
      if (!header.empty() && vcol < header.size()) label = std::string(header[vcol]);
      columns_resolved = true;
      if (!numeric) continue;
    }

    const auto where = source_name + " line " + std::to_string(line_no);
    if (std::max(tcol, vcol) >= fields.size())
      fail(ErrorCode::malformed_row, where + ": expected at least " +
                                         std::to_string(std::max(tcol, vcol) + 1) + " fields");
    double tv = 0.0, vv = 0.0;
    if (!parse_double(fields[tcol], tv) || !parse_double(fields[vcol], vv))
      fail(ErrorCode::malformed_row, where + ": cannot parse numeric fields");
    if (!std::isfinite(tv) || !std::isfinite(vv))
      fail(ErrorCode::non_finite_value, where);
    if (!t.empty() && !(tv > t.back()))
      fail(ErrorCode::non_monotone_time, where + ": time " + std::string(fields[tcol]) +
                                             " does not increase");
    t.push_back(tv);
    v.push_back(vv);
  }
  if (v.size() < 2)
    fail(ErrorCode::too_few_samples, source_name + ": need at least 2 samples");
  return TimeSeries(std::move(t), std::move(v), std::move(label));
}

TimeSeries load_series(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series(buf.str(), options, path.string());
}

namespace {

struct Point {
  std::size_t idx;
  double v;
};

// Appends p while keeping the stack strictly alternating: equal values are
// dropped (first index wins), monotone continuations replace the top.
void push_alternating(std::vector<Point>& st, const Point& p) {
  if (!st.empty() && p.v == st.back().v) return;
  if (st.size() >= 2) {
    const double dir = st.back().v - st[st.size() - 2].v;
    if ((p.v - st.back().v) * dir > 0) {
      st.back() = p;
      return;
    }
  }
  st.push_back(p);
}

TurningPoints extract(std::span<const double> values, double min_range) {
  if (!(min_range >= 0.0)) fail(ErrorCode::invalid_argument, "min_range must be >= 0");
  std::vector<Point> st;
  for (std::size_t i = 0; i < values.size(); ++i) {
    push_alternating(st, {i, values[i]});
    // Interior pairs (neither endpoint) below min_range are deleted.
    while (min_range > 0.0 && st.size() >= 4) {
      const auto& a = st[st.size() - 3];
      const auto& b = st[st.size() - 2];
      if (std::abs(b.v - a.v) >= min_range) break;
      const Point top = st.back();
      st.resize(st.size() - 3);
      push_alternating(st, top);
    }
  }
  std::vector<std::size_t> idx;
  std::vector<double> v;
  idx.reserve(st.size());
  v.reserve(st.size());
  for (const auto& p : st) {
    idx.push_back(p.idx);
    v.push_back(p.v);
  }
  return TurningPoints(std::move(idx), std::move(v), values.size());
}

}  // namespace

TurningPoints extract_turning_points(const TimeSeries& s, double min_range) {
  return extract(s.values(), min_range);
}

TurningPoints extract_turning_points(std::span<const double> values, double min_range) {
  if (values.empty()) fail(ErrorCode::empty_input, "no samples");
  return extract(values, min_range);
}

DiscreteTPSeries discretize(const TurningPoints& tp, const LevelGrid& grid) {
  std::vector<Point> st;
  const auto vals = tp.values();
  const auto idx = tp.indices();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!grid.contains(vals[i]))
      fail(ErrorCode::out_of_grid, "turning point " + std::to_string(i) + " outside level grid");
    push_alternating(st, {idx[i], static_cast<double>(grid.bin_of(vals[i]))});
  }
  DiscreteTPSeries out;
  for (const auto& p : st) {
    out.idx.push_back(p.idx);
    out.bins.push_back(static_cast<std::size_t>(p.v));
  }
  return out;
}

}  // namespace fatigue
