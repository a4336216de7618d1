#include "fatigue/rainflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fatigue/error.hpp"

namespace fatigue {

namespace {

Cycle make_cycle(double a, double b, std::size_t ia, std::size_t ib, double weight) {
  Cycle c;
  c.amplitude = std::abs(b - a) / 2.0;
  c.mean = (a + b) / 2.0;
  c.weight = weight;
  c.start_idx = std::min(ia, ib);
  c.end_idx = std::max(ia, ib);
  return c;
}

}  // namespace

std::vector<Cycle> count_cycles(const TurningPoints& tp) {
  std::vector<Cycle> cycles;
  if (tp.size() < 2) return cycles;
  const auto v = tp.values();
  const auto idx = tp.indices();

  // Stack of positions into tp; a loop B-C closes when its range is
  // strictly inside the previous flank and no larger than the next one.
  // Ties with the previous flank stay in the residual as two half cycles,
  // which is what the start-point rule of the three-point method yields.
  std::vector<std::size_t> st;
  st.reserve(tp.size());
  for (std::size_t i = 0; i < tp.size(); ++i) {
    st.push_back(i);
    while (st.size() >= 4) {
      const auto n = st.size();
      const double ab = std::abs(v[st[n - 3]] - v[st[n - 4]]);
      const double bc = std::abs(v[st[n - 2]] - v[st[n - 3]]);
      const double cd = std::abs(v[st[n - 1]] - v[st[n - 2]]);
      if (bc >= ab || bc > cd) break;
      const auto b = st[n - 3], c = st[n - 2];
      cycles.push_back(make_cycle(v[b], v[c], idx[b], idx[c], 1.0));
      st.erase(st.end() - 3, st.end() - 1);
    }
  }
  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    const auto a = st[i], b = st[i + 1];
    cycles.push_back(make_cycle(v[a], v[b], idx[a], idx[b], 0.5));
  }
  return cycles;
}

RainflowMatrix::RainflowMatrix(LevelGrid grid)
    : grid_(grid), counts_(grid.n_levels() * grid.n_levels(), 0.0) {}

double RainflowMatrix::at(std::size_t min_bin, std::size_t max_bin) const {
  if (min_bin >= size() || max_bin >= size())
    fail(ErrorCode::index_out_of_range, "rainflow matrix index");
  return counts_[min_bin * size() + max_bin];
}

void RainflowMatrix::add(std::size_t min_bin, std::size_t max_bin, double weight) {
  if (min_bin >= size() || max_bin >= size())
    fail(ErrorCode::index_out_of_range, "rainflow matrix index");
  if (max_bin <= min_bin)
    fail(ErrorCode::invalid_argument, "rainflow matrix entries must lie above the diagonal");
  if (!(weight >= 0.0)) fail(ErrorCode::invalid_argument, "negative cycle count");
  counts_[min_bin * size() + max_bin] += weight;
}

double RainflowMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

RainflowMatrix build_rfm(const std::vector<Cycle>& cycles, const LevelGrid& grid) {
  RainflowMatrix rfm(grid);
  // min/max are rebuilt from mean and amplitude and may overshoot the grid
  // edges by rounding; snap those back before binning.
  const double tol = 1e-12 * std::max({std::abs(grid.lo()), std::abs(grid.hi()), grid.hi() - grid.lo()});
  auto snap = [&](double x) {
    if (x < grid.lo() && x >= grid.lo() - tol) return grid.lo();
    if (x > grid.hi() && x <= grid.hi() + tol) return grid.hi();
    return x;
  };
  for (const auto& c : cycles) {
    const auto lo = grid.bin_of(snap(c.min()));
    const auto hi = grid.bin_of(snap(c.max()));
    if (hi > lo)
      rfm.add(lo, hi, c.weight);
    else
      rfm.add_dropped(c.weight);
  }
  return rfm;
}

double Histogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

namespace {

template <class Key>
Histogram weighted_histogram(const std::vector<Cycle>& cycles, std::size_t n_bins, Key key) {
  Histogram h;
  if (cycles.empty()) return h;
  double lo = key(cycles.front()), hi = lo;
  for (const auto& c : cycles) {
    lo = std::min(lo, key(c));
    hi = std::max(hi, key(c));
  }
  if (lo == hi) {
    const double pad = 0.5 * std::max(1.0, std::abs(lo));
    lo -= pad;
    hi += pad;
  }
  const LevelGrid grid(n_bins, lo, hi);
  h.edges = grid.edges();
  h.counts.assign(n_bins, 0.0);
  for (const auto& c : cycles) h.counts[grid.bin_of(key(c))] += c.weight;
  return h;
}

}  // namespace

std::pair<Histogram, Histogram> histograms(const std::vector<Cycle>& cycles, std::size_t n_bins) {
  if (n_bins < 1) fail(ErrorCode::invalid_argument, "histogram needs n_bins >= 1");
  return {weighted_histogram(cycles, n_bins, [](const Cycle& c) { return c.amplitude; }),
          weighted_histogram(cycles, n_bins, [](const Cycle& c) { return c.mean; })};
}

}  // namespace fatigue
