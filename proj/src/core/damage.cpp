#include "fatigue/damage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fatigue/error.hpp"

namespace fatigue {

void SNCurve::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorCode::domain_error, "S-N exponent k must be > 0");
  if (!(K > 0.0) || !std::isfinite(K)) fail(ErrorCode::domain_error, "S-N constant K must be > 0");
}

double SNCurve::load_for_range(double range) const noexcept {
  return convention == StressConvention::amplitude ? range / 2.0 : range;
}

double SNCurve::damage_for_range(double range) const {
  if (range <= 0.0) return 0.0;
  return std::pow(load_for_range(range), k) / K;
}

SNCurve SNCurve::in_range_convention() const {
  if (convention == StressConvention::range) return *this;
  // (r/2)^k N = K  <=>  r^k N = K 2^k
  return SNCurve{k, K * std::pow(2.0, k), StressConvention::range};
}

double cycles_to_failure(double s, const SNCurve& sn) {
  sn.validate();
  if (!(s > 0.0)) fail(ErrorCode::domain_error, "cycles_to_failure needs s > 0");
  return sn.K / std::pow(s, sn.k);
}

namespace {

// Cycle order by attribution time; ties keep extraction order. Both
// miner_damage and damage_series sum in this order so their totals agree bit for bit.
std::vector<std::size_t> attribution_order(const std::vector<Cycle>& cycles) {
  std::vector<std::size_t> order(cycles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cycles[a].end_idx < cycles[b].end_idx;
  });
  return order;
}

double cycle_damage(const Cycle& c, const SNCurve& sn) {
  return c.weight * sn.damage_for_range(c.range());
}

}  // namespace

double miner_damage(const std::vector<Cycle>& cycles, const SNCurve& sn) {
  sn.validate();
  double d = 0.0;
  for (auto i : attribution_order(cycles)) d += cycle_damage(cycles[i], sn);
  return d;
}

DamageSeries::DamageSeries(std::vector<double> t, std::vector<double> increment,
                           std::vector<double> accumulated)
    : t_(std::move(t)), inc_(std::move(increment)), acc_(std::move(accumulated)) {
  if (t_.size() != inc_.size() || t_.size() != acc_.size())
    fail(ErrorCode::invalid_argument, "damage series arrays differ in length");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(inc_[i] >= 0.0)) fail(ErrorCode::invalid_argument, "negative damage increment");
    if (i > 0 && acc_[i] < acc_[i - 1])
      fail(ErrorCode::invalid_argument, "accumulated damage decreases");
  }
}

DamageSeries DamageSeries::scaled(double c) const {
  if (!(c >= 0.0)) fail(ErrorCode::domain_error, "damage scale must be >= 0");
  auto inc = inc_;
  auto acc = acc_;
  for (auto& x : inc) x *= c;
  for (auto& x : acc) x *= c;
  return DamageSeries(t_, std::move(inc), std::move(acc));
}

double DamageSeries::accumulated_at(double t) const noexcept {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.begin()) return 0.0;
  return acc_[static_cast<std::size_t>(it - t_.begin()) - 1];
}

DamageSeries damage_series(const std::vector<Cycle>& cycles, const SNCurve& sn,
                           const TimeSeries& source) {
  sn.validate();
  const auto n = source.size();
  std::vector<double> inc(n, 0.0);
  std::vector<double> acc(n, 0.0);
  for (const auto& c : cycles)
    if (c.end_idx >= n) fail(ErrorCode::index_out_of_range, "cycle end index beyond source series");

  const auto order = attribution_order(cycles);
  double running = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (next < order.size() && cycles[order[next]].end_idx == i) {
      const double d = cycle_damage(cycles[order[next]], sn);
      inc[i] += d;
      running += d;
      ++next;
    }
    acc[i] = running;
  }
  const auto t = source.times();
  return DamageSeries(std::vector<double>(t.begin(), t.end()), std::move(inc), std::move(acc));
}

double edl(double total_damage, double duration, double f_eq, const SNCurve& sn) {
  sn.validate();
  if (!(total_damage >= 0.0) || !std::isfinite(total_damage))
    fail(ErrorCode::domain_error, "EDL needs total damage >= 0");
  if (!(duration > 0.0)) fail(ErrorCode::domain_error, "EDL needs duration > 0");
  if (!(f_eq > 0.0)) fail(ErrorCode::domain_error, "EDL needs f_eq > 0");
  return std::pow(sn.K * total_damage / (f_eq * duration), 1.0 / sn.k);
}

}  // namespace fatigue
