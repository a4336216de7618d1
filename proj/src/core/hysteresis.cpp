#include "fatigue/hysteresis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fatigue/error.hpp"

namespace fatigue {

int relay_step(Relay& r, double v) noexcept {
  if (v >= r.tau)
    r.state = 1;
  else if (v <= r.mu)
    r.state = 0;
  return r.state;
}

double preisach_bound(std::span<const double> values, BoundRule rule) {
  if (values.empty()) fail(ErrorCode::empty_input, "Preisach bound of an empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (rule == BoundRule::literal) return std::max(*lo, *hi);
  return std::max(std::abs(*lo), std::abs(*hi));
}

double preisach_bound(const TimeSeries& s, BoundRule rule) { return preisach_bound(s.values(), rule); }

int initial_relay_state(double mu, double tau) noexcept { return mu + tau < 0.0 ? 1 : 0; }

RelayBank::RelayBank(std::vector<Relay> relays, std::vector<double> weights, double bound)
    : relays_(std::move(relays)), weights_(std::move(weights)), bound_(bound) {
  if (!(bound_ > 0.0) || !std::isfinite(bound_)) fail(ErrorCode::domain_error, "Preisach bound must be > 0");
  if (relays_.size() != weights_.size())
    fail(ErrorCode::invalid_argument, "one weight per relay required");
  // Thresholds computed as multiples of M may overshoot by an ulp.
  const double slack = 1e-12 * bound_;
  for (std::size_t i = 0; i < relays_.size(); ++i) {
    const auto& r = relays_[i];
    if (!(r.mu <= r.tau) || r.mu < -bound_ - slack || r.tau > bound_ + slack)
      fail(ErrorCode::invalid_argument, "relay " + std::to_string(i) + " outside the Preisach triangle");
    if (r.state != 0 && r.state != 1) fail(ErrorCode::invalid_argument, "relay state must be 0 or 1");
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
      fail(ErrorCode::invalid_argument, "relay weights must be finite and >= 0");
  }
  output_ = recompute_output();
}

double RelayBank::recompute_output() const noexcept {
  double h = 0.0;
  for (std::size_t i = 0; i < relays_.size(); ++i) h += weights_[i] * relays_[i].state;
  return h;
}

StepResult RelayBank::update(double v) {
  if (v > bound_ || v < -bound_) {
    if (clamped_ == 0) {
      std::ostringstream os;
      os << "relay bank input " << v << " outside [-" << bound_ << ", " << bound_ << "]; clamped";
      warn(os.str());
    }
    ++clamped_;
    v = std::clamp(v, -bound_, bound_);
  }
  double switched = 0.0;
  for (std::size_t i = 0; i < relays_.size(); ++i) {
    const int before = relays_[i].state;
    if (relay_step(relays_[i], v) != before) switched += weights_[i];
  }
  output_ = recompute_output();
  return {output_, switched};
}

void RelayBank::scale_weights(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorCode::domain_error, "weight scale must be finite and >= 0");
  for (auto& w : weights_) w *= c;
  output_ = recompute_output();
}

double three_relay_alpha() {
  // Newton on f(a) = a + a^2 + a^3 - 1, increasing and convex on [0, 1].
  double a = 0.5;
  for (int i = 0; i < 100; ++i) {
    const double f = a + a * a + a * a * a - 1.0;
    const double step = f / (1.0 + 2.0 * a + 3.0 * a * a);
    a -= step;
    if (std::abs(step) < 1e-17) break;
  }
  return a;
}

RelayBank make_paper_bank(double bound) {
  if (!(bound > 0.0)) fail(ErrorCode::domain_error, "Preisach bound must be > 0");
  const double t = 0.66 * bound;
  std::vector<Relay> relays{{-t, t, 0}, {t, t, 0}, {-t, -t, 0}};
  for (auto& r : relays) r.state = initial_relay_state(r.mu, r.tau);
  const double a = three_relay_alpha();
  return RelayBank(std::move(relays), {a, a * a, a * a * a}, bound);
}

RelayBank make_uniform_bank(std::size_t n_levels, double bound, const SNCurve& sn) {
  if (n_levels < 2) fail(ErrorCode::invalid_argument, "uniform bank needs n_levels >= 2");
  if (!(bound > 0.0)) fail(ErrorCode::domain_error, "Preisach bound must be > 0");
  sn.validate();

  std::vector<double> x(n_levels);
  for (std::size_t i = 0; i < n_levels; ++i)
    x[i] = -bound + 2.0 * bound * static_cast<double>(i) / static_cast<double>(n_levels - 1);
  x.back() = bound;
  auto D = [&](std::size_t i, std::size_t j) { return j > i ? sn.damage_for_range(x[j] - x[i]) : 0.0; };

  const double scale = D(0, n_levels - 1);
  bool negative = false;
  std::vector<Relay> relays;
  std::vector<double> weights;
  relays.reserve(n_levels * (n_levels - 1) / 2);
  weights.reserve(relays.capacity());
  for (std::size_t i = 0; i + 1 < n_levels; ++i) {
    for (std::size_t j = i + 1; j < n_levels; ++j) {
      const double mixed = D(i, j) - D(i + 1, j) - D(i, j - 1) + D(i + 1, j - 1);
      // Convex per-cycle damage (k >= 1) gives mixed >= 0 up to rounding.
      if (mixed < -1e-12 * scale) negative = true;
      relays.push_back({x[i], x[j], initial_relay_state(x[i], x[j])});
      weights.push_back(0.5 * std::max(mixed, 0.0));
    }
  }
  if (negative)
    warn("S-N exponent below 1 gives negative Preisach weights; they were set to zero");
  return RelayBank(std::move(relays), std::move(weights), bound);
}

StepResult stream_update(RelayBank& bank, double v) { return bank.update(v); }

DamageSeries accumulated_damage(RelayBank& bank, std::span<const double> values,
                                std::span<const double> times) {
  if (values.size() != times.size()) fail(ErrorCode::invalid_argument, "values/times length mismatch");
  std::vector<double> inc(values.size()), acc(values.size());
  double running = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    inc[i] = bank.update(values[i]).delta;
    running += inc[i];
    acc[i] = running;
  }
  return DamageSeries(std::vector<double>(times.begin(), times.end()), std::move(inc), std::move(acc));
}

DamageSeries accumulated_damage(RelayBank& bank, const TimeSeries& s) {
  return accumulated_damage(bank, s.values(), s.times());
}

DamageSeries accumulated_damage(RelayBank& bank, const TurningPoints& tp) {
  std::vector<double> t(tp.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(tp.indices()[i]);
  return accumulated_damage(bank, tp.values(), t);
}

double calibrate_to_reference(const DamageSeries& series_damage, double reference_final) {
  const double final = series_damage.final_value();
  if (!(final > 0.0)) fail(ErrorCode::degenerate_signal, "hysteresis damage is zero; cannot calibrate");
  if (!(reference_final >= 0.0)) fail(ErrorCode::domain_error, "reference damage must be >= 0");
  return reference_final / final;
}

}  // namespace fatigue
