#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fatigue/damage.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

/// Two-threshold switch. Output goes to 1 at v >= tau, to 0 at v <= mu and
/// holds in between. For mu == tau the "v >= tau" branch is tested first.
struct Relay {
  double mu = 0.0;
  double tau = 0.0;
  int state = 0;
};

/// Applies one input to the relay and returns its new state.
int relay_step(Relay& r, double v) noexcept;

/// How the Preisach plane bound M is taken from a series.
enum class BoundRule {
  absolute,  // max(|min v|, |max v|)
  literal,   // max(min v, max v), i.e. max v
};

double preisach_bound(std::span<const double> values, BoundRule rule = BoundRule::absolute);
double preisach_bound(const TimeSeries& s, BoundRule rule = BoundRule::absolute);

struct StepResult {
  double output = 0.0;  // h = sum of weight * state
  double delta = 0.0;   // |h - previous h|
};

/// Weighted parallel relays over the triangle -M <= mu <= tau <= M. Stateful,
/// single writer; snapshots restore exactly.
class RelayBank {
 public:
  RelayBank(std::vector<Relay> relays, std::vector<double> weights, double bound);

  std::span<const Relay> relays() const noexcept { return relays_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double bound() const noexcept { return bound_; }
  double output() const noexcept { return output_; }
  std::size_t size() const noexcept { return relays_.size(); }
  std::size_t clamped_samples() const noexcept { return clamped_; }

  /// Feeds one sample. Inputs outside [-M, M] are clamped (first one logged).
  /// All relays that switch on one sample move the same way, so delta is the
  /// summed weight of the switched relays.
  StepResult update(double v);

  void scale_weights(double c);

 private:
  double recompute_output() const noexcept;

  std::vector<Relay> relays_;
  std::vector<double> weights_;
  double bound_;
  double output_ = 0.0;
  std::size_t clamped_ = 0;
};

/// Initial state for a relay: 1 when mu + tau < 0.
int initial_relay_state(double mu, double tau) noexcept;

/// Real root of a + a^2 + a^3 = 1.
double three_relay_alpha();

/// Three relays at (-0.66M, 0.66M), (0.66M, 0.66M), (-0.66M, -0.66M) with
/// weights (a, a^2, a^3).
RelayBank make_paper_bank(double bound);

/// One relay per pair (x_i, x_j), i < j, of a uniform n_levels grid on
/// [-M, M]. The weight is half the mixed second difference of the per-cycle
/// Miner damage across the cell, so a closed loop between grid points costs
/// exactly its Miner damage (each relay switches twice per loop).
RelayBank make_uniform_bank(std::size_t n_levels, double bound, const SNCurve& sn);

StepResult stream_update(RelayBank& bank, double v);

/// Folds update() over the samples; increments are stamped at each sample time.
DamageSeries accumulated_damage(RelayBank& bank, const TimeSeries& s);
DamageSeries accumulated_damage(RelayBank& bank, std::span<const double> values,
                                std::span<const double> times);
/// Turning points are fed in order; their source indices are the time axis.
DamageSeries accumulated_damage(RelayBank& bank, const TurningPoints& tp);

/// Factor that maps the series' final damage onto reference_final.
double calibrate_to_reference(const DamageSeries& series_damage, double reference_final);

}  // namespace fatigue
