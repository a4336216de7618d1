#pragma once

#include <span>
#include <vector>

#include "fatigue/rainflow.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

/// Whether the S-N load s is a cycle's amplitude or its full range.
enum class StressConvention { amplitude, range };

/// Power-law S-N curve s^k N = K.
struct SNCurve {
  double k = 4.0;
  double K = 6.25e37;
  StressConvention convention = StressConvention::amplitude;

  void validate() const;
  /// The load s this curve uses for a cycle of the given range.
  double load_for_range(double range) const noexcept;
  /// Miner damage of one full cycle of the given range.
  double damage_for_range(double range) const;
  /// Same material expressed with range as the load measure.
  SNCurve in_range_convention() const;
};

double cycles_to_failure(double s, const SNCurve& sn);

/// Palmgren-Miner sum of weight * s^k / K.
double miner_damage(const std::vector<Cycle>& cycles, const SNCurve& sn);

/// Damage increments on the source time axis; accumulated is the running sum.
class DamageSeries {
 public:
  DamageSeries() = default;
  DamageSeries(std::vector<double> t, std::vector<double> increment, std::vector<double> accumulated);

  std::span<const double> times() const noexcept { return t_; }
  std::span<const double> increments() const noexcept { return inc_; }
  std::span<const double> accumulated() const noexcept { return acc_; }
  std::size_t size() const noexcept { return t_.size(); }
  bool empty() const noexcept { return t_.empty(); }
  double final_value() const noexcept { return acc_.empty() ? 0.0 : acc_.back(); }

  DamageSeries scaled(double c) const;
  /// Accumulated value in effect at time t (step function, 0 before the first sample).
  double accumulated_at(double t) const noexcept;

 private:
  std::vector<double> t_;
  std::vector<double> inc_;
  std::vector<double> acc_;
};

/// Each cycle's damage placed at t[end_idx] of the source series.
DamageSeries damage_series(const std::vector<Cycle>& cycles, const SNCurve& sn,
                           const TimeSeries& source);

/// Equivalent damage load: the constant load at f_eq whose Miner damage over
/// duration equals total_damage.
double edl(double total_damage, double duration, double f_eq, const SNCurve& sn);

}  // namespace fatigue
