#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fatigue/damage.hpp"
#include "fatigue/rainflow.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

/// Turning-point Markov chain over 2n states: states [0, n) are "at level i
/// as a minimum", states [n, 2n) are "at level j as a maximum". Minima move
/// only to strictly higher maxima and vice versa; rows without outgoing
/// transitions are absorbing self-loops.
class MarkovModel {
 public:
  MarkovModel(LevelGrid grid, std::vector<double> transition);

  const LevelGrid& grid() const noexcept { return grid_; }
  std::size_t n_levels() const noexcept { return grid_.n_levels(); }
  std::size_t n_states() const noexcept { return 2 * grid_.n_levels(); }

  std::size_t min_state(std::size_t level) const noexcept { return level; }
  std::size_t max_state(std::size_t level) const noexcept { return n_levels() + level; }
  bool is_min_state(std::size_t s) const noexcept { return s < n_levels(); }
  std::size_t level_of(std::size_t s) const noexcept { return s % n_levels(); }

  double p(std::size_t from, std::size_t to) const noexcept { return P_[from * n_states() + to]; }
  const std::vector<double>& transition() const noexcept { return P_; }
  bool is_absorbing(std::size_t s) const noexcept { return p(s, s) == 1.0; }
  std::vector<double> levels() const;

  /// Stationary distribution by power iteration on the lazy chain (P + I) / 2,
  /// which shares its fixed point with P but is aperiodic.
  std::vector<double> stationary(double tol = 1e-10) const;

 private:
  LevelGrid grid_;
  std::vector<double> P_;
};

/// Generator of the continuous-time chain: Q = rate (P - I).
struct IntensityMatrix {
  std::size_t n = 0;
  double rate = 0.0;
  std::vector<double> Q;
  double at(std::size_t i, std::size_t j) const noexcept { return Q[i * n + j]; }
};

/// Symmetric min/max normalisation: min i -> max j and max j -> min i are
/// both weighted by counts[i][j].
MarkovModel rfm_to_markov(const RainflowMatrix& rfm);

IntensityMatrix intensity(const MarkovModel& model, double rate);

/// Level sequence of the embedded chain. idx holds step numbers. The
/// sequence is shorter than n_steps only if an absorbing state was hit.
DiscreteTPSeries simulate(const MarkovModel& model, std::size_t n_steps, std::uint64_t seed);

/// Empirical transition matrix of a simulated level sequence (rows of
/// states never left are zero).
std::vector<double> empirical_transitions(const MarkovModel& model, const DiscreteTPSeries& sim);

/// Bin centres -> rainflow -> Miner. With a duration the events are spread
/// uniformly over [0, duration]; otherwise the step number is the time.
DamageSeries mc_damage(const DiscreteTPSeries& sim, const MarkovModel& model, const SNCurve& sn,
                       std::optional<double> duration = std::nullopt);

}  // namespace fatigue
