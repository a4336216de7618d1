#include "fatigue/markov.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "fatigue/error.hpp"
#include "fatigue/rng.hpp"

namespace fatigue {

MarkovModel::MarkovModel(LevelGrid grid, std::vector<double> transition)
    : grid_(grid), P_(std::move(transition)) {
  const std::size_t ns = n_states();
  if (P_.size() != ns * ns) fail(ErrorCode::invalid_argument, "transition matrix has wrong size");
  for (std::size_t s = 0; s < ns; ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < ns; ++t) {
      const double x = p(s, t);
      if (!(x >= 0.0) || x > 1.0) fail(ErrorCode::invalid_argument, "transition probability out of [0,1]");
      row += x;
      if (x == 0.0 || (s == t && x == 1.0)) continue;
      const bool up = is_min_state(s) && !is_min_state(t) && level_of(t) > level_of(s);
      const bool down = !is_min_state(s) && is_min_state(t) && level_of(t) < level_of(s);
      if (!up && !down)
        fail(ErrorCode::invalid_argument, "transition " + std::to_string(s) + "->" +
                                              std::to_string(t) + " breaks min/max alternation");
    }
    if (std::abs(row - 1.0) > 1e-12)
      fail(ErrorCode::invalid_argument, "transition row " + std::to_string(s) + " does not sum to 1");
  }
}

std::vector<double> MarkovModel::levels() const {
  std::vector<double> out(n_levels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid_.center(i);
  return out;
}

std::vector<double> MarkovModel::stationary(double tol) const {
  const std::size_t ns = n_states();
  std::vector<double> x(ns, 0.0), next(ns);
  std::size_t live = 0;
  for (std::size_t s = 0; s < ns; ++s)
    if (!is_absorbing(s)) ++live;
  if (live == 0) fail(ErrorCode::degenerate_signal, "every Markov state is absorbing");
  for (std::size_t s = 0; s < ns; ++s)
    if (!is_absorbing(s)) x[s] = 1.0 / static_cast<double>(live);

  for (int iter = 0; iter < 1'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      if (x[s] == 0.0) continue;
      next[s] += 0.5 * x[s];
      for (std::size_t t = 0; t < ns; ++t) next[t] += 0.5 * x[s] * p(s, t);
    }
    double change = 0.0;
    for (std::size_t s = 0; s < ns; ++s) change += std::abs(next[s] - x[s]);
    x.swap(next);
    if (change < tol) break;
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (auto& v : x) v /= total;
  return x;
}

MarkovModel rfm_to_markov(const RainflowMatrix& rfm) {
  const std::size_t n = rfm.size();
  const std::size_t ns = 2 * n;
  if (!(rfm.total() > 0.0)) fail(ErrorCode::degenerate_signal, "rainflow matrix is all zero");

  std::vector<double> P(ns * ns, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = rfm.at(i, j);
      P[i * ns + (n + j)] += c;        // min i -> max j
      P[(n + j) * ns + i] += c;        // max j -> min i
    }

  std::size_t absorbing = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < ns; ++t) row += P[s * ns + t];
    if (row == 0.0) {
      P[s * ns + s] = 1.0;
      ++absorbing;
      continue;
    }
    for (std::size_t t = 0; t < ns; ++t) P[s * ns + t] /= row;
    // Renormalise once more so the row sum is 1 to rounding.
    double again = 0.0;
    for (std::size_t t = 0; t < ns; ++t) again += P[s * ns + t];
    for (std::size_t t = 0; t < ns; ++t) P[s * ns + t] /= again;
  }
  if (absorbing > 0) {
    std::ostringstream os;
    os << absorbing << " of " << ns << " Markov states have no transitions and were made absorbing";
    warn(os.str());
  }
  return MarkovModel(rfm.grid(), std::move(P));
}

IntensityMatrix intensity(const MarkovModel& model, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) fail(ErrorCode::domain_error, "intensity rate must be > 0");
  const std::size_t ns = model.n_states();
  IntensityMatrix q;
  q.n = ns;
  q.rate = rate;
  q.Q.assign(ns * ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    double off = 0.0;
    for (std::size_t t = 0; t < ns; ++t) {
      if (t == s) continue;
      q.Q[s * ns + t] = rate * model.p(s, t);
      off += q.Q[s * ns + t];
    }
    // Diagonal from the off-diagonal sum keeps each row sum at zero.
    q.Q[s * ns + s] = -off;
  }
  return q;
}

namespace {

std::size_t sample_index(Rng& rng, const double* weights, std::size_t n) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last = i;
    if (u < cum) return i;
  }
  return last;
}

}  // namespace

DiscreteTPSeries simulate(const MarkovModel& model, std::size_t n_steps, std::uint64_t seed) {
  if (n_steps < 2) fail(ErrorCode::invalid_argument, "simulation needs n_steps >= 2");
  const std::size_t ns = model.n_states();
  Rng rng(seed);
  const auto pi = model.stationary();
  std::size_t state = sample_index(rng, pi.data(), ns);

  DiscreteTPSeries out;
  out.idx.reserve(n_steps);
  out.bins.reserve(n_steps);
  for (std::size_t step = 0; step < n_steps; ++step) {
    out.idx.push_back(step);
    out.bins.push_back(model.level_of(state));
    if (step + 1 == n_steps) break;
    if (model.is_absorbing(state)) {
      warn("Markov simulation trapped in absorbing state " + std::to_string(state) +
           " after " + std::to_string(step + 1) + " steps; truncated");
      break;
    }
    state = sample_index(rng, model.transition().data() + state * ns, ns);
  }
  return out;
}

std::vector<double> empirical_transitions(const MarkovModel& model, const DiscreteTPSeries& sim) {
  const std::size_t ns = model.n_states();
  std::vector<double> counts(ns * ns, 0.0);
  for (std::size_t i = 0; i + 1 < sim.bins.size(); ++i) {
    const bool rising = sim.bins[i + 1] > sim.bins[i];
    // A rise leaves a minimum, a fall leaves a maximum.
    const std::size_t from = rising ? model.min_state(sim.bins[i]) : model.max_state(sim.bins[i]);
    const std::size_t to = rising ? model.max_state(sim.bins[i + 1]) : model.min_state(sim.bins[i + 1]);
    counts[from * ns + to] += 1.0;
  }
  for (std::size_t s = 0; s < ns; ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < ns; ++t) row += counts[s * ns + t];
    if (row > 0.0)
      for (std::size_t t = 0; t < ns; ++t) counts[s * ns + t] /= row;
  }
  return counts;
}

DamageSeries mc_damage(const DiscreteTPSeries& sim, const MarkovModel& model, const SNCurve& sn,
                       std::optional<double> duration) {
  sn.validate();
  const std::size_t n = sim.bins.size();
  if (duration && !(*duration > 0.0)) fail(ErrorCode::domain_error, "duration must be > 0");
  std::vector<double> t(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sim.bins[i] >= model.n_levels())
      fail(ErrorCode::out_of_grid, "simulated level " + std::to_string(sim.bins[i]) + " outside model grid");
    v[i] = model.grid().center(sim.bins[i]);
    // i / (n - 1) is exactly 1 at the last event, so it lands on duration.
    t[i] = duration && n > 1 ? *duration * (static_cast<double>(i) / static_cast<double>(n - 1))
                             : static_cast<double>(i);
  }
  if (n < 2) return DamageSeries(t, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));

  const TimeSeries series(std::move(t), v, "markov");
  const auto tp = extract_turning_points(series);
  return damage_series(count_cycles(tp), sn, series);
}

}  // namespace fatigue
