// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "astm_rainflow.hpp"
#include "fatigue/damage.hpp"
#include "fatigue/error.hpp"
#include "fatigue/hysteresis.hpp"
#include "fatigue/markov.hpp"
#include "fatigue/rainflow.hpp"
#include "fatigue/signal.hpp"
#include "fatigue/spectral.hpp"
#include "fatigue/synth.hpp"
#include "numeric.hpp"

using namespace fatigue;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<oracle::RfCycle> as_multiset(const std::vector<Cycle>& cycles) {
  std::vector<oracle::RfCycle> out;
  for (const auto& c : cycles) out.push_back({c.range(), c.mean, c.weight});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> values_of(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

// 1: exhaustive agreement with the three-point reference.
void rainflow_exhaustive(Outcome& o) {
  std::size_t cases = 0, mismatches = 0;
  oracle::for_each_alternating(8, 4, [&](const std::vector<double>& seq) {
    ++cases;
    if (as_multiset(count_cycles(TurningPoints::from_values(seq))) != oracle::astm_rainflow(seq)) ++mismatches;
  });
  o.detail << cases << " sequences, " << mismatches << " mismatches";
  o.require(cases > 1000, "enumeration too small");
  o.require(mismatches == 0, "multisets differ");
}

// 2: nine-point sequence.
void nine_point(Outcome& o) {
  const std::vector<double> v{-2, 1, -3, 5, -1, 3, -4, 4, -2};
  const auto cycles = count_cycles(TurningPoints::from_values(v));
  std::vector<double> full, halves;
  for (const auto& c : cycles) (c.weight == 1.0 ? full : halves).push_back(c.range());
  std::sort(halves.begin(), halves.end());
  o.detail << full.size() << " full, " << halves.size() << " halves";
  o.require(full == std::vector<double>{4}, "one full cycle of range 4");
  o.require(halves == std::vector<double>{3, 4, 6, 8, 8, 9}, "halves {3,4,6,8,8,9}");
  o.require(as_multiset(cycles) == oracle::astm_rainflow(v), "reference multiset");
}

// 3: Miner homogeneity, additivity and EDL round trip.
void miner_properties(Outcome& o) {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> amp(0.1, 50.0), mean(-20, 20), scale(0.05, 20);
  double worst_h = 0, worst_edl = 0;
  bool additive = true;
  for (auto conv : {StressConvention::amplitude, StressConvention::range}) {
    for (double k : {3.0, 4.0, 5.0, 10.0}) {
      const SNCurve sn{k, 6.25e37, conv};
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<Cycle> c;
        for (int i = 0; i < 40; ++i) c.push_back({amp(g), mean(g), (i % 3 == 0) ? 0.5 : 1.0, 0, 1});
        const double s = scale(g);
        auto scaled = c;
        for (auto& x : scaled) x.amplitude *= s;
        worst_h = std::max(worst_h, oracle::relative_error(miner_damage(scaled, sn),
                                                           std::pow(s, k) * miner_damage(c, sn)));

        const double T = 10.0 + 600.0 * std::uniform_real_distribution<double>(0, 1)(g);
        const double f = 0.5 + 2.0 * std::uniform_real_distribution<double>(0, 1)(g);
        const double s_eq = amp(g);
        const double n_cycles = f * T;
        // s_eq is a load in the curve's own convention.
        const double D = n_cycles / cycles_to_failure(s_eq, sn);
        worst_edl = std::max(worst_edl, oracle::relative_error(edl(D, T, f, sn), s_eq));
      }
    }
    // Dyadic amplitudes and a power-of-two K keep every term and partial sum exact.
    const SNCurve dyadic{3.0, 1024.0, conv};
    std::uniform_int_distribution<int> eighths(1, 64);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Cycle> x, y;
      for (int i = 0; i < 8; ++i) x.push_back({eighths(g) / 8.0, 0.0, 1.0, 0, 1});
      for (int i = 0; i < 8; ++i) y.push_back({eighths(g) / 8.0, 0.0, 0.5, 0, 1});
      auto xy = x;
      xy.insert(xy.end(), y.begin(), y.end());
      if (miner_damage(xy, dyadic) != miner_damage(x, dyadic) + miner_damage(y, dyadic)) additive = false;
    }
  }
  o.detail << "homogeneity max rel err " << worst_h << ", EDL max rel err " << worst_edl
           << ", additivity " << (additive ? "exact" : "inexact");
  o.require(worst_h <= 1e-12, "homogeneity 1e-12");
  o.require(additive, "additivity exact");
  o.require(worst_edl <= 1e-12, "EDL round trip 1e-12");
}

// 4: spectral moments against time-domain variances.
void spectral_conventions(Outcome& o) {
  struct Case {
    double center, bandwidth, fs;
  };
  double worst0 = 0, worst2 = 0;
  for (const Case& c : {Case{2.0, 1.0, 50.0}, Case{5.0, 4.0, 100.0}, Case{1.0, 0.2, 20.0}}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto s = synth::band_noise(c.center, c.bandwidth, c.fs, 1u << 16, 1.5, seed);
      const auto m = spectral_moments(estimate_psd(s));
      const auto v = values_of(s);
      worst0 = std::max(worst0, oracle::relative_error(m.lambda0, oracle::sample_variance(v)));
      worst2 = std::max(worst2, oracle::relative_error(m.lambda2, oracle::derivative_variance(v, 1.0 / c.fs)));
    }
  }
  o.detail << "lambda0 max rel err " << worst0 << ", lambda2 max rel err " << worst2;
  o.require(worst0 <= 0.05, "lambda0 within 5%");
  o.require(worst2 <= 0.10, "lambda2 within 10%");
}

// 5: narrow-band consistency on band-passed noise.
void narrowband_consistency(Outcome& o) {
  const SNCurve sn{4.0, 1.0, StressConvention::range};
  int closer = 0;
  double worst = 0, fmin = 1e9, fmax = -1e9;
  std::ostringstream ratios;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = synth::band_noise(1.0, 0.05, 32.0, 1u << 18, 1.0, seed);
    const double rfc = miner_damage(count_cycles(extract_turning_points(s)), sn) / s.duration();
    const auto m = spectral_moments(estimate_psd(s));
    const double nb = narrowband_rate(m, sn);
    const auto corr = benasciutti_correction(bandwidth_params(m), sn.k);
    const double ed = nb * corr.factor;
    worst = std::max(worst, oracle::relative_error(rfc, nb));
    fmin = std::min(fmin, corr.factor);
    fmax = std::max(fmax, corr.factor);
    if (std::abs(ed - rfc) <= std::abs(nb - rfc)) ++closer;
    ratios << (seed > 1 ? " " : "") << std::round(rfc / nb * 1000.0) / 1000.0;
  }
  o.detail << "max |rfc - d_nb|/d_nb " << worst << ", factor in [" << fmin << ", " << fmax << "], corrected closer in "
           << closer << "/10, rfc/d_nb per seed: " << ratios.str();
  o.require(worst <= 0.30, "rfc within 30% of narrow-band rate");
  o.require(fmin > 0.0 && fmax <= 1.05, "factor in (0, 1.05]");
  o.require(closer >= 8, "corrected rate closer in >= 8 of 10");
}

// 6: correction factor spot values.
void benasciutti_values(Outcome& o) {
  const auto limit = benasciutti_correction({1.0, 1.0}, 4.0);
  o.require(limit.narrowband_limit && limit.factor == 1.0, "limit rule gives exactly 1");
  const auto c = benasciutti_correction({0.9, 0.95}, 4.0);
  const auto ref = oracle::benasciutti_reference(0.9L, 0.95L, 4.0L);
  const double eb = oracle::relative_error(c.b, ref.b), ef = oracle::relative_error(c.factor, ref.factor);
  o.detail << "b=" << c.b << " factor=" << c.factor << " rel err " << eb << ", " << ef;
  o.require(eb <= 1e-9 && ef <= 1e-9, "b and factor within 1e-9");
  // Extended-precision values computed once offline.
  o.require(oracle::relative_error(c.b, 0.1746311462956861) <= 1e-9, "b frozen value");
  o.require(oracle::relative_error(c.factor, 0.8132858316983105) <= 1e-9, "factor frozen value");
}

// 7: Markov simulation reproduces its transition matrix.
void markov_consistency(Outcome& o) {
  const auto s = synth::band_noise(1.0, 0.8, 20.0, 8192, 1.0, 17);
  const auto tp = extract_turning_points(s);
  const auto [lo, hi] = std::minmax_element(tp.values().begin(), tp.values().end());
  const LevelGrid grid(8, *lo, *hi);
  const auto d = discretize(tp, grid);
  std::vector<double> centres;
  for (auto b : d.bins) centres.push_back(grid.center(b));
  const auto rfm = build_rfm(count_cycles(TurningPoints::from_values(centres)), grid);
  const auto model = rfm_to_markov(rfm);
  const std::size_t ns = model.n_states();
  const auto n_steps = static_cast<std::size_t>(std::llround(100.0 * rfm.total()));

  double worst_p = 0, worst_q = 0;
  for (std::size_t i = 0; i < ns; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < ns; ++j) row += model.p(i, j);
    worst_p = std::max(worst_p, std::abs(row - 1.0));
  }
  const auto Q = intensity(model, 3.7);
  for (std::size_t i = 0; i < ns; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < ns; ++j) row += Q.at(i, j);
    worst_q = std::max(worst_q, std::abs(row));
  }

  double mean_l1 = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sim = simulate(model, n_steps, seed);
    const auto emp = empirical_transitions(model, sim);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < ns; ++i) {
      double row_emp = 0;
      for (std::size_t j = 0; j < ns; ++j) row_emp += emp[i * ns + j];
      if (row_emp == 0.0) continue;  // never left
      for (std::size_t j = 0; j < ns; ++j) {
        num += std::abs(emp[i * ns + j] - model.p(i, j));
        den += model.p(i, j);
      }
    }
    mean_l1 += num / den / 20.0;
  }
  o.detail << n_steps << " steps x 20 seeds, mean relative L1 " << mean_l1 << ", max |P row - 1| " << worst_p
           << ", max |Q row| " << worst_q;
  o.require(mean_l1 <= 0.1, "relative L1 <= 0.1");
  o.require(worst_p <= 1e-12, "P rows sum to 1");
  o.require(worst_q <= 1e-12, "Q rows sum to 0");
}

std::vector<double> random_turning_points(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v{2.0 * u(g) - 1.0};
  bool up = u(g) < 0.5;
  while (v.size() < n) {
    const double x = v.back();
    const double next = up ? x + (1.0 - x) * u(g) : x - (x + 1.0) * u(g);
    if (next != x) {
      v.push_back(next);
      up = !up;
    }
  }
  return v;
}

// 8: uniform relay banks converge to rainflow damage.
void hysteresis_convergence(Outcome& o) {
  const SNCurve sn{4.0, 1.0};
  const std::vector<std::size_t> levels{8, 16, 32, 64};
  std::mt19937_64 g(8);
  bool monotone = true;
  double worst64 = 0;
  std::vector<double> mean_err(levels.size(), 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_turning_points(g, 200);
    const auto tp = TurningPoints::from_values(v);
    const double rfc = miner_damage(count_cycles(tp), sn);
    const double M = preisach_bound(v);
    double prev = 1e300;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      auto bank = make_uniform_bank(levels[i], M, sn);
      const double err = oracle::relative_error(accumulated_damage(bank, tp).final_value(), rfc);
      if (err > prev) monotone = false;
      prev = err;
      mean_err[i] += err / 10.0;
      if (levels[i] == 64) worst64 = std::max(worst64, err);
    }
  }

  // One closed loop across the full grid, then calibration of an arbitrary bank to it.
  const double M = 3e6;
  const SNCurve steel{4.0, 6.25e37};
  auto bank = make_uniform_bank(16, M, steel);
  stream_update(bank, -M);
  const double loop = stream_update(bank, M).delta + stream_update(bank, -M).delta;
  const double want = miner_damage({Cycle{M, 0.0, 1.0, 0, 1}}, steel);
  const double loop_err = oracle::relative_error(loop, want);

  std::vector<double> cycle_values{0.0, M, -M, M, -M};
  auto probe = make_paper_bank(M);
  auto calibrated = probe;
  const auto raw = accumulated_damage(probe, cycle_values, std::vector<double>{0, 1, 2, 3, 4});
  calibrated.scale_weights(calibrate_to_reference(raw, want));
  const double cal_err = oracle::relative_error(
      accumulated_damage(calibrated, cycle_values, std::vector<double>{0, 1, 2, 3, 4}).final_value(), want);

  o.detail << "mean error n=8/16/32/64: " << mean_err[0] << " " << mean_err[1] << " " << mean_err[2] << " "
           << mean_err[3] << ", worst at 64 " << worst64 << ", loop err " << loop_err << ", calibration err "
           << cal_err;
  o.require(monotone, "error non-increasing in n for every sequence");
  o.require(worst64 <= 0.10, "error <= 10% at n=64");
  o.require(loop_err <= 1e-12 && cal_err <= 1e-12, "single-cycle calibration 1e-12");
}

// 9: damage does not depend on the time axis.
void rate_independence(Outcome& o) {
  const auto s = synth::band_noise(1.0, 0.6, 20.0, 6000, 2.0, 99);
  const auto v = values_of(s);
  const SNCurve sn{4.0, 1.0};
  const std::vector<std::function<double(double)>> warps{
      [](double t) { return 3.0 * t + 7.0; },
      [](double t) { return t + 0.4 * std::sin(t); },
      [](double t) { return std::pow(t + 1.0, 1.7); },
      [](double t) { return std::exp(t / 100.0); },
  };
  bool rfc_same = true, hyst_same = true, times_mapped = true;
  const auto base_cycles = count_cycles(extract_turning_points(s));
  const auto base_rfc = damage_series(base_cycles, sn, s);
  auto base_bank = make_uniform_bank(32, preisach_bound(v), sn);
  const auto base_h = accumulated_damage(base_bank, s);
  for (const auto& w : warps) {
    std::vector<double> t;
    for (double x : s.times()) t.push_back(w(x));
    const TimeSeries warped(t, v);
    const auto rfc = damage_series(count_cycles(extract_turning_points(warped)), sn, warped);
    auto bank = make_uniform_bank(32, preisach_bound(warped), sn);
    const auto h = accumulated_damage(bank, warped);
    auto same = [](std::span<const double> a, std::span<const double> b) {
      return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
    };
    rfc_same = rfc_same && same(rfc.accumulated(), base_rfc.accumulated()) &&
               same(rfc.increments(), base_rfc.increments());
    hyst_same = hyst_same && same(h.accumulated(), base_h.accumulated()) && same(h.increments(), base_h.increments());
    for (std::size_t i = 0; i < rfc.size(); ++i)
      if (rfc.times()[i] != w(base_rfc.times()[i])) times_mapped = false;
  }
  o.detail << warps.size() << " reparametrizations, " << base_cycles.size() << " cycles";
  o.require(rfc_same, "rainflow damage bit-exact");
  o.require(hyst_same, "hysteresis damage bit-exact");
  o.require(times_mapped, "increments stamped at mapped times");
}

// 10: published spectral moments with k=4, K=6.25e37.
void fixture_regression(Outcome& o) {
  const SpectralMoments m{4.4071e14, -3.949e7, 2.2904e11, 2.1263e11};
  struct Golden {
    StressConvention convention;
    double narrowband, corrected;
  };
  // Implementation outputs frozen from an extended-precision evaluation.
  const Golden golden[] = {
      {StressConvention::range, 6.099756466961547e-8, -1.692366538254431e-9},
      {StressConvention::amplitude, 3.812347791850967e-9, -1.057729086409019e-10},
  };
  const double alpha1 = -3.930565281278037e-6, alpha2 = 0.02366042889674148;
  const double b = -0.02774482903159790, factor = -0.02774482141083649;

  double worst = 0;
  bool stable = true;
  for (const auto& gv : golden) {
    const SNCurve sn{4.0, 6.25e37, gv.convention};
    double first_nb = 0, first_ed = 0;
    for (int run = 0; run < 2; ++run) {
      const auto a = bandwidth_params(m);
      const auto c = benasciutti_correction(a, sn.k);
      const double nb = narrowband_rate(m, sn);
      const double ed = benasciutti_rate(m, sn);
      for (double e : {oracle::relative_error(nb, gv.narrowband), oracle::relative_error(ed, gv.corrected),
                       oracle::relative_error(a.alpha1, alpha1), oracle::relative_error(a.alpha2, alpha2),
                       oracle::relative_error(c.b, b), oracle::relative_error(c.factor, factor)})
        worst = std::max(worst, e);
      if (run == 0) {
        first_nb = nb;
        first_ed = ed;
      } else if (nb != first_nb || ed != first_ed) {
        stable = false;
      }
    }
  }
  const SNCurve range{4.0, 6.25e37, StressConvention::range};
  o.detail << "d_nb=" << narrowband_rate(m, range) << " E[d]=" << benasciutti_rate(m, range)
           << " (range convention), factor " << factor << ", max rel err " << worst;
  o.require(worst <= 1e-12, "golden values within 1e-12");
  o.require(stable, "repeat runs identical");
}

}  // namespace

int main() {
  // Expected warnings (absorbing states, out-of-range factors) are not failures.
  set_warning_sink([](std::string_view) {});

  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = no runtime bound
    void (*run)(Outcome&);
  };
  const Criterion criteria[] = {
      {1, "rainflow exhaustive agreement", 10.0, rainflow_exhaustive},
      {2, "nine-point sequence", 0.0, nine_point},
      {3, "Miner properties", 0.0, miner_properties},
      {4, "spectral moment conventions", 5.0, spectral_conventions},
      {5, "narrow-band consistency", 60.0, narrowband_consistency},
      {6, "correction factor values", 0.0, benasciutti_values},
      {7, "Markov self-consistency", 30.0, markov_consistency},
      {8, "hysteresis convergence", 0.0, hysteresis_convergence},
      {9, "rate independence", 0.0, rate_independence},
      {10, "spectral fixture regression", 0.0, fixture_regression},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over runtime budget " << c.budget_s << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  %s (%s; %.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.str().c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
