#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "astm_rainflow.hpp"
#include "fatigue/damage.hpp"
#include "fatigue/error.hpp"
#include "fatigue/rainflow.hpp"
#include "numeric.hpp"

using namespace fatigue;

namespace {

Cycle full(double amplitude) { return Cycle{amplitude, 0.0, 1.0, 0, 1}; }

const SNCurve k4K16{4.0, 16.0, StressConvention::amplitude};

std::vector<Cycle> random_cycles(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> amp(0.1, 50.0);
  std::bernoulli_distribution half(0.3);
  std::vector<Cycle> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({amp(g), 0.0, half(g) ? 0.5 : 1.0, i, i + 1});
  return c;
}

}  // namespace

TEST_SUITE("damage") {

TEST_CASE("cycles to failure") {
  CHECK(cycles_to_failure(2, k4K16) == 1.0);
  CHECK(cycles_to_failure(1, SNCurve{3.0, 1000.0}) == 1000.0);
  CHECK(cycles_to_failure(1, SNCurve{7.5, 1000.0}) == 1000.0);
  CHECK(cycles_to_failure(2, SNCurve{4.0, 6.25e37}) == 3.90625e36);
  CHECK_THROWS_AS(cycles_to_failure(0, k4K16), Error);
  CHECK_THROWS_AS(cycles_to_failure(-1, k4K16), Error);
  CHECK_THROWS_AS(cycles_to_failure(1, SNCurve{0.0, 1.0}), Error);
  CHECK_THROWS_AS(cycles_to_failure(1, SNCurve{4.0, -1.0}), Error);
}

TEST_CASE("miner examples") {
  CHECK(miner_damage({full(2)}, k4K16) == 1.0);
  SNCurve range = k4K16;
  range.convention = StressConvention::range;
  CHECK(miner_damage({full(2)}, range) == 16.0);
  Cycle half{2.0, 0.0, 0.5, 0, 1};
  CHECK(miner_damage({half, half}, k4K16) == 1.0);
  CHECK(miner_damage({}, k4K16) == 0.0);
}

TEST_CASE("range convention conversion keeps damage") {
  const SNCurve amp{4.0, 6.25e37, StressConvention::amplitude};
  const auto r = amp.in_range_convention();
  CHECK(r.convention == StressConvention::range);
  CHECK(r.K == 6.25e37 * 16.0);
  for (double range : {0.5, 3.0, 1e4}) CHECK(r.damage_for_range(range) == doctest::Approx(amp.damage_for_range(range)).epsilon(1e-14));
}

TEST_CASE("homogeneity") {
  std::mt19937_64 g(3);
  for (double k : {1.0, 3.0, 4.0, 5.5}) {
    const SNCurve sn{k, 1e9, StressConvention::amplitude};
    const auto c = random_cycles(g, 100);
    for (double s : {0.5, 2.0, 3.7}) {
      auto scaled = c;
      for (auto& x : scaled) x.amplitude *= s;
      const double want = std::pow(s, k) * miner_damage(c, sn);
      CHECK(oracle::relative_error(miner_damage(scaled, sn), want) <= 1e-12);
    }
  }
}

TEST_CASE("additivity") {
  // dyadic amplitudes with an integer exponent keep every partial sum exact
  std::vector<Cycle> a{full(1.0), full(0.5), Cycle{2.0, 0, 0.5, 0, 1}};
  std::vector<Cycle> b{full(4.0), full(0.25)};
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const SNCurve sn{4.0, 1024.0};
  CHECK(miner_damage(ab, sn) == miner_damage(a, sn) + miner_damage(b, sn));

  std::mt19937_64 g(11);
  const SNCurve steel{4.0, 6.25e37};
  for (int t = 0; t < 20; ++t) {
    const auto x = random_cycles(g, 40), y = random_cycles(g, 40);
    auto xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    CHECK(oracle::relative_error(miner_damage(xy, steel), miner_damage(x, steel) + miner_damage(y, steel)) <=
          1e-13);
  }
}

TEST_CASE("equivalent damage load") {
  CHECK(edl(1, 1, 1, k4K16) == 2.0);
  CHECK(edl(0, 1, 1, k4K16) == 0.0);
  CHECK(edl(16, 1, 1, k4K16) == 4.0);
  CHECK_THROWS_AS(edl(-1, 1, 1, k4K16), Error);
  CHECK_THROWS_AS(edl(1, 0, 1, k4K16), Error);
  CHECK_THROWS_AS(edl(1, 1, 0, k4K16), Error);

  // round trip: n cycles of amplitude s at f Hz over T seconds
  for (double s : {1.5, 40.0, 3.3e6}) {
    const SNCurve sn{4.0, 6.25e37};
    const double f = 0.5, T = 600.0;
    std::vector<Cycle> c(static_cast<std::size_t>(f * T), full(s));
    CHECK(oracle::relative_error(edl(miner_damage(c, sn), T, f, sn), s) <= 1e-12);
  }
}

TEST_CASE("damage series") {
  std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7};
  TimeSeries src(t, std::vector<double>(8, 0.0));
  Cycle c{2.0, 0.0, 1.0, 3, 7};
  auto d = damage_series({c}, k4K16, src);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(d.increments()[i] == (i == 7 ? 1.0 : 0.0));
    CHECK(d.accumulated()[i] == (i == 7 ? 1.0 : 0.0));
  }
  CHECK(d.accumulated_at(6.5) == 0.0);
  CHECK(d.accumulated_at(7.0) == 1.0);

  auto z = damage_series({}, k4K16, src);
  CHECK(z.final_value() == 0.0);
  CHECK(z.size() == 8);

  Cycle late{1.0, 0.0, 1.0, 3, 9};
  CHECK_THROWS_AS(damage_series({late}, k4K16, src), Error);
}

TEST_CASE("nine point damage history matches the reference cycle set") {
  const std::vector<double> v{-2, 1, -3, 5, -1, 3, -4, 4, -2};
  std::vector<double> t(v.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  const TimeSeries src(t, v);
  const SNCurve sn{4.0, 16.0, StressConvention::range};
  const auto cycles = count_cycles(extract_turning_points(src));
  const auto d = damage_series(cycles, sn, src);

  double ref = 0;
  for (const auto& c : oracle::astm_rainflow(v)) ref += c.weight * std::pow(c.range, 4.0) / 16.0;
  CHECK(d.final_value() == doctest::Approx(ref).epsilon(1e-15));
  CHECK(d.final_value() == miner_damage(cycles, sn));
}

TEST_CASE("damage series final equals miner sum exactly") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1e7, 1e7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(500), t(500);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = u(g);
      t[i] = 0.05 * static_cast<double>(i);
    }
    const TimeSeries s(t, v);
    const auto c = count_cycles(extract_turning_points(s));
    const SNCurve sn{4.0, 6.25e37};
    const auto d = damage_series(c, sn, s);
    CHECK(d.final_value() == miner_damage(c, sn));
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d.accumulated()[i] >= d.accumulated()[i - 1]);
  }
}

TEST_CASE("scaled series") {
  DamageSeries d({0, 1}, {1, 2}, {1, 3});
  auto h = d.scaled(0.5);
  CHECK(h.final_value() == 1.5);
  CHECK(h.increments()[0] == 0.5);
  CHECK_THROWS_AS(d.scaled(-1.0), Error);
  CHECK_THROWS_AS(DamageSeries({0, 1}, {1, -2}, {1, -1}), Error);
}

}
