#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "fatigue/error.hpp"
#include "fatigue/signal.hpp"

using namespace fatigue;

namespace {

std::vector<double> tp_values(const TurningPoints& tp) { return {tp.values().begin(), tp.values().end()}; }
std::vector<std::size_t> tp_indices(const TurningPoints& tp) {
  return {tp.indices().begin(), tp.indices().end()};
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

std::vector<double> random_walk(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<int> step(-3, 3);
  std::vector<double> v(n);
  double x = 0;
  for (auto& y : v) y = (x += step(g));
  return v;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("parse csv with header") {
  auto s = parse_series("t,v\n0,0\n1,5\n2,0");
  CHECK(std::vector<double>(s.times().begin(), s.times().end()) == std::vector<double>{0, 1, 2});
  CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{0, 5, 0});
  CHECK(s.label() == "v");
}

TEST_CASE("parse csv errors") {
  CHECK(code_of([] { parse_series("0,1\n0,2"); }) == ErrorCode::non_monotone_time);
  CHECK(code_of([] { parse_series("0,1\n1,nan\n2,3"); }) == ErrorCode::non_finite_value);
  CHECK(code_of([] { parse_series("0,1"); }) == ErrorCode::too_few_samples);
  CHECK(code_of([] { parse_series("0,1\n1,abc\n"); }) == ErrorCode::malformed_row);
  CsvOptions o;
  o.value_column = "load";
  CHECK(code_of([&] { parse_series("t,v\n0,1\n1,2", o); }) == ErrorCode::column_not_found);
}

TEST_CASE("malformed row reports its line") {
  try {
    parse_series("t,v\n0,1\n1,2\n2,x\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("columns by name, index and delimiter") {
  CsvOptions o;
  o.time_column = "time";
  o.value_column = "moment";
  o.delimiter = ';';
  auto s = parse_series("# comment\nmoment;time\n3;0\n4;0.5\n\n5;1\n", o);
  CHECK(s.size() == 3);
  CHECK(s.values()[2] == 5);
  CHECK(s.times()[1] == 0.5);
  CHECK(s.label() == "moment");

  CsvOptions by_index;
  by_index.time_column = "1";
  by_index.value_column = "0";
  auto s2 = parse_series("3,0\n4,1\n", by_index);
  CHECK(s2.values()[1] == 4);
}

TEST_CASE("load from file") {
  const auto path = std::filesystem::temp_directory_path() / "fatigue_signal_test.csv";
  {
    std::ofstream out(path);
    out << "\xEF\xBB\xBFt,v\r\n0,1\r\n1,-1\r\n";
  }
  auto s = load_series(path);
  CHECK(s.size() == 2);
  CHECK(s.values()[1] == -1);
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_series(path); }) == ErrorCode::io);
}

TEST_CASE("time series invariants") {
  CHECK(code_of([] { TimeSeries({0, 1}, {1}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { TimeSeries({0, 0}, {1, 2}); }) == ErrorCode::non_monotone_time);
  CHECK(code_of([] { TimeSeries({0, 1}, {1, std::numeric_limits<double>::infinity()}); }) ==
        ErrorCode::non_finite_value);
}

TEST_CASE("turning points examples") {
  auto a = extract_turning_points(std::vector<double>{0, 1, 2, 3, 2, 1});
  CHECK(tp_values(a) == std::vector<double>{0, 3, 1});
  CHECK(tp_indices(a) == std::vector<std::size_t>{0, 3, 5});

  CHECK(tp_values(extract_turning_points(std::vector<double>{0, 1, 2, 3})) == std::vector<double>{0, 3});
  CHECK(tp_values(extract_turning_points(std::vector<double>{0, 4, 1, 5, 0})) ==
        std::vector<double>{0, 4, 1, 5, 0});
}

TEST_CASE("plateaus keep the first index") {
  auto tp = extract_turning_points(std::vector<double>{0, 2, 2, 2, 1, 1, 3});
  CHECK(tp_values(tp) == std::vector<double>{0, 2, 1, 3});
  CHECK(tp_indices(tp) == std::vector<std::size_t>{0, 1, 4, 6});
}

TEST_CASE("constant series collapses to one point") {
  auto tp = extract_turning_points(std::vector<double>{2, 2, 2});
  CHECK(tp.size() == 1);
}

TEST_CASE("min_range removes small reversals") {
  auto tp = extract_turning_points(std::vector<double>{0, 5, 4.5, 6, 0}, 1.0);
  CHECK(tp_values(tp) == std::vector<double>{0, 6, 0});
  auto kept = extract_turning_points(std::vector<double>{0, 5, 4.5, 6, 0}, 0.0);
  CHECK(kept.size() == 5);
}

TEST_CASE("turning point properties on random walks") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto v = random_walk(seed, 300);
    const auto tp = extract_turning_points(v);
    const auto vals = tp.values();
    for (std::size_t i = 0; i + 2 < vals.size(); ++i)
      CHECK((vals[i + 1] - vals[i]) * (vals[i + 2] - vals[i + 1]) < 0);

    // idempotence
    const auto again = extract_turning_points(vals);
    CHECK(tp_values(again) == tp_values(tp));

    // endpoints preserved
    CHECK(tp.indices().front() == 0);
    CHECK(vals.front() == v.front());
    CHECK(vals.back() == v.back());

    // rate independence
    std::vector<double> t1(v.size()), t2(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      t1[i] = static_cast<double>(i);
      t2[i] = std::pow(static_cast<double>(i) + 1.0, 1.7) + 0.1 * std::sin(static_cast<double>(i));
    }
    auto a = extract_turning_points(TimeSeries(t1, v));
    auto b = extract_turning_points(TimeSeries(t2, v));
    CHECK(tp_values(a) == tp_values(b));

    // min_range monotonicity
    std::size_t prev = tp.size();
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const auto f = extract_turning_points(v, r);
      CHECK(f.size() <= prev);
      CHECK(f.values().front() == v.front());
      prev = f.size();
    }
  }
}

TEST_CASE("turning points validation") {
  CHECK(code_of([] { TurningPoints({0, 1, 2}, {0, 1, 2}, 3); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { TurningPoints({0, 0}, {0, 1}, 3); }) == ErrorCode::invalid_argument);
}

TEST_CASE("level grid") {
  LevelGrid g(4, -2, 2);
  CHECK(g.width() == 1.0);
  CHECK(g.edge(0) == -2);
  CHECK(g.edge(4) == 2);
  CHECK(g.center(0) == -1.5);
  CHECK(g.bin_of(-2) == 0);
  CHECK(g.bin_of(-1) == 1);
  CHECK(g.bin_of(2) == 3);
  CHECK(code_of([&] { (void)g.bin_of(2.5); }) == ErrorCode::out_of_grid);
  CHECK(code_of([] { LevelGrid(0, 0, 1); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { LevelGrid(2, 1, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("discretize examples") {
  LevelGrid g(2, 0, 1);
  auto d = discretize(TurningPoints::from_values({0.1, 0.9}), g);
  CHECK(d.bins == std::vector<std::size_t>{0, 1});

  auto merged = discretize(TurningPoints::from_values({0.1, 0.2}), g);
  CHECK(merged.bins == std::vector<std::size_t>{0});

  LevelGrid g10(10, 0, 10);
  std::vector<double> centers;
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::size_t b = (i % 2 == 0) ? i / 2 : 5 + i / 2;
    expect.push_back(b);
    centers.push_back(g10.center(b));
  }
  auto same = discretize(TurningPoints::from_values(centers), g10);
  CHECK(same.bins == expect);
}

TEST_CASE("discretize keeps alternation") {
  LevelGrid g(3, 0, 3);
  // 0.5 -> 0, 2.5 -> 2, 2.2 -> 2 (merged), 0.1 -> 0, 1.5 -> 1
  auto tp = TurningPoints::from_values({0.5, 2.5, 2.2, 2.8, 0.1, 1.5});
  auto d = discretize(tp, g);
  for (std::size_t i = 0; i + 2 < d.bins.size(); ++i) {
    const double a = static_cast<double>(d.bins[i]), b = static_cast<double>(d.bins[i + 1]),
                 c = static_cast<double>(d.bins[i + 2]);
    CHECK((b - a) * (c - b) < 0);
  }
  CHECK(d.bins.front() == 0);
  CHECK(d.bins.back() == 1);
}

TEST_CASE("discretize out of grid") {
  LevelGrid g(2, 0, 1);
  CHECK(code_of([&] { discretize(TurningPoints::from_values({0.5, 1.5}), g); }) == ErrorCode::out_of_grid);
}

}
