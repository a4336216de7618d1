#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "astm_rainflow.hpp"
#include "fatigue/error.hpp"
#include "fatigue/harness.hpp"
#include "fatigue/markov.hpp"
#include "fatigue/synth.hpp"
#include "numeric.hpp"

using namespace fatigue;
namespace fs = std::filesystem;

namespace {

struct QuietWarnings {
  QuietWarnings() { set_warning_sink([](std::string_view) {}); }
  ~QuietWarnings() { set_warning_sink(nullptr); }
};

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
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

TimeSeries triangle(double A, std::size_t n_points) {
  std::vector<double> t(n_points), v(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    t[i] = 0.5 * static_cast<double>(i);
    v[i] = (i % 2 == 0) ? -A : A;
  }
  return TimeSeries(t, v, "triangle");
}

std::vector<double> last_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  std::vector<double> out;
  std::istringstream row(last);
  std::string cell;
  while (std::getline(row, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"(# run
input.path = data/load.csv
input.value_column = moment
sn.k = 3
sn.K = 1e12
sn.convention = range
rainflow.n_bins = 16
spectral.window = rectangular
spectral.overlap = 0.25
markov.seed = 99
markov.ensemble = 4
hysteresis.mode = uniform
hysteresis.n_levels = 24
hysteresis.bound_rule = literal
edl.f_eq = 2
normalize = false
output.dir = out
)",
                                "/base");
  CHECK(cfg.input == fs::path("/base/data/load.csv"));
  CHECK(cfg.csv.value_column == "moment");
  CHECK(cfg.sn.k == 3);
  CHECK(cfg.sn.K == 1e12);
  CHECK(cfg.sn.convention == StressConvention::range);
  CHECK(cfg.rainflow_bins == 16);
  CHECK(cfg.psd.window == Window::rectangular);
  CHECK(cfg.psd.overlap == 0.25);
  CHECK(cfg.seed == 99);
  CHECK(cfg.seed_source == "config");
  CHECK(cfg.ensemble == 4);
  CHECK(cfg.hysteresis_mode == HysteresisMode::uniform);
  CHECK(cfg.hysteresis_levels == 24);
  CHECK(cfg.bound_rule == BoundRule::literal);
  CHECK(cfg.f_eq == 2);
  CHECK_FALSE(cfg.normalize);
}

TEST_CASE("config rejects bad input") {
  CHECK(code_of([] { parse_config("input.path = a\nsn.q = 1\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path = a\ninput.path = b\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path = a\nsn.k = -1\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path = a\nsn.k = four\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path = a\nhysteresis.mode = five\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path = a\nrainflow.n_bins = 1\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("sn.k = 4\n"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config("input.path\n"); }) == ErrorCode::invalid_config);
  CHECK(category_of(ErrorCode::invalid_config) == ErrorCategory::usage);
}

TEST_CASE("environment seed override") {
  auto cfg = parse_config("input.path = a\nmarkov.seed = 3\n");
  ::setenv("FATIGUEBENCH_SEED", "1234", 1);
  apply_env_overrides(cfg);
  ::unsetenv("FATIGUEBENCH_SEED");
  CHECK(cfg.seed == 1234);
  CHECK(cfg.seed_source == "env:FATIGUEBENCH_SEED");
  CHECK(config_echo(cfg)["markov"]["seed"] == 1234);
}

TEST_CASE("sine comparison") {
  QuietWarnings q;
  RunConfig cfg;
  cfg.input = "sine";
  cfg.ensemble = 3;
  const double A = 2.0;
  const auto s = synth::sine(A, 1.0, 100.0, 100.0);
  const auto r = run_compare(s, cfg);

  const auto tp = extract_turning_points(s);
  double ref = 0;
  for (const auto& c : oracle::astm_rainflow({tp.values().begin(), tp.values().end()}))
    ref += c.weight * std::pow(c.range / 2.0, 4.0) / cfg.sn.K;
  CHECK(oracle::relative_error(r.rfc_final, ref) <= 1e-12);
  // about one hundred full cycles of amplitude A
  CHECK(oracle::relative_error(r.rfc_final, 100.0 * std::pow(A, 4.0) / cfg.sn.K) <= 0.01);

  CHECK(oracle::relative_error(r.hysteresis_scale * r.hysteresis_final, r.rfc_final) <= 1e-12);
  CHECK(r.hysteresis.scaled(r.hysteresis_scale).final_value() == doctest::Approx(r.rfc_final).epsilon(1e-14));
  CHECK(r.markov.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(r.markov.n_steps == tp.size());
  CHECK(r.spectral.correction.narrowband_limit == false);

  const auto last = last_row(r.curves_csv());
  REQUIRE(last.size() == 9);
  CHECK(last[6] == 1.0);
  CHECK(last[7] == 1.0);
  CHECK(last[8] == 1.0);

  const auto j = r.to_json();
  CHECK(j["schema"] == 1);
  CHECK(j["provenance"]["config"]["sn"]["k"] == 4.0);
  CHECK(j["provenance"]["seeds"].size() == 3);
  CHECK(j["rainflow"]["final_damage"] == r.rfc_final);
}

TEST_CASE("normalize off leaves raw curves") {
  QuietWarnings q;
  RunConfig cfg;
  cfg.input = "x";
  cfg.normalize = false;
  cfg.ensemble = 2;
  const auto r = run_compare(synth::band_noise(1.0, 0.5, 20.0, 2048, 1.0, 1), cfg);
  CHECK(r.markov_scale == 1.0);
  CHECK(r.hysteresis_scale == 1.0);
  CHECK(last_row(r.curves_csv()).size() == 6);
}

TEST_CASE("reports are byte-identical across runs") {
  QuietWarnings q;
  TempDir dir("fatigue_harness_repro");
  const auto s = synth::band_noise(1.0, 0.5, 20.0, 4096, 1.0, 7);
  spit(dir.path / "in.csv", "t,v\n" + [&] {
    std::string body;
    for (std::size_t i = 0; i < s.size(); ++i)
      body += format_number(s.times()[i]) + "," + format_number(s.values()[i]) + "\n";
    return body;
  }());
  spit(dir.path / "run.cfg", "input.path = in.csv\nmarkov.ensemble = 5\nhysteresis.mode = uniform\n");
  auto cfg = load_config(dir.path / "run.cfg");
  write_report(run_compare(cfg), dir.path / "a");
  write_report(run_compare(cfg), dir.path / "b");
  CHECK(slurp(dir.path / "a" / "report.json") == slurp(dir.path / "b" / "report.json"));
  CHECK(slurp(dir.path / "a" / "curves.csv") == slurp(dir.path / "b" / "curves.csv"));

  // concurrent runs over shared input produce the same report
  const auto series = load_series(cfg.input);
  auto f1 = std::async(std::launch::async, [&] { return run_compare(series, cfg).to_json().dump(); });
  auto f2 = std::async(std::launch::async, [&] { return run_compare(series, cfg).to_json().dump(); });
  CHECK(f1.get() == f2.get());
}

TEST_CASE("pipeline errors are tagged with the method") {
  QuietWarnings q;
  RunConfig cfg;
  cfg.input = "x";
  std::vector<double> t{0, 1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<double> v{0, 1, 0, 2, 0, 1, 0, 3, 0, 1, 0, 2, 0, 1, 0, 1};
  cfg.psd.segment_len = 4;
  try {
    run_compare(TimeSeries(t, v), cfg);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_uniform_sampling);
    CHECK(std::string(e.what()).rfind("[spectral]", 0) == 0);
  }
}

TEST_CASE("constant amplitude: rainflow, deterministic chain and calibrated bank agree") {
  QuietWarnings q;
  const double A = 1.5e6;
  const std::size_t n = 201;
  const auto s = triangle(A, n);
  const SNCurve sn{4.0, 6.25e37};
  const auto tp = extract_turning_points(s);
  const double rfc = damage_series(count_cycles(tp), sn, s).final_value();

  // two-level grid on [-2A, 2A] has its bin centres at -A and A
  RainflowMatrix rfm(LevelGrid(2, -2.0 * A, 2.0 * A));
  rfm.add(0, 1, 1.0);
  const auto model = rfm_to_markov(rfm);
  const double mc = mc_damage(simulate(model, n, 1), model, sn).final_value();
  CHECK(oracle::relative_error(mc, rfc) <= 1e-9);

  auto bank = make_uniform_bank(8, A, sn);
  auto probe = bank;
  const double c = calibrate_to_reference(accumulated_damage(probe, s), rfc);
  bank.scale_weights(c);
  CHECK(oracle::relative_error(accumulated_damage(bank, s).final_value(), rfc) <= 1e-9);
}

}
