#include "fatigue/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "fatigue/error.hpp"
#include "fatigue/markov.hpp"
#include "fatigue/rainflow.hpp"

namespace fatigue {

std::string_view to_string(HysteresisMode m) noexcept {
  return m == HysteresisMode::paper3relay ? "paper3relay" : "uniform";
}

HysteresisMode parse_hysteresis_mode(std::string_view s) {
  if (s == "paper3relay") return HysteresisMode::paper3relay;
  if (s == "uniform") return HysteresisMode::uniform;
  fail(ErrorCode::invalid_config, "hysteresis.mode must be 'paper3relay' or 'uniform'");
}

namespace {

[[noreturn]] void bad_config(const std::string& what) { fail(ErrorCode::invalid_config, what); }

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
    bad_config(key + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    bad_config(key + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_config(key + ": expected true/false");
}

char to_delimiter(std::string_view v) {
  if (v == "tab" || v == "\\t") return '\t';
  if (v == "comma") return ',';
  if (v == "semicolon") return ';';
  if (v == "space") return ' ';
  if (v.size() == 1) return v.front();
  bad_config("input.delimiter: expected one character or tab/comma/semicolon/space");
}

}  // namespace

void RunConfig::validate() const {
  if (input.empty()) bad_config("input.path is required");
  if (!(sn.k > 0.0)) bad_config("sn.k must be > 0");
  if (!(sn.K > 0.0)) bad_config("sn.K must be > 0");
  if (rainflow_bins < 2 || rainflow_bins > 1000) bad_config("rainflow.n_bins must be in [2, 1000]");
  if (!(min_range >= 0.0)) bad_config("rainflow.min_range must be >= 0");
  if (psd.segment_len == 1) bad_config("spectral.segment_len must be 0 (auto) or >= 2");
  if (!(psd.overlap >= 0.0 && psd.overlap < 1.0)) bad_config("spectral.overlap must be in [0, 1)");
  if (ensemble < 1 || ensemble > 100000) bad_config("markov.ensemble must be in [1, 100000]");
  if (hysteresis_levels < 2 || hysteresis_levels > 2000) bad_config("hysteresis.n_levels must be in [2, 2000]");
  if (!(f_eq > 0.0)) bad_config("edl.f_eq must be > 0");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      bad_config("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) bad_config("line " + std::to_string(line_no) + ": duplicate key " + key);

    if (key == "input.path") {
      cfg.input = std::filesystem::path(std::string(value));
      if (cfg.input.is_relative() && !base_dir.empty()) cfg.input = base_dir / cfg.input;
    } else if (key == "input.time_column") {
      cfg.csv.time_column = std::string(value);
    } else if (key == "input.value_column") {
      cfg.csv.value_column = std::string(value);
    } else if (key == "input.delimiter") {
      cfg.csv.delimiter = to_delimiter(value);
    } else if (key == "sn.k") {
      cfg.sn.k = to_double(key, value);
    } else if (key == "sn.K") {
      cfg.sn.K = to_double(key, value);
    } else if (key == "sn.convention") {
      try {
        cfg.sn.convention = parse_convention(value);
      } catch (const Error& e) {
        bad_config(std::string("sn.convention: ") + e.what());
      }
    } else if (key == "rainflow.n_bins") {
      cfg.rainflow_bins = to_uint(key, value);
    } else if (key == "rainflow.min_range") {
      cfg.min_range = to_double(key, value);
    } else if (key == "spectral.segment_len") {
      cfg.psd.segment_len = to_uint(key, value);
    } else if (key == "spectral.overlap") {
      cfg.psd.overlap = to_double(key, value);
    } else if (key == "spectral.window") {
      try {
        cfg.psd.window = parse_window(value);
      } catch (const Error& e) {
        bad_config(std::string("spectral.window: ") + e.what());
      }
    } else if (key == "markov.seed") {
      cfg.seed = to_uint(key, value);
      cfg.seed_source = "config";
    } else if (key == "markov.ensemble") {
      cfg.ensemble = to_uint(key, value);
    } else if (key == "hysteresis.mode") {
      cfg.hysteresis_mode = parse_hysteresis_mode(value);
    } else if (key == "hysteresis.n_levels") {
      cfg.hysteresis_levels = to_uint(key, value);
    } else if (key == "hysteresis.bound_rule") {
      try {
        cfg.bound_rule = parse_bound_rule(value);
      } catch (const Error& e) {
        bad_config(std::string("hysteresis.bound_rule: ") + e.what());
      }
    } else if (key == "edl.f_eq") {
      cfg.f_eq = to_double(key, value);
    } else if (key == "normalize") {
      cfg.normalize = to_bool(key, value);
    } else if (key == "output.dir") {
      cfg.output_dir = std::filesystem::path(std::string(value));
    } else {
      bad_config("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void apply_env_overrides(RunConfig& cfg) {
  const char* env = std::getenv("FATIGUEBENCH_SEED");
  if (env == nullptr || *env == '\0') return;
  cfg.seed = to_uint("FATIGUEBENCH_SEED", env);
  cfg.seed_source = "env:FATIGUEBENCH_SEED";
}

json config_echo(const RunConfig& cfg) {
  return json{
      {"input", {{"path", cfg.input.generic_string()},
                 {"time_column", cfg.csv.time_column},
                 {"value_column", cfg.csv.value_column},
                 {"delimiter", std::string(1, cfg.csv.delimiter)}}},
      {"sn", to_json(cfg.sn)},
      {"rainflow", {{"n_bins", cfg.rainflow_bins}, {"min_range", cfg.min_range}}},
      {"spectral", {{"segment_len", cfg.psd.segment_len},
                    {"overlap", cfg.psd.overlap},
                    {"window", to_string(cfg.psd.window)}}},
      {"markov", {{"seed", cfg.seed}, {"seed_source", cfg.seed_source}, {"ensemble", cfg.ensemble}}},
      {"hysteresis", {{"mode", to_string(cfg.hysteresis_mode)},
                      {"n_levels", cfg.hysteresis_levels},
                      {"bound_rule", to_string(cfg.bound_rule)}}},
      {"edl", {{"f_eq", cfg.f_eq}}},
      {"normalize", cfg.normalize}};
}

namespace {

template <class F>
auto tagged(const char* method, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("[") + method + "] " + e.what());
  }
}

struct RfcResult {
  TurningPoints tp;
  std::vector<Cycle> cycles;
  DamageSeries damage;
};

struct MarkovResult {
  MarkovSummary summary;
  std::vector<double> mean_curve;
};

MarkovResult run_markov(const TimeSeries& series, const TurningPoints& tp, const RunConfig& cfg) {
  const auto [lo, hi] = std::minmax_element(tp.values().begin(), tp.values().end());
  if (!(*lo < *hi)) fail(ErrorCode::degenerate_signal, "series has no load variation");
  const LevelGrid grid(cfg.rainflow_bins, *lo, *hi);
  const auto dtp = discretize(tp, grid);

  std::vector<double> centres(dtp.bins.size());
  for (std::size_t i = 0; i < centres.size(); ++i) centres[i] = grid.center(dtp.bins[i]);
  const auto rfm = build_rfm(count_cycles(TurningPoints(dtp.idx, centres, series.size())), grid);
  const auto model = rfm_to_markov(rfm);

  MarkovResult out;
  out.summary.n_steps = tp.size();
  out.summary.n_states = model.n_states();
  out.summary.rfm_total = rfm.total();
  out.mean_curve.assign(series.size(), 0.0);
  const auto t = series.times();
  const double t0 = t.front();
  for (std::size_t e = 0; e < cfg.ensemble; ++e) {
    const std::uint64_t seed = cfg.seed + e;
    const auto sim = simulate(model, out.summary.n_steps, seed);
    const auto d = mc_damage(sim, model, cfg.sn, series.duration());
    out.summary.seeds.push_back(seed);
    out.summary.finals.push_back(d.final_value());
    for (std::size_t i = 0; i < t.size(); ++i) out.mean_curve[i] += d.accumulated_at(t[i] - t0);
  }
  for (auto& x : out.mean_curve) x /= static_cast<double>(cfg.ensemble);
  return out;
}

}  // namespace

ComparisonReport run_compare(const TimeSeries& series, const RunConfig& cfg) {
  cfg.sn.validate();
  ComparisonReport r;
  r.config = cfg;
  r.label = series.label();
  r.t.assign(series.times().begin(), series.times().end());
  r.n_samples = series.size();

  // The four pipelines only read the shared series; results are collected in
  // a fixed order so the report does not depend on completion order.
  auto rfc_job = std::async(std::launch::async, [&] {
    return tagged("rainflow", [&] {
      auto tp = extract_turning_points(series, cfg.min_range);
      auto cycles = count_cycles(tp);
      auto damage = damage_series(cycles, cfg.sn, series);
      return RfcResult{std::move(tp), std::move(cycles), std::move(damage)};
    });
  });
  auto spectral_job = std::async(std::launch::async, [&] {
    return tagged("spectral", [&] {
      SpectralSummary s;
      s.psd = estimate_psd(series, cfg.psd);
      s.moments = spectral_moments(s.psd);
      if (s.moments.is_degenerate()) fail(ErrorCode::degenerate_signal, "lambda0 is zero");
      s.bandwidth = bandwidth_params(s.moments);
      s.correction = benasciutti_correction(s.bandwidth, cfg.sn.k);
      s.narrowband_rate = narrowband_rate(s.moments, cfg.sn);
      s.benasciutti_rate = benasciutti_rate(s.moments, cfg.sn);
      s.duration = series.duration();
      return s;
    });
  });
  auto hysteresis_job = std::async(std::launch::async, [&] {
    return tagged("hysteresis", [&] {
      const double bound = preisach_bound(series, cfg.bound_rule);
      RelayBank bank = cfg.hysteresis_mode == HysteresisMode::paper3relay
                           ? make_paper_bank(bound)
                           : make_uniform_bank(cfg.hysteresis_levels, bound, cfg.sn);
      auto damage = accumulated_damage(bank, series);
      HysteresisSummary info{cfg.hysteresis_mode, bound, bank.size(), bank.clamped_samples()};
      return std::make_pair(std::move(damage), info);
    });
  });

  auto rfc = rfc_job.get();
  auto markov_job = std::async(std::launch::async, [&] {
    return tagged("markov", [&] { return run_markov(series, rfc.tp, cfg); });
  });
  r.spectral = spectral_job.get();
  auto [hyst_damage, hyst_info] = hysteresis_job.get();
  auto markov = markov_job.get();

  r.n_turning_points = rfc.tp.size();
  r.n_cycles = rfc.cycles.size();
  r.rfc = std::move(rfc.damage);
  r.rfc_final = r.rfc.final_value();
  r.edl = tagged("rainflow", [&] { return edl(r.rfc_final, series.duration(), cfg.f_eq, cfg.sn); });

  r.hysteresis = std::move(hyst_damage);
  r.hysteresis_info = hyst_info;
  r.hysteresis_final = r.hysteresis.final_value();

  r.markov = std::move(markov.summary);
  r.markov_mean = std::move(markov.mean_curve);
  r.markov_final = r.markov_mean.empty() ? 0.0 : r.markov_mean.back();

  if (cfg.normalize) {
    if (!(r.rfc_final > 0.0))
      fail(ErrorCode::degenerate_signal, "[rainflow] zero damage, nothing to normalize against");
    r.hysteresis_scale = tagged("hysteresis", [&] { return calibrate_to_reference(r.hysteresis, r.rfc_final); });
    if (!(r.markov_final > 0.0)) fail(ErrorCode::degenerate_signal, "[markov] zero ensemble damage");
    r.markov_scale = r.rfc_final / r.markov_final;
  }
  return r;
}

ComparisonReport run_compare(const RunConfig& cfg) {
  cfg.validate();
  const auto series = tagged("input", [&] { return load_series(cfg.input, cfg.csv); });
  return run_compare(series, cfg);
}

json ComparisonReport::to_json() const {
  const auto& s = spectral;
  json spectral_json{
      {"moments", fatigue::to_json(s.moments)},
      {"alpha1", s.bandwidth.alpha1},
      {"alpha2", s.bandwidth.alpha2},
      {"benasciutti_b", s.correction.b},
      {"benasciutti_factor", s.correction.factor},
      {"narrowband_limit", s.correction.narrowband_limit},
      {"narrowband_rate", s.narrowband_rate},
      {"benasciutti_rate", s.benasciutti_rate},
      {"narrowband_damage_over_duration", s.narrowband_rate * s.duration},
      {"benasciutti_damage_over_duration", s.benasciutti_rate * s.duration},
      {"estimator", {{"method", "welch"},
                     {"segment_len", s.psd.segment_len},
                     {"segments", s.psd.segments},
                     {"overlap", s.psd.overlap},
                     {"window", fatigue::to_string(s.psd.window)},
                     {"frequency_resolution", s.psd.f.size() > 1 ? s.psd.f[1] - s.psd.f[0] : 0.0}}}};

  json out{
      {"schema", 1},
      {"provenance", {{"tool", "fatiguebench"},
                      {"version", FATIGUEBENCH_VERSION},
                      {"config", config_echo(config)},
                      {"seeds", markov.seeds}}},
      {"input", {{"label", label},
                 {"samples", n_samples},
                 {"t_start", t.front()},
                 {"t_end", t.back()},
                 {"turning_points", n_turning_points}}},
      {"rainflow", {{"cycles", n_cycles}, {"final_damage", rfc_final}, {"edl", edl}, {"edl_f_eq", config.f_eq}}},
      {"spectral", std::move(spectral_json)},
      {"markov", {{"n_states", markov.n_states},
                  {"n_steps", markov.n_steps},
                  {"rfm_total", markov.rfm_total},
                  {"realization_finals", markov.finals},
                  {"mean_final_damage", markov_final},
                  {"normalization_factor", markov_scale}}},
      {"hysteresis", {{"mode", fatigue::to_string(hysteresis_info.mode)},
                      {"bound", hysteresis_info.bound},
                      {"relays", hysteresis_info.n_relays},
                      {"clamped_samples", hysteresis_info.clamped_samples},
                      {"final_damage", hysteresis_final},
                      {"normalization_factor", hysteresis_scale}}},
      {"normalized", config.normalize},
      {"curves", "curves.csv"}};
  return out;
}

std::string ComparisonReport::curves_csv() const {
  std::string out = "t,rfc,markov_mean,hysteresis,spectral_narrowband,spectral_benasciutti";
  if (config.normalize) out += ",rfc_normalized,markov_normalized,hysteresis_normalized";
  out += '\n';
  const auto rfc_acc = rfc.accumulated();
  const auto hyst_acc = hysteresis.accumulated();
  const double t0 = t.front();
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_number(t[i]) + "," + format_number(rfc_acc[i]) + "," + format_number(markov_mean[i]) +
           "," + format_number(hyst_acc[i]) + "," + format_number(spectral.narrowband_rate * (t[i] - t0)) +
           "," + format_number(spectral.benasciutti_rate * (t[i] - t0));
    if (config.normalize)
      out += "," + format_number(rfc_acc[i] / rfc_final) + "," + format_number(markov_mean[i] / markov_final) +
             "," + format_number(hyst_acc[i] / hysteresis_final);
    out += '\n';
  }
  return out;
}

void write_report(const ComparisonReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "curves.csv", report.curves_csv());
}

}  // namespace fatigue
