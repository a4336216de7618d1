// fatiguebench command line tool. Every subcommand goes through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fatiguebench/fatiguebench.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Failure {
  fb_status status;
  std::string message;
};

void check(fb_status st) {
  if (st != FB_OK) throw Failure{st, fb_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Series = std::unique_ptr<fb_series, Deleter<fb_series, fb_series_free>>;
using TurningPoints = std::unique_ptr<fb_turning_points, Deleter<fb_turning_points, fb_turning_points_free>>;
using Cycles = std::unique_ptr<fb_cycles, Deleter<fb_cycles, fb_cycles_free>>;
using Rfm = std::unique_ptr<fb_rfm, Deleter<fb_rfm, fb_rfm_free>>;
using Damage = std::unique_ptr<fb_damage, Deleter<fb_damage, fb_damage_free>>;
using Psd = std::unique_ptr<fb_psd, Deleter<fb_psd, fb_psd_free>>;
using Markov = std::unique_ptr<fb_markov, Deleter<fb_markov, fb_markov_free>>;
using Levels = std::unique_ptr<fb_levels, Deleter<fb_levels, fb_levels_free>>;
using Bank = std::unique_ptr<fb_bank, Deleter<fb_bank, fb_bank_free>>;

struct InputOpts {
  std::string path;
  std::string time_column = "0";
  std::string value_column = "1";
  char delimiter = ',';
  double min_range = 0.0;
};

struct SnOpts {
  double k = 4.0;
  double K = 6.25e37;
  std::string convention = "amplitude";

  fb_sn_curve curve() const {
    return fb_sn_curve{k, K, convention == "range" ? FB_RANGE : FB_AMPLITUDE};
  }
};

std::vector<std::pair<const CLI::App*, const CLI::Option*>> required_options;

void mandatory(CLI::App* sub, CLI::Option* opt) {
  opt->description(opt->get_description() + " (required)");
  required_options.emplace_back(sub, opt);
}

void add_input(CLI::App* sub, InputOpts& o) {
  mandatory(sub, sub->add_option("-i,--input", o.path, "Load history CSV"));
  sub->add_option("--time-column", o.time_column, "Time column name or 0-based index");
  sub->add_option("--value-column", o.value_column, "Value column name or 0-based index");
  sub->add_option("--delimiter", o.delimiter, "Field delimiter");
  sub->add_option("--min-range", o.min_range, "Drop reversals smaller than this")->check(CLI::NonNegativeNumber);
}

void add_sn(CLI::App* sub, SnOpts& o) {
  sub->add_option("--k", o.k, "S-N slope")->check(CLI::PositiveNumber);
  sub->add_option("--K", o.K, "S-N intercept")->check(CLI::PositiveNumber);
  sub->add_option("--convention", o.convention, "S-N load measure")
      ->check(CLI::IsMember({"amplitude", "range"}));
}

Series load(const InputOpts& o) {
  fb_series* s = nullptr;
  check(fb_series_load_csv(o.path.c_str(), o.time_column.c_str(), o.value_column.c_str(),
                           o.delimiter, &s));
  return Series(s);
}

TurningPoints turning_points(const fb_series* s, double min_range) {
  fb_turning_points* tp = nullptr;
  check(fb_turning_points_extract(s, min_range, &tp));
  return TurningPoints(tp);
}

Cycles count(const fb_turning_points* tp) {
  fb_cycles* c = nullptr;
  check(fb_rainflow_count(tp, &c));
  return Cycles(c);
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Failure{FB_ERR_DATA, "cannot create " + dir + ": " + ec.message()};
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Failure{FB_ERR_DATA, "cannot write " + path.string()};
}

double duration_of(const fb_series* s) {
  const std::size_t n = fb_series_length(s);
  const double* t = fb_series_times(s);
  return t[n - 1] - t[0];
}

json sn_json(const SnOpts& o) {
  return {{"k", o.k}, {"K", o.K}, {"convention", o.convention}};
}

// ---- subcommands ---------------------------------------------------------

struct RainflowCmd {
  InputOpts in;
  std::size_t bins = 10;
  std::string out;

  void run() const {
    auto dir = prepare_dir(out);
    auto s = load(in);
    auto tp = turning_points(s.get(), in.min_range);
    auto c = count(tp.get());
    check(fb_turning_points_write_csv(tp.get(), s.get(), (dir / "turning_points.csv").c_str()));
    check(fb_cycles_write_csv(c.get(), (dir / "cycles.csv").c_str()));
    check(fb_cycles_write_histograms(c.get(), bins, (dir / "histograms.csv").c_str()));
    fb_rfm* m = nullptr;
    check(fb_rfm_from_turning_points(tp.get(), bins, &m));
    Rfm rfm(m);
    check(fb_rfm_write_csv(rfm.get(), (dir / "rfm.csv").c_str()));
    check(fb_rfm_write_json(rfm.get(), (dir / "rfm.json").c_str()));
    std::cout << "turning points: " << fb_turning_points_length(tp.get()) << "\n"
              << "cycles: " << fb_cycles_length(c.get()) << "\n";
  }
};

struct DamageCmd {
  InputOpts in;
  SnOpts sn;
  double f_eq = 1.0;
  std::string out;

  void run() const {
    auto dir = prepare_dir(out);
    auto s = load(in);
    auto tp = turning_points(s.get(), in.min_range);
    auto c = count(tp.get());
    const auto curve = sn.curve();
    fb_damage* d = nullptr;
    check(fb_damage_from_cycles(c.get(), &curve, s.get(), &d));
    Damage dmg(d);
    check(fb_damage_write_csv(dmg.get(), (dir / "damage.csv").c_str()));
    double total = 0.0;
    check(fb_miner_damage(c.get(), &curve, &total));
    const double dur = duration_of(s.get());
    json j;
    j["sn"] = sn_json(sn);
    j["cycles"] = fb_cycles_length(c.get());
    j["total_damage"] = total;
    j["duration"] = dur;
    if (total > 0.0 && dur > 0.0) {
      double e = 0.0;
      check(fb_edl(total, dur, f_eq, &curve, &e));
      j["edl"] = {{"f_eq", f_eq}, {"value", e}};
    }
    write_json(dir / "damage.json", j);
    std::cout << "damage: " << total << "\n";
  }
};

struct SpectralCmd {
  InputOpts in;
  SnOpts sn;
  std::size_t segment_len = 0;
  double overlap = 0.5;
  std::string window = "hann";
  std::string out;

  void run() const {
    auto dir = prepare_dir(out);
    auto s = load(in);
    fb_psd_options o{segment_len, overlap,
                     window == "rectangular" ? FB_WINDOW_RECTANGULAR : FB_WINDOW_HANN};
    fb_psd* p = nullptr;
    check(fb_psd_estimate(s.get(), &o, &p));
    Psd psd(p);
    const auto curve = sn.curve();
    check(fb_psd_write_csv(psd.get(), (dir / "psd.csv").c_str()));
    check(fb_psd_write_json(psd.get(), &curve, (dir / "spectral.json").c_str()));
    fb_moments m{};
    check(fb_psd_moments(psd.get(), &m));
    fb_benasciutti b{};
    check(fb_benasciutti_rate(&m, &curve, &b));
    std::cout << "narrow-band rate: " << b.narrowband_rate << "\n"
              << "benasciutti rate: " << b.rate << "\n";
  }
};

struct MarkovCmd {
  InputOpts in;
  SnOpts sn;
  std::size_t bins = 10;
  std::uint64_t seed = 1;
  std::size_t ensemble = 10;
  std::size_t steps = 0;
  std::string out;

  void run() const {
    std::optional<std::uint64_t> seed_override;
    if (const char* env = std::getenv("FATIGUEBENCH_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        seed_override = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw Failure{FB_ERR_USAGE, std::string("FATIGUEBENCH_SEED is not an integer: ") + env};
      }
    }
    const std::uint64_t base = seed_override.value_or(seed);
    auto dir = prepare_dir(out);
    auto s = load(in);
    auto tp = turning_points(s.get(), in.min_range);
    fb_rfm* r = nullptr;
    check(fb_rfm_from_turning_points(tp.get(), bins, &r));
    Rfm rfm(r);
    fb_markov* mm = nullptr;
    check(fb_markov_from_rfm(rfm.get(), &mm));
    Markov model(mm);
    check(fb_markov_write_json(model.get(), (dir / "model.json").c_str()));

    const std::size_t n_steps = steps > 0 ? steps : fb_turning_points_length(tp.get());
    const double dur = duration_of(s.get());
    const auto curve = sn.curve();
    json runs = json::array();
    double sum = 0.0;
    for (std::size_t e = 0; e < ensemble; ++e) {
      fb_levels* l = nullptr;
      check(fb_markov_simulate(model.get(), n_steps, base + e, &l));
      Levels levels(l);
      fb_damage* d = nullptr;
      check(fb_markov_damage(model.get(), levels.get(), &curve, dur, &d));
      Damage dmg(d);
      if (e == 0) check(fb_damage_write_csv(dmg.get(), (dir / "damage_first.csv").c_str()));
      const double f = fb_damage_final(dmg.get());
      sum += f;
      runs.push_back({{"seed", base + e}, {"steps", fb_levels_length(levels.get())}, {"final_damage", f}});
    }
    auto c = count(tp.get());
    double rfc = 0.0;
    check(fb_miner_damage(c.get(), &curve, &rfc));
    json j;
    j["sn"] = sn_json(sn);
    j["n_bins"] = bins;
    j["base_seed"] = base;
    j["seed_source"] = seed_override ? "env:FATIGUEBENCH_SEED" : "flag";
    j["ensemble"] = ensemble;
    j["n_steps"] = n_steps;
    j["rfc_damage"] = rfc;
    j["mean_final_damage"] = sum / static_cast<double>(ensemble);
    j["runs"] = runs;
    write_json(dir / "ensemble.json", j);
    std::cout << "mean damage: " << sum / static_cast<double>(ensemble) << "\n"
              << "rfc damage: " << rfc << "\n";
  }
};

struct HysteresisCmd {
  InputOpts in;
  SnOpts sn;
  std::string mode = "paper3relay";
  std::size_t levels = 32;
  std::string bound_rule = "absolute";
  bool calibrate = false;
  std::string out;

  void run() const {
    auto dir = prepare_dir(out);
    auto s = load(in);
    double M = 0.0;
    check(fb_preisach_bound(s.get(), bound_rule == "literal" ? FB_BOUND_LITERAL : FB_BOUND_ABSOLUTE, &M));
    const auto curve = sn.curve();
    auto make = [&] {
      fb_bank* b = nullptr;
      if (mode == "uniform") {
        check(fb_bank_uniform(levels, M, &curve, &b));
      } else {
        check(fb_bank_three_relay(M, &b));
      }
      return Bank(b);
    };
    auto bank = make();
    char* initial = nullptr;
    check(fb_bank_snapshot(bank.get(), &initial));
    std::string initial_json(initial);
    fb_string_free(initial);

    fb_damage* d = nullptr;
    check(fb_bank_accumulate(bank.get(), s.get(), &d));
    Damage dmg(d);
    double scale = 1.0;
    if (calibrate) {
      auto tp = turning_points(s.get(), in.min_range);
      auto c = count(tp.get());
      double rfc = 0.0;
      check(fb_miner_damage(c.get(), &curve, &rfc));
      check(fb_calibrate(dmg.get(), rfc, &scale));
      fb_bank* b = nullptr;
      check(fb_bank_restore(initial_json.c_str(), &b));
      bank.reset(b);
      check(fb_bank_scale(bank.get(), scale));
      check(fb_bank_accumulate(bank.get(), s.get(), &d));
      dmg.reset(d);
    }
    check(fb_damage_write_csv(dmg.get(), (dir / "hysteresis.csv").c_str()));
    char* snap = nullptr;
    check(fb_bank_snapshot(bank.get(), &snap));
    json j;
    j["mode"] = mode;
    j["bound_rule"] = bound_rule;
    j["bound"] = M;
    j["relays"] = fb_bank_size(bank.get());
    j["calibrated"] = calibrate;
    j["scale"] = scale;
    j["final_damage"] = fb_damage_final(dmg.get());
    j["bank"] = json::parse(snap);
    fb_string_free(snap);
    write_json(dir / "hysteresis.json", j);
    std::cout << "damage: " << fb_damage_final(dmg.get()) << "\n";
  }
};

struct CompareCmd {
  std::string config;
  std::string out;

  void run() const {
    check(fb_compare_run(config.c_str(), out.c_str()));
    std::cout << "wrote " << (fs::path(out) / "report.json").string() << "\n";
  }
};

void emit_series(Series s, const std::string& out) {
  if (out.empty() || out == "-") {
    const std::size_t n = fb_series_length(s.get());
    const double* t = fb_series_times(s.get());
    const double* v = fb_series_values(s.get());
    std::printf("t,value\n");
    for (std::size_t i = 0; i < n; ++i) std::printf("%.17g,%.17g\n", t[i], v[i]);
    return;
  }
  check(fb_series_write_csv(s.get(), out.c_str()));
}

struct SineCmd {
  double amp = 1.0, freq = 1.0, fs = 100.0, dur = 10.0, phase = 0.0;
  std::string out;

  void run() const {
    fb_series* s = nullptr;
    check(fb_series_synth_sine(amp, freq, fs, dur, phase, &s));
    emit_series(Series(s), out);
  }
};

struct BandNoiseCmd {
  double center = 1.0, bandwidth = 0.05, fs = 32.0, stddev = 1.0;
  std::size_t n = 1 << 16;
  std::uint64_t seed = 1;
  std::string out;

  void run() const {
    fb_series* s = nullptr;
    check(fb_series_synth_band_noise(center, bandwidth, fs, n, stddev, seed, &s));
    emit_series(Series(s), out);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fatigue damage estimators for load histories", "fatiguebench"};
  app.set_version_flag("--version", std::string(fb_version()));
  app.require_subcommand(0, 1);

  RainflowCmd rainflow;
  auto* rf = app.add_subcommand("rainflow", "Turning points, rainflow cycles, histograms and matrix");
  add_input(rf, rainflow.in);
  rf->add_option("--bins", rainflow.bins, "Histogram and matrix bins")->check(CLI::Range(2, 1000));
  mandatory(rf, rf->add_option("-o,--out", rainflow.out, "Output directory"));

  DamageCmd damage;
  auto* dm = app.add_subcommand("damage", "Miner damage history and equivalent damage load");
  add_input(dm, damage.in);
  add_sn(dm, damage.sn);
  dm->add_option("--f-eq", damage.f_eq, "EDL reference frequency")->check(CLI::PositiveNumber);
  mandatory(dm, dm->add_option("-o,--out", damage.out, "Output directory"));

  SpectralCmd spectral;
  auto* sp = app.add_subcommand("spectral", "PSD, spectral moments and spectral damage rates");
  add_input(sp, spectral.in);
  add_sn(sp, spectral.sn);
  sp->add_option("--segment-len", spectral.segment_len, "Welch segment length (0 = auto)");
  sp->add_option("--overlap", spectral.overlap, "Segment overlap fraction")->check(CLI::Range(0.0, 0.999999));
  sp->add_option("--window", spectral.window, "Taper")->check(CLI::IsMember({"hann", "rectangular"}));
  mandatory(sp, sp->add_option("-o,--out", spectral.out, "Output directory"));

  MarkovCmd markov;
  auto* mk = app.add_subcommand("markov", "Turning-point Markov model and seeded damage ensemble");
  add_input(mk, markov.in);
  add_sn(mk, markov.sn);
  mk->add_option("--bins", markov.bins, "Level grid size")->check(CLI::Range(2, 1000));
  mk->add_option("--seed", markov.seed, "Base seed (FATIGUEBENCH_SEED overrides)");
  mk->add_option("--ensemble", markov.ensemble, "Number of realizations")->check(CLI::Range(1, 100000));
  mk->add_option("--steps", markov.steps, "Steps per realization (0 = number of turning points)");
  mandatory(mk, mk->add_option("-o,--out", markov.out, "Output directory"));

  HysteresisCmd hysteresis;
  auto* hy = app.add_subcommand("hysteresis", "Relay-bank damage accumulation");
  add_input(hy, hysteresis.in);
  add_sn(hy, hysteresis.sn);
  hy->add_option("--mode", hysteresis.mode, "Relay bank")->check(CLI::IsMember({"paper3relay", "uniform"}));
  hy->add_option("--levels", hysteresis.levels, "Grid levels for the uniform bank")->check(CLI::Range(2, 2000));
  hy->add_option("--bound-rule", hysteresis.bound_rule, "Plane bound from the series")
      ->check(CLI::IsMember({"absolute", "literal"}));
  hy->add_flag("--calibrate", hysteresis.calibrate, "Scale weights to the rainflow damage");
  mandatory(hy, hy->add_option("-o,--out", hysteresis.out, "Output directory"));

  CompareCmd compare;
  auto* cm = app.add_subcommand("compare", "Run every estimator and write report.json and curves.csv");
  mandatory(cm, cm->add_option("-c,--config", compare.config, "Run configuration"));
  cm->add_option("-o,--out", compare.out, "Output directory (default: output.dir)");

  auto* sy = app.add_subcommand("synth", "Generate reference signals");
  sy->require_subcommand(0, 1);
  SineCmd sine;
  auto* sn = sy->add_subcommand("sine", "Sampled sine wave");
  sn->add_option("--amp", sine.amp, "Amplitude");
  sn->add_option("--freq", sine.freq, "Frequency in Hz")->check(CLI::PositiveNumber);
  sn->add_option("--fs", sine.fs, "Sample rate in Hz")->check(CLI::PositiveNumber);
  sn->add_option("--dur", sine.dur, "Duration in seconds")->check(CLI::PositiveNumber);
  sn->add_option("--phase", sine.phase, "Phase in radians");
  sn->add_option("-o,--out", sine.out, "Output CSV (default: stdout)");
  BandNoiseCmd noise;
  auto* bn = sy->add_subcommand("bandnoise", "Band-limited Gaussian noise");
  bn->add_option("--center", noise.center, "Centre frequency in Hz")->check(CLI::PositiveNumber);
  bn->add_option("--bandwidth", noise.bandwidth, "Band width in Hz")->check(CLI::PositiveNumber);
  bn->add_option("--fs", noise.fs, "Sample rate in Hz")->check(CLI::PositiveNumber);
  bn->add_option("--n", noise.n, "Number of samples")->check(CLI::Range(2, 1 << 26));
  bn->add_option("--std", noise.stddev, "Standard deviation")->check(CLI::PositiveNumber);
  bn->add_option("--seed", noise.seed, "Seed");
  bn->add_option("-o,--out", noise.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
    // Checked after parsing so unknown flags are reported before missing ones.
    if (app.get_subcommands().empty()) throw CLI::RequiredError("A subcommand");
    if (sy->parsed() && sy->get_subcommands().empty()) throw CLI::RequiredError("A synth signal");
    for (const auto& [sub, opt] : required_options)
      if (sub->parsed() && opt->count() == 0) throw CLI::RequiredError(opt->get_name());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* ctx = &app;
    for (auto* sub : app.get_subcommands()) {
      ctx = sub;
      for (auto* nested : sub->get_subcommands()) ctx = nested;
    }
    std::cerr << ctx->help();
    return 1;
  }

  try {
    if (rf->parsed()) rainflow.run();
    else if (dm->parsed()) damage.run();
    else if (sp->parsed()) spectral.run();
    else if (mk->parsed()) markov.run();
    else if (hy->parsed()) hysteresis.run();
    else if (cm->parsed()) compare.run();
    else if (sn->parsed()) sine.run();
    else if (bn->parsed()) noise.run();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return FB_ERR_INTERNAL;
  }
  return 0;
}
