#include "fatiguebench/fatiguebench.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fatigue/damage.hpp"
#include "fatigue/error.hpp"
#include "fatigue/harness.hpp"
#include "fatigue/hysteresis.hpp"
#include "fatigue/markov.hpp"
#include "fatigue/rainflow.hpp"
#include "fatigue/serialize.hpp"
#include "fatigue/signal.hpp"
#include "fatigue/spectral.hpp"
#include "fatigue/synth.hpp"

struct fb_series {
  fatigue::TimeSeries s;
};
struct fb_turning_points {
  fatigue::TurningPoints tp;
};
struct fb_cycles {
  std::vector<fatigue::Cycle> c;
};
struct fb_rfm {
  fatigue::RainflowMatrix m;
};
struct fb_damage {
  fatigue::DamageSeries d;
};
struct fb_psd {
  fatigue::PSD p;
};
struct fb_markov {
  fatigue::MarkovModel m;
};
struct fb_levels {
  fatigue::DiscreteTPSeries sim;
};
struct fb_bank {
  fatigue::RelayBank b;
};

namespace {

thread_local std::string last_error;

fb_status status_of(fatigue::ErrorCategory c) {
  switch (c) {
    case fatigue::ErrorCategory::usage: return FB_ERR_USAGE;
    case fatigue::ErrorCategory::data: return FB_ERR_DATA;
    case fatigue::ErrorCategory::numeric: return FB_ERR_NUMERIC;
  }
  return FB_ERR_INTERNAL;
}

template <class F>
fb_status guarded(F&& f) {
  try {
    f();
    return FB_OK;
  } catch (const fatigue::Error& e) {
    last_error = e.what();
    return status_of(e.category());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FB_ERR_INTERNAL;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("InvalidJson: ") + e.what();
    return FB_ERR_DATA;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return FB_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) fatigue::fail(fatigue::ErrorCode::invalid_argument, std::string(name) + " is null");
}

fatigue::SNCurve sn_of(const fb_sn_curve* sn) {
  require(sn, "sn");
  fatigue::SNCurve c;
  c.k = sn->k;
  c.K = sn->K;
  if (sn->convention == FB_AMPLITUDE) {
    c.convention = fatigue::StressConvention::amplitude;
  } else if (sn->convention == FB_RANGE) {
    c.convention = fatigue::StressConvention::range;
  } else {
    fatigue::fail(fatigue::ErrorCode::invalid_argument, "unknown stress convention");
  }
  c.validate();
  return c;
}

fatigue::SpectralMoments moments_of(const fb_moments* m) {
  require(m, "moments");
  return {m->lambda0, m->lambda1, m->lambda2, m->lambda4};
}

std::string_view str_or(const char* s, std::string_view fallback) {
  return s != nullptr ? std::string_view(s) : fallback;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
  require(out, "out");
  *out = new T{std::forward<Args>(args)...};
}

std::mutex callback_mutex;

}  // namespace

extern "C" {

const char* fb_version(void) { return FATIGUEBENCH_VERSION; }

const char* fb_last_error(void) { return last_error.c_str(); }

void fb_set_warning_callback(fb_warning_fn fn, void* user) {
  std::lock_guard lock(callback_mutex);
  if (fn == nullptr) {
    fatigue::set_warning_sink([](std::string_view) {});
    return;
  }
  fatigue::set_warning_sink([fn, user](std::string_view msg) {
    std::string s(msg);
    fn(s.c_str(), user);
  });
}

void fb_reset_warning_callback(void) {
  std::lock_guard lock(callback_mutex);
  fatigue::set_warning_sink(nullptr);
}

void fb_string_free(char* s) { std::free(s); }

/* series */

fb_status fb_series_load_csv(const char* path, const char* time_column, const char* value_column,
                             char delimiter, fb_series** out) {
  return guarded([&] {
    require(path, "path");
    fatigue::CsvOptions o;
    o.time_column = std::string(str_or(time_column, "0"));
    o.value_column = std::string(str_or(value_column, "1"));
    if (delimiter != 0) o.delimiter = delimiter;
    emit(out, fatigue::load_series(path, o));
  });
}

fb_status fb_series_from_arrays(const double* t, const double* v, size_t n, const char* label,
                                fb_series** out) {
  return guarded([&] {
    if (n > 0) {
      require(t, "t");
      require(v, "v");
    }
    std::vector<double> tt(t, t + n), vv(v, v + n);
    emit(out, fatigue::TimeSeries(std::move(tt), std::move(vv), std::string(str_or(label, "value"))));
  });
}

fb_status fb_series_synth_sine(double amp, double freq, double fs, double duration, double phase,
                               fb_series** out) {
  return guarded([&] { emit(out, fatigue::synth::sine(amp, freq, fs, duration, phase)); });
}

fb_status fb_series_synth_band_noise(double center, double bandwidth, double fs, size_t n_samples,
                                     double stddev, uint64_t seed, fb_series** out) {
  return guarded([&] {
    emit(out, fatigue::synth::band_noise(center, bandwidth, fs, n_samples, stddev, seed));
  });
}

size_t fb_series_length(const fb_series* s) { return s ? s->s.size() : 0; }
const double* fb_series_times(const fb_series* s) { return s ? s->s.times().data() : nullptr; }
const double* fb_series_values(const fb_series* s) { return s ? s->s.values().data() : nullptr; }

fb_status fb_series_write_csv(const fb_series* s, const char* path) {
  return guarded([&] {
    require(s, "series");
    require(path, "path");
    fatigue::write_text(path, fatigue::series_csv(s->s));
  });
}

void fb_series_free(fb_series* s) { delete s; }

/* turning points and rainflow */

fb_status fb_turning_points_extract(const fb_series* s, double min_range, fb_turning_points** out) {
  return guarded([&] {
    require(s, "series");
    emit(out, fatigue::extract_turning_points(s->s, min_range));
  });
}

size_t fb_turning_points_length(const fb_turning_points* tp) { return tp ? tp->tp.size() : 0; }
const double* fb_turning_points_values(const fb_turning_points* tp) {
  return tp ? tp->tp.values().data() : nullptr;
}
const size_t* fb_turning_points_indices(const fb_turning_points* tp) {
  return tp ? tp->tp.indices().data() : nullptr;
}

fb_status fb_turning_points_write_csv(const fb_turning_points* tp, const fb_series* source,
                                      const char* path) {
  return guarded([&] {
    require(tp, "turning points");
    require(source, "source");
    require(path, "path");
    fatigue::write_text(path, fatigue::turning_points_csv(tp->tp, source->s));
  });
}

void fb_turning_points_free(fb_turning_points* tp) { delete tp; }

fb_status fb_rainflow_count(const fb_turning_points* tp, fb_cycles** out) {
  return guarded([&] {
    require(tp, "turning points");
    emit(out, fatigue::count_cycles(tp->tp));
  });
}

size_t fb_cycles_length(const fb_cycles* c) { return c ? c->c.size() : 0; }

fb_status fb_cycles_get(const fb_cycles* c, size_t i, fb_cycle* out) {
  return guarded([&] {
    require(c, "cycles");
    require(out, "out");
    if (i >= c->c.size()) fatigue::fail(fatigue::ErrorCode::index_out_of_range, "cycle index out of range");
    const auto& y = c->c[i];
    *out = fb_cycle{y.amplitude, y.mean, y.weight, y.start_idx, y.end_idx};
  });
}

fb_status fb_cycles_write_csv(const fb_cycles* c, const char* path) {
  return guarded([&] {
    require(c, "cycles");
    require(path, "path");
    fatigue::write_text(path, fatigue::cycles_csv(c->c));
  });
}

fb_status fb_cycles_write_histograms(const fb_cycles* c, size_t n_bins, const char* path) {
  return guarded([&] {
    require(c, "cycles");
    require(path, "path");
    auto [amp, mean] = fatigue::histograms(c->c, n_bins);
    fatigue::write_text(path, fatigue::histograms_csv(amp, mean));
  });
}

void fb_cycles_free(fb_cycles* c) { delete c; }

fb_status fb_rfm_build(const fb_cycles* c, size_t n_bins, double lo, double hi, fb_rfm** out) {
  return guarded([&] {
    require(c, "cycles");
    emit(out, fatigue::build_rfm(c->c, fatigue::LevelGrid(n_bins, lo, hi)));
  });
}

fb_status fb_rfm_from_turning_points(const fb_turning_points* tp, size_t n_bins, fb_rfm** out) {
  return guarded([&] {
    require(tp, "turning points");
    auto v = tp->tp.values();
    if (v.empty()) fatigue::fail(fatigue::ErrorCode::empty_input, "no turning points");
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (!(*hi > *lo)) fatigue::fail(fatigue::ErrorCode::degenerate_signal, "constant signal has no cycles");
    fatigue::LevelGrid grid(n_bins, *lo, *hi);
    auto d = fatigue::discretize(tp->tp, grid);
    std::vector<double> centres;
    centres.reserve(d.bins.size());
    for (auto b : d.bins) centres.push_back(grid.center(b));
    auto cycles = fatigue::count_cycles(fatigue::TurningPoints::from_values(std::move(centres)));
    emit(out, fatigue::build_rfm(cycles, grid));
  });
}

size_t fb_rfm_size(const fb_rfm* m) { return m ? m->m.size() : 0; }

double fb_rfm_at(const fb_rfm* m, size_t min_bin, size_t max_bin) {
  if (m == nullptr || min_bin >= m->m.size() || max_bin >= m->m.size()) return 0.0;
  return m->m.at(min_bin, max_bin);
}

double fb_rfm_total(const fb_rfm* m) { return m ? m->m.total() : 0.0; }

fb_status fb_rfm_write_csv(const fb_rfm* m, const char* path) {
  return guarded([&] {
    require(m, "rfm");
    require(path, "path");
    fatigue::write_text(path, fatigue::rfm_csv(m->m));
  });
}

fb_status fb_rfm_write_json(const fb_rfm* m, const char* path) {
  return guarded([&] {
    require(m, "rfm");
    require(path, "path");
    fatigue::write_text(path, fatigue::to_json(m->m).dump(2) + "\n");
  });
}

void fb_rfm_free(fb_rfm* m) { delete m; }

/* damage */

fb_status fb_cycles_to_failure(double s, const fb_sn_curve* sn, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = fatigue::cycles_to_failure(s, sn_of(sn));
  });
}

fb_status fb_miner_damage(const fb_cycles* c, const fb_sn_curve* sn, double* out) {
  return guarded([&] {
    require(c, "cycles");
    require(out, "out");
    *out = fatigue::miner_damage(c->c, sn_of(sn));
  });
}

fb_status fb_edl(double total_damage, double duration, double f_eq, const fb_sn_curve* sn,
                 double* out) {
  return guarded([&] {
    require(out, "out");
    *out = fatigue::edl(total_damage, duration, f_eq, sn_of(sn));
  });
}

fb_status fb_damage_from_cycles(const fb_cycles* c, const fb_sn_curve* sn, const fb_series* source,
                                fb_damage** out) {
  return guarded([&] {
    require(c, "cycles");
    require(source, "source");
    emit(out, fatigue::damage_series(c->c, sn_of(sn), source->s));
  });
}

size_t fb_damage_length(const fb_damage* d) { return d ? d->d.size() : 0; }
const double* fb_damage_times(const fb_damage* d) { return d ? d->d.times().data() : nullptr; }
const double* fb_damage_increments(const fb_damage* d) {
  return d ? d->d.increments().data() : nullptr;
}
const double* fb_damage_accumulated(const fb_damage* d) {
  return d ? d->d.accumulated().data() : nullptr;
}
double fb_damage_final(const fb_damage* d) { return d ? d->d.final_value() : 0.0; }

fb_status fb_damage_write_csv(const fb_damage* d, const char* path) {
  return guarded([&] {
    require(d, "damage");
    require(path, "path");
    fatigue::write_text(path, fatigue::damage_csv(d->d));
  });
}

void fb_damage_free(fb_damage* d) { delete d; }

/* spectral */

fb_psd_options fb_psd_default_options(void) {
  fatigue::PsdOptions o;
  return fb_psd_options{o.segment_len, o.overlap, FB_WINDOW_HANN};
}

fb_status fb_psd_estimate(const fb_series* s, const fb_psd_options* options, fb_psd** out) {
  return guarded([&] {
    require(s, "series");
    fatigue::PsdOptions o;
    if (options != nullptr) {
      o.segment_len = options->segment_len;
      o.overlap = options->overlap;
      if (options->window == FB_WINDOW_HANN) {
        o.window = fatigue::Window::hann;
      } else if (options->window == FB_WINDOW_RECTANGULAR) {
        o.window = fatigue::Window::rectangular;
      } else {
        fatigue::fail(fatigue::ErrorCode::invalid_argument, "unknown window");
      }
    }
    emit(out, fatigue::estimate_psd(s->s, o));
  });
}

size_t fb_psd_length(const fb_psd* p) { return p ? p->p.f.size() : 0; }
const double* fb_psd_frequencies(const fb_psd* p) { return p ? p->p.f.data() : nullptr; }
const double* fb_psd_density(const fb_psd* p) { return p ? p->p.G.data() : nullptr; }

fb_status fb_psd_moments(const fb_psd* p, fb_moments* out) {
  return guarded([&] {
    require(p, "psd");
    require(out, "out");
    auto m = fatigue::spectral_moments(p->p);
    *out = fb_moments{m.lambda0, m.lambda1, m.lambda2, m.lambda4};
  });
}

fb_status fb_psd_write_csv(const fb_psd* p, const char* path) {
  return guarded([&] {
    require(p, "psd");
    require(path, "path");
    fatigue::write_text(path, fatigue::psd_csv(p->p));
  });
}

fb_status fb_psd_write_json(const fb_psd* p, const fb_sn_curve* sn, const char* path) {
  return guarded([&] {
    require(p, "psd");
    require(path, "path");
    auto curve = sn_of(sn);
    auto m = fatigue::spectral_moments(p->p);
    auto a = fatigue::bandwidth_params(m);
    auto corr = fatigue::benasciutti_correction(a, curve.k);
    fatigue::json j;
    j["estimator"] = {{"segment_len", p->p.segment_len},
                      {"segments", p->p.segments},
                      {"overlap", p->p.overlap},
                      {"window", std::string(fatigue::to_string(p->p.window))}};
    j["sn"] = fatigue::to_json(curve);
    j["moments"] = fatigue::to_json(m);
    j["alpha1"] = a.alpha1;
    j["alpha2"] = a.alpha2;
    j["benasciutti_b"] = corr.b;
    j["benasciutti_factor"] = corr.factor;
    j["narrowband_limit"] = corr.narrowband_limit;
    j["narrowband_rate"] = fatigue::narrowband_rate(m, curve);
    j["benasciutti_rate"] = fatigue::benasciutti_rate(m, curve);
    fatigue::write_text(path, j.dump(2) + "\n");
  });
}

void fb_psd_free(fb_psd* p) { delete p; }

fb_status fb_bandwidth(const fb_moments* m, double* alpha1, double* alpha2) {
  return guarded([&] {
    auto a = fatigue::bandwidth_params(moments_of(m));
    if (alpha1) *alpha1 = a.alpha1;
    if (alpha2) *alpha2 = a.alpha2;
  });
}

fb_status fb_narrowband_rate(const fb_moments* m, const fb_sn_curve* sn, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = fatigue::narrowband_rate(moments_of(m), sn_of(sn));
  });
}

fb_status fb_benasciutti_rate(const fb_moments* m, const fb_sn_curve* sn, fb_benasciutti* out) {
  return guarded([&] {
    require(out, "out");
    auto mm = moments_of(m);
    auto curve = sn_of(sn);
    auto a = fatigue::bandwidth_params(mm);
    auto c = fatigue::benasciutti_correction(a, curve.k);
    double nb = fatigue::narrowband_rate(mm, curve);
    *out = fb_benasciutti{a.alpha1, a.alpha2, c.b, c.factor, c.narrowband_limit ? 1 : 0, nb,
                          c.factor * nb};
  });
}

/* markov */

fb_status fb_markov_from_rfm(const fb_rfm* m, fb_markov** out) {
  return guarded([&] {
    require(m, "rfm");
    emit(out, fatigue::rfm_to_markov(m->m));
  });
}

fb_status fb_markov_load_json(const char* path, fb_markov** out) {
  return guarded([&] {
    require(path, "path");
    std::ifstream in(path);
    if (!in) fatigue::fail(fatigue::ErrorCode::io, std::string("cannot open ") + path);
    auto j = fatigue::json::parse(in);
    emit(out, fatigue::markov_from_json(j));
  });
}

size_t fb_markov_states(const fb_markov* m) { return m ? m->m.n_states() : 0; }

double fb_markov_p(const fb_markov* m, size_t from, size_t to) {
  if (m == nullptr || from >= m->m.n_states() || to >= m->m.n_states()) return 0.0;
  return m->m.p(from, to);
}

fb_status fb_markov_intensity(const fb_markov* m, double rate, double* q, size_t q_len) {
  return guarded([&] {
    require(m, "model");
    require(q, "q");
    auto Q = fatigue::intensity(m->m, rate);
    if (q_len < Q.Q.size()) fatigue::fail(fatigue::ErrorCode::invalid_argument, "q buffer too small");
    std::copy(Q.Q.begin(), Q.Q.end(), q);
  });
}

fb_status fb_markov_write_json(const fb_markov* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    fatigue::write_text(path, fatigue::to_json(m->m).dump(2) + "\n");
  });
}

fb_status fb_markov_simulate(const fb_markov* m, size_t n_steps, uint64_t seed, fb_levels** out) {
  return guarded([&] {
    require(m, "model");
    emit(out, fatigue::simulate(m->m, n_steps, seed));
  });
}

size_t fb_levels_length(const fb_levels* l) { return l ? l->sim.bins.size() : 0; }
const size_t* fb_levels_data(const fb_levels* l) { return l ? l->sim.bins.data() : nullptr; }

fb_status fb_markov_damage(const fb_markov* m, const fb_levels* l, const fb_sn_curve* sn,
                           double duration, fb_damage** out) {
  return guarded([&] {
    require(m, "model");
    require(l, "levels");
    std::optional<double> dur;
    if (duration > 0.0) dur = duration;
    emit(out, fatigue::mc_damage(l->sim, m->m, sn_of(sn), dur));
  });
}

void fb_levels_free(fb_levels* l) { delete l; }
void fb_markov_free(fb_markov* m) { delete m; }

/* hysteresis */

fb_status fb_preisach_bound(const fb_series* s, fb_bound_rule rule, double* out) {
  return guarded([&] {
    require(s, "series");
    require(out, "out");
    if (rule != FB_BOUND_ABSOLUTE && rule != FB_BOUND_LITERAL)
      fatigue::fail(fatigue::ErrorCode::invalid_argument, "unknown bound rule");
    *out = fatigue::preisach_bound(s->s, rule == FB_BOUND_LITERAL ? fatigue::BoundRule::literal
                                                                   : fatigue::BoundRule::absolute);
  });
}

fb_status fb_bank_three_relay(double bound, fb_bank** out) {
  return guarded([&] { emit(out, fatigue::make_paper_bank(bound)); });
}

fb_status fb_bank_uniform(size_t n_levels, double bound, const fb_sn_curve* sn, fb_bank** out) {
  return guarded([&] { emit(out, fatigue::make_uniform_bank(n_levels, bound, sn_of(sn))); });
}

fb_status fb_bank_restore(const char* snapshot_json, fb_bank** out) {
  return guarded([&] {
    require(snapshot_json, "snapshot");
    emit(out, fatigue::relay_bank_from_json(fatigue::json::parse(snapshot_json)));
  });
}

fb_status fb_bank_snapshot(const fb_bank* b, char** json_out) {
  return guarded([&] {
    require(b, "bank");
    require(json_out, "out");
    *json_out = dup_string(fatigue::to_json(b->b).dump());
  });
}

size_t fb_bank_size(const fb_bank* b) { return b ? b->b.size() : 0; }
double fb_bank_output(const fb_bank* b) { return b ? b->b.output() : 0.0; }

fb_status fb_bank_update(fb_bank* b, double v, fb_step* out) {
  return guarded([&] {
    require(b, "bank");
    auto r = fatigue::stream_update(b->b, v);
    if (out) *out = fb_step{r.output, r.delta};
  });
}

fb_status fb_bank_scale(fb_bank* b, double c) {
  return guarded([&] {
    require(b, "bank");
    b->b.scale_weights(c);
  });
}

fb_status fb_bank_accumulate(fb_bank* b, const fb_series* s, fb_damage** out) {
  return guarded([&] {
    require(b, "bank");
    require(s, "series");
    emit(out, fatigue::accumulated_damage(b->b, s->s));
  });
}

void fb_bank_free(fb_bank* b) { delete b; }

fb_status fb_calibrate(const fb_damage* d, double reference_final, double* out) {
  return guarded([&] {
    require(d, "damage");
    require(out, "out");
    *out = fatigue::calibrate_to_reference(d->d, reference_final);
  });
}

/* comparison harness */

fb_status fb_compare_run(const char* config_path, const char* out_dir) {
  return guarded([&] {
    require(config_path, "config path");
    auto cfg = fatigue::load_config(config_path);
    fatigue::apply_env_overrides(cfg);
    if (out_dir != nullptr && *out_dir != '\0') cfg.output_dir = out_dir;
    if (cfg.output_dir.empty())
      fatigue::fail(fatigue::ErrorCode::invalid_config, "no output directory given");
    auto report = fatigue::run_compare(cfg);
    fatigue::write_report(report, cfg.output_dir);
  });
}

}  // extern "C"
