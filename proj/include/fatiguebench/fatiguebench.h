/*
 * fatiguebench C API.
 *
 * Objects are opaque handles created by fb_*_create / fb_*_load style calls
 * and released with the matching fb_*_free. Every fallible call returns an
 * fb_status; on failure the message for the calling thread is available from
 * fb_last_error() until the next failing call on that thread.
 *
 * Status codes double as the command line tool's exit codes.
 */
#ifndef FATIGUEBENCH_H
#define FATIGUEBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FB_BUILDING_LIBRARY)
#    define FB_API __declspec(dllexport)
#  else
#    define FB_API __declspec(dllimport)
#  endif
#else
#  define FB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fb_status {
  FB_OK = 0,
  FB_ERR_USAGE = 1,    /* bad argument or configuration */
  FB_ERR_DATA = 2,     /* unreadable, malformed or inconsistent input data */
  FB_ERR_NUMERIC = 3,  /* domain error or degenerate signal */
  FB_ERR_INTERNAL = 4
} fb_status;

typedef enum fb_convention { FB_AMPLITUDE = 0, FB_RANGE = 1 } fb_convention;
typedef enum fb_window { FB_WINDOW_HANN = 0, FB_WINDOW_RECTANGULAR = 1 } fb_window;
typedef enum fb_bound_rule { FB_BOUND_ABSOLUTE = 0, FB_BOUND_LITERAL = 1 } fb_bound_rule;

typedef struct fb_sn_curve {
  double k;
  double K;
  fb_convention convention;
} fb_sn_curve;

typedef struct fb_cycle {
  double amplitude;
  double mean;
  double weight;
  size_t start_idx;
  size_t end_idx;
} fb_cycle;

typedef struct fb_psd_options {
  size_t segment_len; /* 0 = automatic */
  double overlap;
  fb_window window;
} fb_psd_options;

typedef struct fb_moments {
  double lambda0;
  double lambda1;
  double lambda2;
  double lambda4;
} fb_moments;

typedef struct fb_benasciutti {
  double alpha1;
  double alpha2;
  double b;
  double factor;
  int narrowband_limit;
  double narrowband_rate;
  double rate;
} fb_benasciutti;

typedef struct fb_step {
  double output;
  double delta;
} fb_step;

typedef struct fb_series fb_series;
typedef struct fb_turning_points fb_turning_points;
typedef struct fb_cycles fb_cycles;
typedef struct fb_rfm fb_rfm;
typedef struct fb_damage fb_damage;
typedef struct fb_psd fb_psd;
typedef struct fb_markov fb_markov;
typedef struct fb_levels fb_levels;
typedef struct fb_bank fb_bank;

FB_API const char* fb_version(void);
FB_API const char* fb_last_error(void);

/* Warnings go to stderr unless a callback is installed; NULL silences them. */
typedef void (*fb_warning_fn)(const char* message, void* user);
FB_API void fb_set_warning_callback(fb_warning_fn fn, void* user);
FB_API void fb_reset_warning_callback(void);

/* Strings returned through char** are owned by the caller. */
FB_API void fb_string_free(char* s);

/* ---- series ---------------------------------------------------------- */

/* Columns are header names or 0-based indices written as digits. NULL
 * selects columns 0 and 1; delimiter 0 means ','. */
FB_API fb_status fb_series_load_csv(const char* path, const char* time_column,
                                    const char* value_column, char delimiter, fb_series** out);
FB_API fb_status fb_series_from_arrays(const double* t, const double* v, size_t n,
                                       const char* label, fb_series** out);
FB_API fb_status fb_series_synth_sine(double amp, double freq, double fs, double duration,
                                      double phase, fb_series** out);
FB_API fb_status fb_series_synth_band_noise(double center, double bandwidth, double fs,
                                            size_t n_samples, double stddev, uint64_t seed,
                                            fb_series** out);
FB_API size_t fb_series_length(const fb_series* s);
FB_API const double* fb_series_times(const fb_series* s);
FB_API const double* fb_series_values(const fb_series* s);
FB_API fb_status fb_series_write_csv(const fb_series* s, const char* path);
FB_API void fb_series_free(fb_series* s);

/* ---- turning points and rainflow -------------------------------------- */

FB_API fb_status fb_turning_points_extract(const fb_series* s, double min_range, fb_turning_points** out);
FB_API size_t fb_turning_points_length(const fb_turning_points* tp);
FB_API const double* fb_turning_points_values(const fb_turning_points* tp);
FB_API const size_t* fb_turning_points_indices(const fb_turning_points* tp);
FB_API fb_status fb_turning_points_write_csv(const fb_turning_points* tp, const fb_series* source,
                                             const char* path);
FB_API void fb_turning_points_free(fb_turning_points* tp);

FB_API fb_status fb_rainflow_count(const fb_turning_points* tp, fb_cycles** out);
FB_API size_t fb_cycles_length(const fb_cycles* c);
FB_API fb_status fb_cycles_get(const fb_cycles* c, size_t i, fb_cycle* out);
FB_API fb_status fb_cycles_write_csv(const fb_cycles* c, const char* path);
/* Weighted amplitude and mean histograms as CSV. */
FB_API fb_status fb_cycles_write_histograms(const fb_cycles* c, size_t n_bins, const char* path);
FB_API void fb_cycles_free(fb_cycles* c);

/* Rainflow matrix over a uniform grid of n_bins on [lo, hi]. */
FB_API fb_status fb_rfm_build(const fb_cycles* c, size_t n_bins, double lo, double hi, fb_rfm** out);
/* Discretise the turning points onto n_bins levels spanning their range,
 * count cycles on the bin centres and bin them. */
FB_API fb_status fb_rfm_from_turning_points(const fb_turning_points* tp, size_t n_bins, fb_rfm** out);
FB_API size_t fb_rfm_size(const fb_rfm* m);
FB_API double fb_rfm_at(const fb_rfm* m, size_t min_bin, size_t max_bin);
FB_API double fb_rfm_total(const fb_rfm* m);
FB_API fb_status fb_rfm_write_csv(const fb_rfm* m, const char* path);
FB_API fb_status fb_rfm_write_json(const fb_rfm* m, const char* path);
FB_API void fb_rfm_free(fb_rfm* m);

/* ---- damage ------------------------------------------------------------ */

FB_API fb_status fb_cycles_to_failure(double s, const fb_sn_curve* sn, double* out);
FB_API fb_status fb_miner_damage(const fb_cycles* c, const fb_sn_curve* sn, double* out);
FB_API fb_status fb_edl(double total_damage, double duration, double f_eq, const fb_sn_curve* sn,
                        double* out);

FB_API fb_status fb_damage_from_cycles(const fb_cycles* c, const fb_sn_curve* sn,
                                       const fb_series* source, fb_damage** out);
FB_API size_t fb_damage_length(const fb_damage* d);
FB_API const double* fb_damage_times(const fb_damage* d);
FB_API const double* fb_damage_increments(const fb_damage* d);
FB_API const double* fb_damage_accumulated(const fb_damage* d);
FB_API double fb_damage_final(const fb_damage* d);
FB_API fb_status fb_damage_write_csv(const fb_damage* d, const char* path);
FB_API void fb_damage_free(fb_damage* d);

/* ---- spectral ---------------------------------------------------------- */

FB_API fb_psd_options fb_psd_default_options(void);
FB_API fb_status fb_psd_estimate(const fb_series* s, const fb_psd_options* options, fb_psd** out);
FB_API size_t fb_psd_length(const fb_psd* p);
FB_API const double* fb_psd_frequencies(const fb_psd* p);
FB_API const double* fb_psd_density(const fb_psd* p);
FB_API fb_status fb_psd_moments(const fb_psd* p, fb_moments* out);
FB_API fb_status fb_psd_write_csv(const fb_psd* p, const char* path);
/* Moments, bandwidth parameters, rates and estimator settings as JSON. */
FB_API fb_status fb_psd_write_json(const fb_psd* p, const fb_sn_curve* sn, const char* path);
FB_API void fb_psd_free(fb_psd* p);

FB_API fb_status fb_bandwidth(const fb_moments* m, double* alpha1, double* alpha2);
FB_API fb_status fb_narrowband_rate(const fb_moments* m, const fb_sn_curve* sn, double* out);
FB_API fb_status fb_benasciutti_rate(const fb_moments* m, const fb_sn_curve* sn, fb_benasciutti* out);

/* ---- markov ------------------------------------------------------------ */

FB_API fb_status fb_markov_from_rfm(const fb_rfm* m, fb_markov** out);
FB_API fb_status fb_markov_load_json(const char* path, fb_markov** out);
FB_API size_t fb_markov_states(const fb_markov* m);
FB_API double fb_markov_p(const fb_markov* m, size_t from, size_t to);
/* Fills q (n_states * n_states, row-major) with rate * (P - I). */
FB_API fb_status fb_markov_intensity(const fb_markov* m, double rate, double* q, size_t q_len);
FB_API fb_status fb_markov_write_json(const fb_markov* m, const char* path);
FB_API fb_status fb_markov_simulate(const fb_markov* m, size_t n_steps, uint64_t seed, fb_levels** out);
FB_API size_t fb_levels_length(const fb_levels* l);
FB_API const size_t* fb_levels_data(const fb_levels* l);
/* duration <= 0 uses the step number as time. */
FB_API fb_status fb_markov_damage(const fb_markov* m, const fb_levels* l, const fb_sn_curve* sn,
                                  double duration, fb_damage** out);
FB_API void fb_levels_free(fb_levels* l);
FB_API void fb_markov_free(fb_markov* m);

/* ---- hysteresis -------------------------------------------------------- */

FB_API fb_status fb_preisach_bound(const fb_series* s, fb_bound_rule rule, double* out);
FB_API fb_status fb_bank_three_relay(double bound, fb_bank** out);
FB_API fb_status fb_bank_uniform(size_t n_levels, double bound, const fb_sn_curve* sn, fb_bank** out);
FB_API fb_status fb_bank_restore(const char* snapshot_json, fb_bank** out);
FB_API fb_status fb_bank_snapshot(const fb_bank* b, char** json_out);
FB_API size_t fb_bank_size(const fb_bank* b);
FB_API double fb_bank_output(const fb_bank* b);
FB_API fb_status fb_bank_update(fb_bank* b, double v, fb_step* out);
FB_API fb_status fb_bank_scale(fb_bank* b, double c);
FB_API fb_status fb_bank_accumulate(fb_bank* b, const fb_series* s, fb_damage** out);
FB_API void fb_bank_free(fb_bank* b);

FB_API fb_status fb_calibrate(const fb_damage* d, double reference_final, double* out);

/* ---- comparison harness ------------------------------------------------ */

/* Runs every estimator per the config file and writes report.json and
 * curves.csv to out_dir (NULL or "" uses output.dir from the config).
 * FATIGUEBENCH_SEED overrides the configured seed. */
FB_API fb_status fb_compare_run(const char* config_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* FATIGUEBENCH_H */
