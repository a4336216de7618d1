#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/damage.hpp"
#include "fatigue/hysteresis.hpp"
#include "fatigue/serialize.hpp"
#include "fatigue/signal.hpp"
#include "fatigue/spectral.hpp"

namespace fatigue {

enum class HysteresisMode { paper3relay, uniform };

std::string_view to_string(HysteresisMode m) noexcept;
HysteresisMode parse_hysteresis_mode(std::string_view s);

/// Settings for one comparison run. Parsed from a flat "dotted.key = value"
/// text file; unknown or repeated keys are rejected.
struct RunConfig {
  std::filesystem::path input;
  CsvOptions csv;
  SNCurve sn;
  std::size_t rainflow_bins = 10;
  double min_range = 0.0;
  PsdOptions psd;
  std::uint64_t seed = 1;
  std::size_t ensemble = 10;
  HysteresisMode hysteresis_mode = HysteresisMode::paper3relay;
  std::size_t hysteresis_levels = 32;
  BoundRule bound_rule = BoundRule::absolute;
  double f_eq = 1.0;
  bool normalize = true;
  std::filesystem::path output_dir;
  std::string seed_source = "default";

  void validate() const;
};

/// Relative input paths resolve against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// FATIGUEBENCH_SEED, when set, replaces the ensemble base seed.
void apply_env_overrides(RunConfig& cfg);

/// Every result-affecting parameter, in a fixed key order.
json config_echo(const RunConfig& cfg);

struct SpectralSummary {
  PSD psd;
  SpectralMoments moments;
  BandwidthParams bandwidth;
  BenasciuttiCorrection correction;
  double narrowband_rate = 0.0;
  double benasciutti_rate = 0.0;
  double duration = 0.0;
};

struct MarkovSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> finals;
  std::size_t n_steps = 0;
  std::size_t n_states = 0;
  double rfm_total = 0.0;
};

struct HysteresisSummary {
  HysteresisMode mode = HysteresisMode::paper3relay;
  double bound = 0.0;
  std::size_t n_relays = 0;
  std::size_t clamped_samples = 0;
};

/// All four estimators on one input, with accumulated damage curves resampled
/// onto the input's time axis.
struct ComparisonReport {
  RunConfig config;
  std::string label;
  std::vector<double> t;
  std::size_t n_samples = 0;
  std::size_t n_turning_points = 0;
  std::size_t n_cycles = 0;

  DamageSeries rfc;
  std::vector<double> markov_mean;  // ensemble mean on t
  DamageSeries hysteresis;
  SpectralSummary spectral;
  MarkovSummary markov;
  HysteresisSummary hysteresis_info;

  double rfc_final = 0.0;
  double markov_final = 0.0;
  double hysteresis_final = 0.0;
  double edl = 0.0;
  // Factors mapping each method's final damage onto the RFC final damage.
  double markov_scale = 1.0;
  double hysteresis_scale = 1.0;

  json to_json() const;
  std::string curves_csv() const;
};

ComparisonReport run_compare(const TimeSeries& series, const RunConfig& cfg);
ComparisonReport run_compare(const RunConfig& cfg);

/// Writes report.json and curves.csv into dir (created if missing).
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);

}  // namespace fatigue
