#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fatigue/damage.hpp"
#include "fatigue/hysteresis.hpp"
#include "fatigue/markov.hpp"
#include "fatigue/rainflow.hpp"
#include "fatigue/signal.hpp"
#include "fatigue/spectral.hpp"

namespace fatigue {

using json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string series_csv(const TimeSeries& s);
std::string turning_points_csv(const TurningPoints& tp, const TimeSeries& source);
std::string cycles_csv(const std::vector<Cycle>& cycles);
std::string histograms_csv(const Histogram& amplitude, const Histogram& mean);
std::string damage_csv(const DamageSeries& d);
std::string psd_csv(const PSD& psd);

/// Dense counts, one row per min bin.
std::string rfm_csv(const RainflowMatrix& rfm);

json to_json(const LevelGrid& g);
json to_json(const RainflowMatrix& rfm);
json to_json(const SNCurve& sn);
json to_json(const SpectralMoments& m);
json to_json(const MarkovModel& model);
json to_json(const RelayBank& bank);

LevelGrid level_grid_from_json(const json& j);
RainflowMatrix rfm_from_json(const json& j);
MarkovModel markov_from_json(const json& j);
/// Restores thresholds, weights and relay states of a snapshot.
RelayBank relay_bank_from_json(const json& j);

std::string_view to_string(StressConvention c) noexcept;
StressConvention parse_convention(std::string_view s);
std::string_view to_string(BoundRule r) noexcept;
BoundRule parse_bound_rule(std::string_view s);

}  // namespace fatigue
