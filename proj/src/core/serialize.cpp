#include "fatigue/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fatigue/error.hpp"

namespace fatigue {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

std::string series_csv(const TimeSeries& s) {
  std::string out = "t," + s.label() + "\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += format_number(s.times()[i]) + "," + format_number(s.values()[i]) + "\n";
  return out;
}

std::string turning_points_csv(const TurningPoints& tp, const TimeSeries& source) {
  std::string out = "idx,t,value\n";
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const auto k = tp.indices()[i];
    out += std::to_string(k) + "," + format_number(source.times()[k]) + "," +
           format_number(tp.values()[i]) + "\n";
  }
  return out;
}

std::string cycles_csv(const std::vector<Cycle>& cycles) {
  std::string out = "amplitude,mean,range,weight,start_idx,end_idx\n";
  for (const auto& c : cycles)
    out += format_number(c.amplitude) + "," + format_number(c.mean) + "," + format_number(c.range()) +
           "," + format_number(c.weight) + "," + std::to_string(c.start_idx) + "," +
           std::to_string(c.end_idx) + "\n";
  return out;
}

std::string histograms_csv(const Histogram& amplitude, const Histogram& mean) {
  std::string out = "kind,bin_lo,bin_hi,count\n";
  auto emit = [&](const char* kind, const Histogram& h) {
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      out += std::string(kind) + "," + format_number(h.edges[i]) + "," + format_number(h.edges[i + 1]) +
             "," + format_number(h.counts[i]) + "\n";
  };
  emit("amplitude", amplitude);
  emit("mean", mean);
  return out;
}

std::string damage_csv(const DamageSeries& d) {
  std::string out = "t,increment,accumulated\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    out += format_number(d.times()[i]) + "," + format_number(d.increments()[i]) + "," +
           format_number(d.accumulated()[i]) + "\n";
  return out;
}

std::string psd_csv(const PSD& psd) {
  std::string out = "f,G\n";
  for (std::size_t i = 0; i < psd.f.size(); ++i)
    out += format_number(psd.f[i]) + "," + format_number(psd.G[i]) + "\n";
  return out;
}

std::string rfm_csv(const RainflowMatrix& rfm) {
  std::string out;
  for (std::size_t i = 0; i < rfm.size(); ++i) {
    for (std::size_t j = 0; j < rfm.size(); ++j) {
      if (j) out += ',';
      out += format_number(rfm.at(i, j));
    }
    out += '\n';
  }
  return out;
}

json to_json(const LevelGrid& g) {
  return json{{"n_levels", g.n_levels()}, {"lo", g.lo()}, {"hi", g.hi()}, {"edges", g.edges()}};
}

json to_json(const RainflowMatrix& rfm) {
  json rows = json::array();
  for (std::size_t i = 0; i < rfm.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < rfm.size(); ++j) row.push_back(rfm.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"grid", to_json(rfm.grid())},
              {"orientation", "row=min_bin,col=max_bin"},
              {"total", rfm.total()},
              {"dropped_weight", rfm.dropped_weight()},
              {"counts", std::move(rows)}};
}

json to_json(const SNCurve& sn) {
  return json{{"k", sn.k}, {"K", sn.K}, {"convention", to_string(sn.convention)}};
}

json to_json(const SpectralMoments& m) {
  return json{{"lambda0", m.lambda0}, {"lambda1", m.lambda1}, {"lambda2", m.lambda2}, {"lambda4", m.lambda4}};
}

json to_json(const MarkovModel& model) {
  json P = json::array();
  for (std::size_t s = 0; s < model.n_states(); ++s) {
    json row = json::array();
    for (std::size_t t = 0; t < model.n_states(); ++t) row.push_back(model.p(s, t));
    P.push_back(std::move(row));
  }
  return json{{"grid", to_json(model.grid())},
              {"levels", model.levels()},
              {"states", "0..n-1 = level as minimum, n..2n-1 = level as maximum"},
              {"P", std::move(P)}};
}

json to_json(const RelayBank& bank) {
  json relays = json::array();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& r = bank.relays()[i];
    relays.push_back(json{{"mu", r.mu}, {"tau", r.tau}, {"state", r.state}, {"weight", bank.weights()[i]}});
  }
  return json{{"bound", bank.bound()}, {"output", bank.output()}, {"relays", std::move(relays)}};
}

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::malformed_row, std::string(what) + ": " + e.what());
  }
}

}  // namespace

LevelGrid level_grid_from_json(const json& j) {
  return guarded("level grid", [&] {
    return LevelGrid(j.at("n_levels").get<std::size_t>(), j.at("lo").get<double>(), j.at("hi").get<double>());
  });
}

RainflowMatrix rfm_from_json(const json& j) {
  return guarded("rainflow matrix", [&] {
    RainflowMatrix rfm(level_grid_from_json(j.at("grid")));
    const auto& rows = j.at("counts");
    if (rows.size() != rfm.size()) fail(ErrorCode::malformed_row, "rainflow matrix row count");
    for (std::size_t i = 0; i < rfm.size(); ++i) {
      if (rows[i].size() != rfm.size()) fail(ErrorCode::malformed_row, "rainflow matrix column count");
      for (std::size_t k = 0; k < rfm.size(); ++k) {
        const double c = rows[i][k].get<double>();
        if (c == 0.0) continue;
        if (k <= i) fail(ErrorCode::malformed_row, "rainflow matrix has counts on or below the diagonal");
        rfm.add(i, k, c);
      }
    }
    if (j.contains("dropped_weight")) rfm.add_dropped(j.at("dropped_weight").get<double>());
    return rfm;
  });
}

MarkovModel markov_from_json(const json& j) {
  return guarded("markov model", [&] {
    const auto grid = level_grid_from_json(j.at("grid"));
    const std::size_t ns = 2 * grid.n_levels();
    const auto& rows = j.at("P");
    if (rows.size() != ns) fail(ErrorCode::malformed_row, "transition matrix row count");
    std::vector<double> P;
    P.reserve(ns * ns);
    for (const auto& row : rows) {
      if (row.size() != ns) fail(ErrorCode::malformed_row, "transition matrix column count");
      for (const auto& x : row) P.push_back(x.get<double>());
    }
    return MarkovModel(grid, std::move(P));
  });
}

RelayBank relay_bank_from_json(const json& j) {
  return guarded("relay bank", [&] {
    std::vector<Relay> relays;
    std::vector<double> weights;
    for (const auto& r : j.at("relays")) {
      relays.push_back({r.at("mu").get<double>(), r.at("tau").get<double>(), r.at("state").get<int>()});
      weights.push_back(r.at("weight").get<double>());
    }
    return RelayBank(std::move(relays), std::move(weights), j.at("bound").get<double>());
  });
}

std::string_view to_string(StressConvention c) noexcept {
  return c == StressConvention::amplitude ? "amplitude" : "range";
}

StressConvention parse_convention(std::string_view s) {
  if (s == "amplitude") return StressConvention::amplitude;
  if (s == "range") return StressConvention::range;
  fail(ErrorCode::invalid_argument, "convention must be 'amplitude' or 'range', got '" + std::string(s) + "'");
}

std::string_view to_string(BoundRule r) noexcept {
  return r == BoundRule::absolute ? "absolute" : "literal";
}

BoundRule parse_bound_rule(std::string_view s) {
  if (s == "absolute") return BoundRule::absolute;
  if (s == "literal") return BoundRule::literal;
  fail(ErrorCode::invalid_argument, "bound rule must be 'absolute' or 'literal', got '" + std::string(s) + "'");
}

}  // namespace fatigue
