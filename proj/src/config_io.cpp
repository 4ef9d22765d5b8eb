#include "stratsel/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stratsel/errors.hpp"

namespace stratsel {

namespace {

double number_at(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw InvalidConfig(path + key + ": missing");
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidConfig(path + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_at(j, key, path);
}

}  // namespace

GameConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("config: expected a JSON object");
  GameConfig c;
  c.reward = number_at(j, "reward", "");
  c.alpha = number_at(j, "alpha", "");
  c.eta_sq = optional_number(j, "eta_sq", "").value_or(1.0);
  if (j.contains("dm_mode")) {
    const auto& m = j.at("dm_mode");
    if (m == "bayesian") {
      c.dm_mode = DmMode::bayesian;
    } else if (m == "oblivious") {
      c.dm_mode = DmMode::oblivious;
    } else {
      throw InvalidConfig("dm_mode: expected \"bayesian\" or \"oblivious\"");
    }
  }
  if (!j.contains("groups") || !j.at("groups").is_array())
    throw InvalidConfig("groups: expected an array");
  const auto& groups = j.at("groups");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& gj = groups[g];
    const std::string path = "groups[" + std::to_string(g) + "].";
    if (!gj.is_object()) throw InvalidConfig(path + ": expected an object");
    GroupParams p;
    if (gj.contains("label")) {
      if (!gj.at("label").is_string()) throw InvalidConfig(path + "label: expected a string");
      p.label = gj.at("label").get<std::string>();
    } else {
      p.label = "G" + std::to_string(g);
    }
    p.share = number_at(gj, "share", path);
    p.cost = number_at(gj, "cost", path);
    p.noise_var = optional_number(gj, "noise_var", path).value_or(0.0);
    p.eta_sq = optional_number(gj, "eta_sq", path);
    p.sigma_tilde = optional_number(gj, "sigma_tilde", path);
    c.groups.push_back(std::move(p));
  }
  return c;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
  }
}

GameConfig load_config(const std::string& path) { return config_from_json(load_json(path)); }

Json config_to_json(const GameConfig& config) {
  Json j;
  j["reward"] = config.reward;
  j["alpha"] = config.alpha;
  j["eta_sq"] = config.eta_sq;
  j["dm_mode"] = to_string(config.dm_mode);
  Json groups = Json::array();
  for (const auto& g : config.groups) {
    Json gj;
    gj["label"] = g.label;
    gj["share"] = g.share;
    gj["cost"] = g.cost;
    gj["noise_var"] = g.noise_var;
    if (g.eta_sq) gj["eta_sq"] = *g.eta_sq;
    if (g.sigma_tilde) gj["sigma_tilde"] = *g.sigma_tilde;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// nlohmann::json keeps object keys sorted, so dump() is canonical.
std::string content_hash(const Json& j) { return hash_hex(fnv1a(j.dump())); }

std::string config_hash(const GameConfig& config) { return content_hash(config_to_json(config)); }

Json report_to_json(const EquilibriumReport& report, const GameConfig& config) {
  Json j;
  j["mode"] = to_string(report.mode);
  if (report.mode == SolveMode::unconstrained) {
    j["threshold"] = report.thresholds.at(0);
    j["regime"] = to_string(report.regimes.at(0));
  }
  Json groups = Json::array();
  for (std::size_t g = 0; g < report.strategies.size(); ++g) {
    Json gj;
    gj["label"] = config.groups.at(g).label;
    gj["threshold"] = report.threshold_for(g);
    if (report.mode == SolveMode::demographic_parity) gj["regime"] = to_string(report.regimes.at(g));
    Json support = Json::array();
    for (const auto& a : report.strategies[g].support)
      support.push_back({{"effort", a.effort}, {"weight", a.weight}});
    gj["strategy"] = std::move(support);
    gj["avg_effort"] = report.avg_effort.at(g);
    gj["selection_rate"] = report.selection_rate.at(g);
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  j["quality"] = report.quality;
  if (report.mixing.empty()) {
    j["mixing_group"] = nullptr;
  } else {
    j["mixing_group"] = report.mixing.front().label;
    j["tau"] = report.mixing.front().tau;
  }
  Json mixing = Json::array();
  for (const auto& m : report.mixing) {
    mixing.push_back({{"label", m.label},
                      {"tau", m.tau},
                      {"effort_low", m.effort_low},
                      {"effort_high", m.effort_high}});
  }
  j["mixing"] = std::move(mixing);
  j["warnings"] = report.warnings;
  return j;
}

Json predictions_to_json(const AsymptoticPrediction& p, const GameConfig& config) {
  Json j;
  j["regime"] = to_string(p.regime);
  j["advantaged"] = config.groups.at(p.advantaged).label;
  j["disadvantaged"] = config.groups.at(p.disadvantaged).label;
  j["cost_factor"] = p.cost_factor;
  j["rate_ratio"] = p.predicted_rate_ratio;
  j["effort_ratio"] = p.predicted_effort_ratio;
  j["quality_ratio"] = p.predicted_quality_ratio;
  j["dp_effort_ratio"] = p.dp_effort_ratio;
  Json cmp;
  for (std::size_t g = 0; g < p.comparison_ratios.size(); ++g)
    cmp[config.groups.at(g).label] = p.comparison_ratios[g];
  j["effort_un_over_dp"] = std::move(cmp);
  return j;
}

Json crossings_to_json(const SmallSCrossings& s) {
  Json j;
  j["k_mu"] = s.k_mu ? Json(*s.k_mu) : Json(nullptr);
  j["k_x"] = s.k_x;
  j["xi"] = s.xi;
  if (s.alpha_effort_cross) {
    j["alpha_effort_cross"] = {s.alpha_effort_cross->first, s.alpha_effort_cross->second};
  } else {
    j["alpha_effort_cross"] = nullptr;
  }
  j["alpha_rate_cross"] = s.alpha_rate_cross;
  j["alpha_rate_cross_plus"] = s.alpha_rate_cross_plus;
  j["alpha_rate_cross_minus"] = s.alpha_rate_cross_minus;
  return j;
}

}  // namespace stratsel
