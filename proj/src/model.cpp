#include "stratsel/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "stratsel/errors.hpp"

namespace stratsel {

double posterior_variance(const GroupParams& group, double eta_sq, DmMode mode) {
  if (mode == DmMode::oblivious) return eta_sq + group.noise_var;
  return eta_sq * eta_sq / (group.noise_var + eta_sq);
}

double correlation_coefficient(const GroupParams& group, double eta_sq) {
  return std::sqrt(eta_sq / (eta_sq + group.noise_var));
}

double group_eta_sq(const GameConfig& config, std::size_t g) {
  const auto& group = config.groups.at(g);
  if (group.sigma_tilde) return *group.sigma_tilde * *group.sigma_tilde;
  return group.eta_sq.value_or(config.eta_sq);
}

double group_noise_var(const GameConfig& config, std::size_t g) {
  const auto& group = config.groups.at(g);
  return group.sigma_tilde ? 0.0 : group.noise_var;
}

double score_sd(const GameConfig& config, std::size_t g) {
  GroupParams effective = config.groups.at(g);
  effective.noise_var = group_noise_var(config, g);
  return std::sqrt(posterior_variance(effective, group_eta_sq(config, g), config.dm_mode));
}

double quality_spread(const GameConfig& config, std::size_t g) {
  if (config.dm_mode == DmMode::bayesian) return score_sd(config, g);
  const double eta_sq = group_eta_sq(config, g);
  return eta_sq / std::sqrt(eta_sq + group_noise_var(config, g));
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::vector<Violation> validate(const GameConfig& config) {
  std::vector<Violation> out;
  if (!positive_finite(config.reward))
    out.push_back({"reward", "reward S must be positive and finite, got " + fmt(config.reward)});
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    out.push_back({"alpha", "alpha must lie in (0,1), got " + fmt(config.alpha)});
  if (!positive_finite(config.eta_sq))
    out.push_back({"eta_sq", "eta_sq must be positive, got " + fmt(config.eta_sq)});
  if (config.groups.empty()) out.push_back({"groups", "at least one group is required"});

  double share_sum = 0.0;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const auto& group = config.groups[g];
    const std::string path = "groups[" + std::to_string(g) + "]";
    share_sum += group.share;
    if (!(group.share > 0.0 && group.share <= 1.0))
      out.push_back({path + ".share", "share must lie in (0,1], got " + fmt(group.share)});
    if (!positive_finite(group.cost))
      out.push_back({path + ".cost", "cost must be positive, got " + fmt(group.cost)});
    if (!(std::isfinite(group.noise_var) && group.noise_var >= 0.0))
      out.push_back(
          {path + ".noise_var", "noise_var must be nonnegative, got " + fmt(group.noise_var)});
    if (group.eta_sq && !positive_finite(*group.eta_sq))
      out.push_back({path + ".eta_sq", "eta_sq must be positive, got " + fmt(*group.eta_sq)});
    if (group.sigma_tilde) {
      if (!positive_finite(*group.sigma_tilde))
        out.push_back({path + ".sigma_tilde",
                       "sigma_tilde must be positive, got " + fmt(*group.sigma_tilde)});
      if (group.noise_var != 0.0)
        out.push_back({path + ".noise_var", "noise_var must be 0 when sigma_tilde is given"});
    }
    for (std::size_t h = 0; h < g; ++h) {
      if (config.groups[h].label == group.label)
        out.push_back({path + ".label", "duplicate group label '" + group.label + "'"});
    }
  }
  if (!config.groups.empty() && std::abs(share_sum - 1.0) > 1e-12)
    out.push_back({"groups", "shares sum to " + fmt(share_sum) + ", must sum to 1"});
  return out;
}

void require_valid(const GameConfig& config) {
  const auto violations = validate(config);
  if (violations.empty()) return;
  std::string msg = "invalid game config:";
  for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
  throw InvalidConfig(msg);
}

EffortDistribution EffortDistribution::mixture(double low, double high, double weight_high) {
  return {{{high, weight_high}, {low, 1.0 - weight_high}}};
}

double EffortDistribution::mean() const {
  double sum = 0.0;
  for (const auto& atom : support) sum += atom.weight * atom.effort;
  return sum;
}

double EffortDistribution::total_weight() const {
  return std::accumulate(support.begin(), support.end(), 0.0,
                         [](double acc, const EffortAtom& a) { return acc + a.weight; });
}

const char* to_string(DmMode mode) { return mode == DmMode::bayesian ? "bayesian" : "oblivious"; }

const char* to_string(SolveMode mode) {
  return mode == SolveMode::unconstrained ? "unconstrained" : "demographic_parity";
}

const char* to_string(Regime regime) {
  return regime == Regime::smooth ? "smooth" : "dropout_pinned";
}

}  // namespace stratsel
