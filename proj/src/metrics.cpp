#include "stratsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"

namespace stratsel {

using math::normal_cdf;
using math::normal_ccdf;
using math::normal_pdf;

double average_effort(const EffortDistribution& strategy) { return strategy.mean(); }

double selection_rate(const EffortDistribution& strategy, double theta, double sigma) {
  double rate = 0.0;
  for (const auto& atom : strategy.support)
    rate += atom.weight * normal_cdf((atom.effort - theta) / sigma);
  return rate;
}

double group_selection_quality(const EffortDistribution& strategy, double theta, double sigma,
                               double spread) {
  double q = 0.0;
  for (const auto& atom : strategy.support) {
    const double z = (atom.effort - theta) / sigma;
    q += atom.weight * (atom.effort * normal_cdf(z) + spread * normal_pdf(z));
  }
  return q;
}

double selection_quality(const EquilibriumReport& report, const GameConfig& config) {
  double q = 0.0;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    q += config.groups[g].share * group_selection_quality(report.strategies.at(g),
                                                          report.threshold_for(g),
                                                          score_sd(config, g),
                                                          quality_spread(config, g));
  }
  return q;
}

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void require_two_groups(const GameConfig& config, const char* what) {
  require_valid(config);
  if (config.groups.size() != 2) {
    std::ostringstream msg;
    msg << what << " requires exactly 2 groups, got " << config.groups.size();
    throw InvalidConfig(msg.str());
  }
}

}  // namespace

AsymptoticPrediction asymptotic_predictions(const GameConfig& config) {
  require_two_groups(config, "asymptotic_predictions");
  const double c0 = config.groups[0].cost;
  const double c1 = config.groups[1].cost;
  const double s0 = score_sd(config, 0);
  const double s1 = score_sd(config, 1);

  AsymptoticPrediction out;
  if (nearly_equal(c0, c1)) {
    if (nearly_equal(s0, s1))
      throw AmbiguousRegime("groups have equal cost and equal score deviation; all ratios are 1");
    out.regime = CostRegime::equal_cost;
    out.advantaged = s0 < s1 ? 0 : 1;
  } else {
    out.regime = CostRegime::cost_gap;
    out.advantaged = c0 < c1 ? 0 : 1;
  }
  out.disadvantaged = 1 - out.advantaged;

  const double p1 = config.groups[out.advantaged].share;
  const double p2 = config.groups[out.disadvantaged].share;
  const double alpha = config.alpha;
  const double c = out.regime == CostRegime::equal_cost
                       ? 1.0
                       : std::sqrt(config.groups[out.advantaged].cost /
                                   config.groups[out.disadvantaged].cost);
  out.cost_factor = c;

  const bool budget_fits = alpha <= p1;
  out.predicted_rate_ratio = budget_fits ? 0.0 : (alpha - p1) / (1.0 - p1);
  out.predicted_effort_ratio = out.predicted_rate_ratio;
  out.predicted_quality_ratio = budget_fits ? 1.0 / (c * p2 + p1) : c / (c * p2 + p1);
  out.dp_effort_ratio = c;

  out.comparison_ratios.assign(2, 0.0);
  out.comparison_ratios[out.advantaged] = budget_fits ? 1.0 / p1 : c / alpha;
  out.comparison_ratios[out.disadvantaged] =
      budget_fits ? 0.0 : (alpha - p1) / (alpha * (1.0 - p1));
  return out;
}

SmallSCrossings small_s_crossings(const GameConfig& config) {
  require_two_groups(config, "small_s_crossings");
  const double s_h = score_sd(config, 0);
  const double s_l = score_sd(config, 1);
  const double c_h = config.groups[0].cost;
  const double c_l = config.groups[1].cost;
  for (std::size_t g = 0; g < 2; ++g) {
    const double sigma = score_sd(config, g);
    const double bound = config.groups[g].cost * sigma * sigma / normal_pdf(1.0);
    if (!(config.reward < bound)) {
      std::ostringstream msg;
      msg << "reward " << config.reward << " is not below C sigma^2 / phi(1) = " << bound
          << " for group '" << config.groups[g].label << "'";
      throw SubcriticalityViolated(msg.str());
    }
  }
  if (nearly_equal(s_h, s_l))
    throw DegenerateVariance("both groups have the same score deviation");

  SmallSCrossings out;
  const double p_h = config.groups[0].share;
  const double p_l = config.groups[1].share;

  const double k_mu_sq =
      -2.0 * std::log(c_h * s_h / (c_l * s_l)) / (1.0 / (s_h * s_h) - 1.0 / (s_l * s_l));
  if (k_mu_sq >= 0.0) {
    const double k = std::sqrt(k_mu_sq);
    out.k_mu = k;
    const double a = p_h * normal_ccdf(k / s_h) + p_l * normal_ccdf(k / s_l);
    const double b = p_h * normal_ccdf(-k / s_h) + p_l * normal_ccdf(-k / s_l);
    out.alpha_effort_cross = std::make_pair(std::min(a, b), std::max(a, b));
  }

  out.xi = config.reward * (1.0 / (c_h * s_h) - 1.0 / (c_l * s_l)) / (s_l - s_h);
  out.k_x = std::sqrt(
      math::lambert_w(math::LambertBranch::principal, out.xi * out.xi / (2.0 * math::kPi)));
  const double sign = out.xi > 0 ? 1.0 : (out.xi < 0 ? -1.0 : 0.0);
  out.alpha_rate_cross = normal_ccdf(sign * out.k_x);
  out.alpha_rate_cross_plus = normal_ccdf(out.k_x);
  out.alpha_rate_cross_minus = normal_ccdf(-out.k_x);
  return out;
}

const char* to_string(CostRegime regime) {
  return regime == CostRegime::equal_cost ? "equal_cost" : "cost_gap";
}

}  // namespace stratsel
