#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratsel/model.hpp"

namespace stratsel {

double average_effort(const EffortDistribution& strategy);

// Sum of weight * Phi((m - theta) / sigma) over the support.
double selection_rate(const EffortDistribution& strategy, double theta, double sigma);

// Expected latent quality mass that one group contributes to the selection:
// sum of weight * [m Phi((m - theta)/sigma) + spread phi((theta - m)/sigma)].
double group_selection_quality(const EffortDistribution& strategy, double theta, double sigma,
                               double spread);

// Share-weighted total over groups, each against its own threshold.
double selection_quality(const EquilibriumReport& report, const GameConfig& config);

enum class CostRegime { equal_cost, cost_gap };

// Large-reward limits for a two-group game. The advantaged group is the one
// with the larger dropout threshold: lower cost, or equal cost and smaller
// score deviation. Every ratio is disadvantaged over advantaged.
struct AsymptoticPrediction {
  CostRegime regime = CostRegime::equal_cost;
  std::size_t advantaged = 0;
  std::size_t disadvantaged = 1;
  double cost_factor = 1.0;  // c = sqrt(C_adv / C_dis)
  double predicted_rate_ratio = 0.0;
  double predicted_effort_ratio = 0.0;
  double predicted_quality_ratio = 1.0;  // Q_un / Q_dp
  double dp_effort_ratio = 1.0;
  // Per group: average effort unconstrained / parity.
  std::vector<double> comparison_ratios;
};

// Throws AmbiguousRegime for identical costs and score deviations.
AsymptoticPrediction asymptotic_predictions(const GameConfig& config);

// Closed forms in the small-reward regime. Group 0 plays the role of H and
// group 1 of L in the formulas.
struct SmallSCrossings {
  std::optional<double> k_mu;
  double k_x = 0.0;
  double xi = 0.0;
  // alpha values at which the two groups' efforts coincide, ascending.
  std::optional<std::pair<double, double>> alpha_effort_cross;
  // alpha at which the two selection rates coincide (signed form).
  double alpha_rate_cross = 0.5;
  // Unsigned variants Phi^c(K_x) and Phi^c(-K_x).
  double alpha_rate_cross_plus = 0.5;
  double alpha_rate_cross_minus = 0.5;
};

// Throws SubcriticalityViolated if the reward reaches C sigma^2 / phi(1) for
// either group, DegenerateVariance when both sigmas coincide.
SmallSCrossings small_s_crossings(const GameConfig& config);

const char* to_string(CostRegime regime);

}  // namespace stratsel
