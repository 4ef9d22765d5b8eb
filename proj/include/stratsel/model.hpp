#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace stratsel {

// How the decision-maker scores a candidate. bayesian ranks by the posterior
// mean of quality; oblivious ranks by the raw noisy estimate.
enum class DmMode { bayesian, oblivious };

struct GroupParams {
  std::string label;
  double share = 0.0;
  double cost = 1.0;       // cost per effort^2 (payoff charges cost * m^2 / 2)
  double noise_var = 0.0;  // variance of the estimation noise
  // Per-group latent-quality variance; falls back to GameConfig::eta_sq.
  std::optional<double> eta_sq;
  // Fixes the score standard deviation directly. Equivalent to noise_var = 0
  // and eta_sq = sigma_tilde^2, which is how it is realized everywhere.
  std::optional<double> sigma_tilde;
};

struct GameConfig {
  double reward = 1.0;  // S
  double alpha = 0.5;   // selected fraction
  double eta_sq = 1.0;  // latent quality variance
  std::vector<GroupParams> groups;
  DmMode dm_mode = DmMode::bayesian;
};

struct Violation {
  std::string field;
  std::string message;
};

// Variance of the score the decision-maker thresholds on.
// bayesian: eta^4 / (noise_var + eta^2); oblivious: eta^2 + noise_var.
double posterior_variance(const GroupParams& group, double eta_sq, DmMode mode);

// Correlation between latent quality and its noisy estimate.
double correlation_coefficient(const GroupParams& group, double eta_sq);

// Latent-quality variance of group g after overrides.
double group_eta_sq(const GameConfig& config, std::size_t g);
// Estimation-noise variance of group g after overrides.
double group_noise_var(const GameConfig& config, std::size_t g);
// Standard deviation of the score distribution of group g (sigma tilde).
double score_sd(const GameConfig& config, std::size_t g);
// Cov(W, score) / sd(score): the coefficient of the density term in the
// expected selected quality. Equals score_sd in bayesian mode.
double quality_spread(const GameConfig& config, std::size_t g);

std::vector<Violation> validate(const GameConfig& config);

// Throws InvalidConfig listing every violation.
void require_valid(const GameConfig& config);

// A group's effort distribution with finite support.
struct EffortAtom {
  double effort = 0.0;
  double weight = 1.0;
};

struct EffortDistribution {
  std::vector<EffortAtom> support;

  static EffortDistribution point(double effort) { return {{{effort, 1.0}}}; }
  // weight_high on effort `high`, the rest on `low`.
  static EffortDistribution mixture(double low, double high, double weight_high);

  double mean() const;
  double total_weight() const;
};

enum class SolveMode { unconstrained, demographic_parity };

// Whether an equilibrium threshold sits on a dropout jump (one group mixes)
// or on a continuous crossing of the selection budget (all pure).
enum class Regime { smooth, dropout_pinned };

struct MixingInfo {
  std::size_t group = 0;
  std::string label;
  double tau = 0.0;  // weight on the high best response
  double effort_low = 0.0;
  double effort_high = 0.0;
};

struct EquilibriumReport {
  SolveMode mode = SolveMode::unconstrained;
  // One global threshold (unconstrained) or one per group (parity).
  std::vector<double> thresholds;
  std::vector<Regime> regimes;  // aligned with thresholds
  std::vector<EffortDistribution> strategies;
  std::vector<double> avg_effort;
  std::vector<double> selection_rate;
  double quality = 0.0;
  std::vector<MixingInfo> mixing;
  std::vector<std::string> warnings;

  double threshold_for(std::size_t g) const {
    return thresholds.size() == 1 ? thresholds.front() : thresholds.at(g);
  }
};

const char* to_string(DmMode mode);
const char* to_string(SolveMode mode);
const char* to_string(Regime regime);

}  // namespace stratsel
