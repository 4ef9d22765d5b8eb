#include "stratsel/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"
#include "stratsel/metrics.hpp"

namespace stratsel {

namespace {

constexpr double kDropoutMatchTol = 1e-9;
constexpr double kTauSlack = 1e-6;

bool matches(double theta, double theta_d) {
  return std::abs(theta - theta_d) <= kDropoutMatchTol * std::max(1.0, std::abs(theta_d));
}

// Root of sum_G p_G Phi^c((theta - center_G) / sigma_G) = alpha.
double tail_mass_root(const std::vector<double>& shares, const std::vector<double>& centers,
                      const std::vector<double>& sigmas, double alpha) {
  const double q = math::normal_quantile(1.0 - alpha);
  double lo = centers[0] + sigmas[0] * q;
  double hi = lo;
  for (std::size_t g = 1; g < shares.size(); ++g) {
    lo = std::min(lo, centers[g] + sigmas[g] * q);
    hi = std::max(hi, centers[g] + sigmas[g] * q);
  }
  if (hi - lo <= 0.0) return lo;
  auto f = [&](double theta) {
    double mass = 0.0;
    for (std::size_t g = 0; g < shares.size(); ++g)
      mass += shares[g] * math::normal_ccdf((theta - centers[g]) / sigmas[g]);
    return mass - alpha;
  };
  return math::find_root(f, lo, hi, {1e-14, 400});
}

}  // namespace

Contestant contestant_of(const GameConfig& config, std::size_t g) {
  return {config.groups.at(g).cost, score_sd(config, g)};
}

Game::Game(GameConfig config) : config_(std::move(config)) {
  if (config_.groups.empty()) throw InvalidConfig("game needs at least one group");
  for (std::size_t g = 0; g < config_.groups.size(); ++g) {
    contestants_.push_back(contestant_of(config_, g));
    try {
      dropouts_.emplace_back(dropout_threshold(contestants_.back(), config_.reward));
    } catch (const SubcriticalReward&) {
      dropouts_.emplace_back(std::nullopt);
    }
  }
}

bool Game::on_dropout(std::size_t g, double theta) const {
  return dropouts_[g] && matches(theta, dropouts_[g]->theta);
}

ExcessMassEvaluation Game::excess_mass(double theta) const {
  ExcessMassEvaluation out{theta, 0.0, 0.0};
  for (std::size_t g = 0; g < size(); ++g) {
    const double share = config_.groups[g].share;
    const auto& c = contestants_[g];
    if (on_dropout(g, theta)) {
      out.mass_lo += share * selection_probability(dropouts_[g]->br_min, theta, c.sigma);
      out.mass_hi += share * selection_probability(dropouts_[g]->br_max, theta, c.sigma);
    } else {
      const double x =
          selection_probability(best_response_value(theta, c, config_.reward), theta, c.sigma);
      out.mass_lo += share * x;
      out.mass_hi += share * x;
    }
  }
  return out;
}

double Game::budget_gap(double theta) const {
  double mass = 0.0;
  for (std::size_t g = 0; g < size(); ++g) {
    const auto& c = contestants_[g];
    mass += config_.groups[g].share *
            selection_probability(best_response_value(theta, c, config_.reward), theta, c.sigma);
  }
  return mass - config_.alpha;
}

std::pair<double, double> Game::solver_bracket() const {
  std::vector<double> shares;
  std::vector<double> zeros;
  std::vector<double> caps;
  std::vector<double> sigmas;
  for (std::size_t g = 0; g < size(); ++g) {
    shares.push_back(config_.groups[g].share);
    zeros.push_back(0.0);
    caps.push_back(std::sqrt(2.0 * config_.reward / contestants_[g].cost));
    sigmas.push_back(contestants_[g].sigma);
  }
  return {tail_mass_root(shares, zeros, sigmas, config_.alpha),
          tail_mass_root(shares, caps, sigmas, config_.alpha)};
}

EquilibriumReport Game::solve() const { return solve(solver_bracket()); }

EquilibriumReport Game::solve(std::pair<double, double> bracket) const {
  const auto [lo, hi] = bracket;
  if (!(lo <= hi) || budget_gap(lo) < 0.0 || budget_gap(hi) > 0.0) {
    std::ostringstream msg;
    msg << "equilibrium bracket [" << lo << ", " << hi << "] does not straddle the budget";
    throw NoBracket(msg.str());
  }

  // The budget gap is decreasing in theta and jumps down only at dropout
  // thresholds; a jump that straddles zero is the equilibrium.
  std::vector<std::size_t> order;
  for (std::size_t g = 0; g < size(); ++g) {
    if (dropouts_[g] && dropouts_[g]->theta >= lo && dropouts_[g]->theta <= hi) order.push_back(g);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dropouts_[a]->theta < dropouts_[b]->theta;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double theta_d = dropouts_[order[i]]->theta;
    const auto mass = excess_mass(theta_d);
    if (mass.mass_lo <= config_.alpha && config_.alpha <= mass.mass_hi &&
        mass.mass_lo < mass.mass_hi) {
      std::vector<std::size_t> mixers;
      for (std::size_t g = 0; g < size(); ++g) {
        if (on_dropout(g, theta_d)) mixers.push_back(g);
      }
      return pinned_report(theta_d, mixers);
    }
  }

  const double theta = math::find_root([this](double t) { return budget_gap(t); }, lo, hi,
                                       {1e-14, 400});
  return smooth_report(theta);
}

EquilibriumReport Game::pinned_report(double theta, const std::vector<std::size_t>& mixers) const {
  EquilibriumReport report;
  report.mode = SolveMode::unconstrained;
  report.thresholds = {theta};
  report.regimes = {Regime::dropout_pinned};
  report.strategies.resize(size());

  double fixed_mass = 0.0;
  double swing = 0.0;
  for (std::size_t g = 0; g < size(); ++g) {
    const double share = config_.groups[g].share;
    const auto& c = contestants_[g];
    if (std::find(mixers.begin(), mixers.end(), g) != mixers.end()) {
      const double x_min = selection_probability(dropouts_[g]->br_min, theta, c.sigma);
      const double x_max = selection_probability(dropouts_[g]->br_max, theta, c.sigma);
      fixed_mass += share * x_min;
      swing += share * (x_max - x_min);
    } else {
      const double m = best_response_value(theta, c, config_.reward);
      report.strategies[g] = EffortDistribution::point(m);
      fixed_mass += share * selection_probability(m, theta, c.sigma);
    }
  }
  double tau = (config_.alpha - fixed_mass) / swing;
  if (tau < -kTauSlack || tau > 1.0 + kTauSlack) {
    std::ostringstream msg;
    msg << "mixing weight " << tau << " outside [0,1] at dropout threshold " << theta;
    throw NoConvergence(msg.str());
  }
  tau = std::clamp(tau, 0.0, 1.0);

  if (mixers.size() > 1) {
    std::ostringstream msg;
    msg << mixers.size() << " groups share the dropout threshold " << theta
        << "; they mix with a common weight";
    report.warnings.push_back(msg.str());
  }
  for (std::size_t g : mixers) {
    const auto& d = *dropouts_[g];
    report.strategies[g] = EffortDistribution::mixture(d.br_min, d.br_max, tau);
    report.mixing.push_back({g, config_.groups[g].label, tau, d.br_min, d.br_max});
  }
  for (std::size_t g = 0; g < size(); ++g) {
    report.avg_effort.push_back(average_effort(report.strategies[g]));
    report.selection_rate.push_back(
        selection_rate(report.strategies[g], theta, contestants_[g].sigma));
  }
  report.quality = selection_quality(report, config_);
  return report;
}

EquilibriumReport Game::smooth_report(double theta) const {
  EquilibriumReport report;
  report.mode = SolveMode::unconstrained;
  report.thresholds = {theta};
  report.regimes = {Regime::smooth};
  for (std::size_t g = 0; g < size(); ++g) {
    const auto& c = contestants_[g];
    report.strategies.push_back(
        EffortDistribution::point(best_response_value(theta, c, config_.reward)));
    report.avg_effort.push_back(average_effort(report.strategies[g]));
    report.selection_rate.push_back(selection_rate(report.strategies[g], theta, c.sigma));
  }
  report.quality = selection_quality(report, config_);
  return report;
}

ExcessMassEvaluation excess_mass(double theta, const GameConfig& config) {
  require_valid(config);
  return Game(config).excess_mass(theta);
}

std::pair<double, double> solver_bracket(const GameConfig& config) {
  require_valid(config);
  return Game(config).solver_bracket();
}

EquilibriumReport solve_unconstrained(const GameConfig& config) {
  require_valid(config);
  return Game(config).solve();
}

namespace {

GameConfig single_group_config(const GameConfig& config, std::size_t g) {
  GameConfig alone = config;
  alone.groups = {config.groups.at(g)};
  alone.groups.front().share = 1.0;
  return alone;
}

}  // namespace

EquilibriumReport solve_single_group(const GameConfig& config, std::size_t g) {
  require_valid(config);
  return Game(single_group_config(config, g)).solve();
}

EquilibriumReport solve_demographic_parity(const GameConfig& config) {
  require_valid(config);
  EquilibriumReport report;
  report.mode = SolveMode::demographic_parity;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const auto part = Game(single_group_config(config, g)).solve();
    report.thresholds.push_back(part.thresholds.front());
    report.regimes.push_back(part.regimes.front());
    report.strategies.push_back(part.strategies.front());
    report.avg_effort.push_back(part.avg_effort.front());
    report.selection_rate.push_back(part.selection_rate.front());
    for (auto mix : part.mixing) {
      mix.group = g;
      mix.label = config.groups[g].label;
      report.mixing.push_back(mix);
    }
  }
  report.quality = selection_quality(report, config);
  return report;
}

}  // namespace stratsel
