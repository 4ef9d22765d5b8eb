#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stratsel/best_response.hpp"
#include "stratsel/model.hpp"

namespace stratsel {

// Selected mass induced by best responses to theta. The two values differ
// only when theta sits on some group's dropout threshold, where that group
// may play either best response.
struct ExcessMassEvaluation {
  double theta = 0.0;
  double mass_lo = 0.0;
  double mass_hi = 0.0;
};

Contestant contestant_of(const GameConfig& config, std::size_t g);

// A game instance with every group's dropout threshold precomputed.
// Accepts a single group of share 1, which is how the parity game is split.
class Game {
 public:
  explicit Game(GameConfig config);

  const GameConfig& config() const { return config_; }
  std::size_t size() const { return contestants_.size(); }
  const Contestant& contestant(std::size_t g) const { return contestants_.at(g); }
  const std::optional<DropoutInfo>& dropout(std::size_t g) const { return dropouts_.at(g); }

  ExcessMassEvaluation excess_mass(double theta) const;

  // Selected mass minus alpha, using the larger-payoff best response.
  double budget_gap(double theta) const;

  // [theta_lo, theta_hi] containing every value the threshold map can take.
  std::pair<double, double> solver_bracket() const;

  EquilibriumReport solve() const;
  // Solve on a caller-chosen bracket. Throws NoBracket unless the budget gap
  // is nonnegative at lo and nonpositive at hi.
  EquilibriumReport solve(std::pair<double, double> bracket) const;

 private:
  bool on_dropout(std::size_t g, double theta) const;
  EquilibriumReport pinned_report(double theta, const std::vector<std::size_t>& mixers) const;
  EquilibriumReport smooth_report(double theta) const;

  GameConfig config_;
  std::vector<Contestant> contestants_;
  std::vector<std::optional<DropoutInfo>> dropouts_;
};

ExcessMassEvaluation excess_mass(double theta, const GameConfig& config);
std::pair<double, double> solver_bracket(const GameConfig& config);

EquilibriumReport solve_unconstrained(const GameConfig& config);

// The game restricted to group g alone (share 1, same reward and alpha).
EquilibriumReport solve_single_group(const GameConfig& config, std::size_t g);

// Each group is selected at rate alpha against its own threshold.
EquilibriumReport solve_demographic_parity(const GameConfig& config);

}  // namespace stratsel
