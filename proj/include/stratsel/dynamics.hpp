#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stratsel/equilibrium.hpp"
#include "stratsel/model.hpp"

namespace stratsel {

struct DynamicsState {
  std::vector<EffortDistribution> strategies;
  // (1 - alpha)-quantile of the score mixture the strategies induce.
  double theta = 0.0;
  // Running mean of every theta up to and including this state. Fictitious
  // play responds to it; best-response dynamics ignores it.
  double belief = 0.0;
  std::size_t t = 0;
};

enum class DynamicsMode { br, fp };
enum class DynamicsStatus { converged, cycle, max_steps_reached };

struct DynamicsTrace {
  DynamicsMode mode = DynamicsMode::br;
  std::vector<DynamicsState> states;
  std::vector<std::vector<double>> avg_effort;      // [step][group]
  std::vector<std::vector<double>> selection_rate;  // [step][group]
  DynamicsStatus status = DynamicsStatus::max_steps_reached;
  std::optional<double> theta_star;  // set when converged
  std::size_t period = 0;            // set when a cycle is found
  // Per-group mean of avg_effort over the final cycle, or over the last
  // min(100, steps) states otherwise.
  std::vector<double> window_avg_effort;

  // The threshold the population reacts to: theta for br, belief for fp.
  double tracked_theta(std::size_t step) const {
    return mode == DynamicsMode::br ? states.at(step).theta : states.at(step).belief;
  }
};

double induced_threshold(const std::vector<EffortDistribution>& strategies,
                         const GameConfig& config);

// Every group best-responds to `theta`; a dropout hit yields a 50/50 mix.
std::vector<EffortDistribution> best_response_profile(double theta, const Game& game);

// Synchronous best response to the current threshold.
DynamicsState br_step(const DynamicsState& state, const Game& game);
DynamicsState br_step(const DynamicsState& state, const GameConfig& config);

// Best response to the mean threshold over the whole history.
DynamicsState fp_step(const std::vector<DynamicsState>& history, const Game& game);
DynamicsState fp_step(const std::vector<DynamicsState>& history, const GameConfig& config);

struct DynamicsOptions {
  DynamicsMode mode = DynamicsMode::br;
  std::size_t max_steps = 1000;
  double tol = 1e-9;
  // Initial effort per group; all-zero effort when empty.
  std::vector<EffortDistribution> init;
};

DynamicsTrace run_dynamics(const GameConfig& config, const DynamicsOptions& options);

const char* to_string(DynamicsMode mode);
const char* to_string(DynamicsStatus status);

}  // namespace stratsel
