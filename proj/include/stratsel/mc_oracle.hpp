#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stratsel/best_response.hpp"
#include "stratsel/model.hpp"

namespace stratsel {

// Counter-based generator: the k-th draw of stream s under seed x is a pure
// function of (x, s, k), so any partition of the work reproduces the same
// numbers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  // Standard normal by inversion.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

constexpr std::size_t kMinSamples = 1000;

// Fraction of candidates of group g with effort m whose score clears theta,
// sampled through latent quality, noisy estimate and the decision-maker's score.
McEstimate mc_selection_probability(double effort, double theta, const GameConfig& config,
                                    std::size_t g, std::size_t n, std::uint64_t seed);

// Mean of W * 1{score >= theta_group} over a random candidate. `thresholds`
// holds one global value or one per group.
McEstimate mc_selection_quality(const std::vector<EffortDistribution>& strategies,
                                const std::vector<double>& thresholds, const GameConfig& config,
                                std::size_t n, std::uint64_t seed);

// Uniform grid on [0, sqrt(2S/C) + 6 sigma]; one point means the grid {0}.
double grid_step(const Contestant& c, double reward, std::size_t grid_points);
double grid_argmax_payoff(double theta, const Contestant& c, double reward,
                          std::size_t grid_points);

// Largest payoff gain any atom of any group could get by deviating. The best
// deviation is the better of the analytic best response and a grid search.
double nash_gap(const EquilibriumReport& report, const GameConfig& config,
                std::size_t grid_points = 10000);

// One analytic-versus-oracle comparison.
struct OracleCheck {
  std::string name;
  double analytic = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Tolerance is three standard errors, never below the binomial error of the
// analytic value or the 1/n resolution of the estimate.
OracleCheck check_selection_probability(double effort, double theta, const GameConfig& config,
                                        std::size_t g, std::size_t n, std::uint64_t seed);
OracleCheck check_selection_quality(const EquilibriumReport& report, const GameConfig& config,
                                    std::size_t n, std::uint64_t seed);
// Grid argmax must lie within one grid step of some analytic best response.
OracleCheck check_best_response(double theta, const GameConfig& config, std::size_t g,
                                std::size_t grid_points);
// Deviation gain must not exceed 1e-7 * S.
OracleCheck check_nash_gap(const EquilibriumReport& report, const GameConfig& config,
                           std::size_t grid_points);

}  // namespace stratsel
