#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace stratsel {

// What a single candidate's payoff depends on besides the threshold: the
// cost coefficient and the standard deviation of its score.
struct Contestant {
  double cost = 1.0;
  double sigma = 1.0;
};

// Probability of clearing threshold theta with effort m: Phi((m - theta) / sigma).
double selection_probability(double effort, double theta, double sigma);

// S * Phi((m - theta) / sigma) - C m^2 / 2.
double payoff(double effort, double theta, const Contestant& c, double reward);

// d payoff / d effort.
double payoff_slope(double effort, double theta, const Contestant& c, double reward);

// Smallest reward C sigma^2 / phi(1) at which the payoff can have two local maxima.
double critical_reward(const Contestant& c);

// Largest effort any stationary point can have: S phi(0) / (C sigma).
double max_stationary_effort(const Contestant& c, double reward);

// The threshold interval (theta_low, theta_high) on which the first-order
// condition has three roots, with the standardized distances z_low <= z_high
// where the payoff curvature changes sign. Empty below the critical reward.
struct FoldWindow {
  double z_low = 0.0;
  double z_high = 0.0;
  double theta_low = 0.0;
  double theta_high = 0.0;
};

std::optional<FoldWindow> fold_window(const Contestant& c, double reward);

enum class PointKind { local_max, local_min };

struct StationaryPoint {
  double effort = 0.0;
  PointKind kind = PointKind::local_max;
};

struct StationaryPoints {
  std::vector<StationaryPoint> points;  // ascending in effort; 1 or 3 entries
  std::optional<std::pair<double, double>> z_brackets;
};

StationaryPoints stationary_points(double theta, const Contestant& c, double reward);

// Global maximizers of the payoff. Two entries (ascending) only when the two
// local maxima tie within 1e-9 * S.
std::vector<double> best_response(double theta, const Contestant& c, double reward);

// The single maximizer, taking the larger payoff on a near tie.
double best_response_value(double theta, const Contestant& c, double reward);

struct DropoutInfo {
  double theta = 0.0;  // the dropout threshold
  double br_min = 0.0;
  double br_max = 0.0;
  double window_low = 0.0;   // theta_1
  double window_high = 0.0;  // theta_2
  double payoff_at_dropout = 0.0;
};

// Threshold at which the low- and high-effort local maxima pay the same.
// Throws SubcriticalReward when the reward is below critical_reward(c) or the
// fold window is narrower than 1e-9.
DropoutInfo dropout_threshold(const Contestant& c, double reward);

}  // namespace stratsel
