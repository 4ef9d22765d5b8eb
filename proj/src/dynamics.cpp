#include "stratsel/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"
#include "stratsel/metrics.hpp"

namespace stratsel {

namespace {

constexpr std::size_t kMaxPeriod = 50;
constexpr double kCycleTol = 1e-7;
constexpr double kCycleShare = 1e-3;
constexpr std::size_t kStableSteps = 10;
constexpr std::size_t kTailWindow = 100;

double induced_threshold(const std::vector<EffortDistribution>& strategies, const Game& game) {
  const auto& config = game.config();
  const double q = math::normal_quantile(1.0 - config.alpha);
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (std::size_t g = 0; g < strategies.size(); ++g) {
    const double sigma = game.contestant(g).sigma;
    for (const auto& atom : strategies[g].support) {
      const double v = atom.effort + sigma * q;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (first) throw InvalidConfig("induced_threshold: empty strategies");
  if (hi - lo <= 0.0) return lo;
  auto upper_mass = [&](double theta) {
    double mass = 0.0;
    for (std::size_t g = 0; g < strategies.size(); ++g) {
      const double sigma = game.contestant(g).sigma;
      for (const auto& atom : strategies[g].support)
        mass += config.groups[g].share * atom.weight *
                math::normal_ccdf((theta - atom.effort) / sigma);
    }
    return mass - config.alpha;
  };
  return math::find_root(upper_mass, lo, hi, {1e-14, 400});
}

DynamicsState respond(double target, double belief_sum, std::size_t count, std::size_t t,
                      const Game& game) {
  DynamicsState next;
  next.strategies = best_response_profile(target, game);
  next.theta = induced_threshold(next.strategies, game);
  next.belief = (belief_sum + next.theta) / static_cast<double>(count + 1);
  next.t = t;
  return next;
}

}  // namespace

double induced_threshold(const std::vector<EffortDistribution>& strategies,
                         const GameConfig& config) {
  require_valid(config);
  return induced_threshold(strategies, Game(config));
}

std::vector<EffortDistribution> best_response_profile(double theta, const Game& game) {
  std::vector<EffortDistribution> out;
  for (std::size_t g = 0; g < game.size(); ++g) {
    const auto& d = game.dropout(g);
    if (d && std::abs(theta - d->theta) <= 1e-9 * std::max(1.0, std::abs(d->theta))) {
      out.push_back(EffortDistribution::mixture(d->br_min, d->br_max, 0.5));
    } else {
      out.push_back(EffortDistribution::point(
          best_response_value(theta, game.contestant(g), game.config().reward)));
    }
  }
  return out;
}

DynamicsState br_step(const DynamicsState& state, const Game& game) {
  // A best-response step forgets history: the belief restarts at one sample.
  return respond(state.theta, 0.0, 0, state.t + 1, game);
}

DynamicsState br_step(const DynamicsState& state, const GameConfig& config) {
  require_valid(config);
  return br_step(state, Game(config));
}

DynamicsState fp_step(const std::vector<DynamicsState>& history, const Game& game) {
  if (history.empty()) throw InvalidConfig("fp_step: empty history");
  double sum = 0.0;
  for (const auto& s : history) sum += s.theta;
  const double mean = sum / static_cast<double>(history.size());
  return respond(mean, sum, history.size(), history.back().t + 1, game);
}

DynamicsState fp_step(const std::vector<DynamicsState>& history, const GameConfig& config) {
  require_valid(config);
  return fp_step(history, Game(config));
}

DynamicsTrace run_dynamics(const GameConfig& config, const DynamicsOptions& options) {
  require_valid(config);
  const Game game(config);
  const std::size_t n = config.groups.size();

  DynamicsTrace trace;
  trace.mode = options.mode;

  DynamicsState state;
  state.strategies = options.init;
  if (state.strategies.empty()) state.strategies.assign(n, EffortDistribution::point(0.0));
  if (state.strategies.size() != n)
    throw InvalidConfig("dynamics: init must give one strategy per group");
  state.theta = induced_threshold(state.strategies, game);
  state.belief = state.theta;
  state.t = 0;

  auto record = [&](DynamicsState s) {
    std::vector<double> efforts;
    std::vector<double> rates;
    for (std::size_t g = 0; g < n; ++g) {
      efforts.push_back(average_effort(s.strategies[g]));
      rates.push_back(selection_rate(s.strategies[g], s.theta, game.contestant(g).sigma));
    }
    trace.avg_effort.push_back(std::move(efforts));
    trace.selection_rate.push_back(std::move(rates));
    trace.states.push_back(std::move(s));
  };
  record(state);

  double theta_sum = state.theta;
  std::size_t stable = 0;
  for (std::size_t step = 1; step <= options.max_steps; ++step) {
    const auto& prev = trace.states.back();
    DynamicsState next;
    if (options.mode == DynamicsMode::br) {
      next = br_step(prev, game);
    } else {
      const double count = static_cast<double>(trace.states.size());
      next = respond(theta_sum / count, theta_sum, trace.states.size(), prev.t + 1, game);
    }
    theta_sum += next.theta;
    record(std::move(next));

    const std::size_t last = trace.states.size() - 1;
    const double delta = std::abs(trace.tracked_theta(last) - trace.tracked_theta(last - 1));
    stable = delta <= options.tol ? stable + 1 : 0;
    if (stable >= kStableSteps) {
      trace.status = DynamicsStatus::converged;
      trace.theta_star = trace.tracked_theta(last);
      break;
    }
    if (options.mode == DynamicsMode::br) {
      for (std::size_t p = 2; p <= kMaxPeriod && 3 * p <= last; ++p) {
        double mismatch = 0.0;
        double lo = trace.states[last].theta;
        double hi = lo;
        for (std::size_t k = 0; k < 2 * p && mismatch <= kCycleTol; ++k) {
          const double here = trace.states[last - k].theta;
          mismatch = std::max(mismatch, std::abs(here - trace.states[last - k - p].theta));
          lo = std::min(lo, here);
          hi = std::max(hi, here);
        }
        // A damped oscillation also repeats to within kCycleTol once it is
        // small enough; a genuine cycle repeats far more tightly than it swings.
        if (mismatch <= kCycleTol && mismatch <= kCycleShare * (hi - lo)) {
          trace.status = DynamicsStatus::cycle;
          trace.period = p;
          break;
        }
      }
      if (trace.status == DynamicsStatus::cycle) break;
    }
  }

  std::size_t window = 1;
  if (trace.status == DynamicsStatus::cycle) {
    window = trace.period;
  } else if (trace.status == DynamicsStatus::max_steps_reached) {
    window = std::min(kTailWindow, trace.states.size());
  }
  trace.window_avg_effort.assign(n, 0.0);
  for (std::size_t k = trace.states.size() - window; k < trace.states.size(); ++k) {
    for (std::size_t g = 0; g < n; ++g) trace.window_avg_effort[g] += trace.avg_effort[k][g];
  }
  for (auto& v : trace.window_avg_effort) v /= static_cast<double>(window);
  return trace;
}

const char* to_string(DynamicsMode mode) { return mode == DynamicsMode::br ? "br" : "fp"; }

const char* to_string(DynamicsStatus status) {
  switch (status) {
    case DynamicsStatus::converged:
      return "converged";
    case DynamicsStatus::cycle:
      return "cycle";
    case DynamicsStatus::max_steps_reached:
      return "max_steps_reached";
  }
  return "unknown";
}

}  // namespace stratsel
