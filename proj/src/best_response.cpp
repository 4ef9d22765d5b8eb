#include "stratsel/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"

namespace stratsel {

using math::normal_cdf;
using math::normal_pdf;

double selection_probability(double effort, double theta, double sigma) {
  return normal_cdf((effort - theta) / sigma);
}

double payoff(double effort, double theta, const Contestant& c, double reward) {
  return reward * selection_probability(effort, theta, c.sigma) - 0.5 * c.cost * effort * effort;
}

double payoff_slope(double effort, double theta, const Contestant& c, double reward) {
  return reward / c.sigma * normal_pdf((effort - theta) / c.sigma) - c.cost * effort;
}

double critical_reward(const Contestant& c) { return c.cost * c.sigma * c.sigma / normal_pdf(1.0); }

double max_stationary_effort(const Contestant& c, double reward) {
  return reward * math::kInvSqrt2Pi / (c.cost * c.sigma);
}

std::optional<FoldWindow> fold_window(const Contestant& c, double reward) {
  if (reward < critical_reward(c)) return std::nullopt;
  // Curvature vanishes where z phi(z) = -C sigma^2 / S; squaring gives
  // (-z^2) e^{-z^2} = -2 pi (C sigma^2 / S)^2.
  const double k = c.cost * c.sigma * c.sigma / reward;
  const double arg = std::max(-2.0 * math::kPi * k * k, -1.0 / math::kE);
  FoldWindow w;
  w.z_low = -std::sqrt(-math::lambert_w(math::LambertBranch::minus_one, arg));
  w.z_high = -std::sqrt(-math::lambert_w(math::LambertBranch::principal, arg));
  auto v = [&](double z) { return reward / c.sigma * normal_pdf(z) - c.cost * c.sigma * z; };
  w.theta_low = v(w.z_low) / c.cost;
  w.theta_high = v(w.z_high) / c.cost;
  return w;
}

namespace {

constexpr math::RootConfig kFocRoot{1e-14, 400};

// Root of the FOC on [lo, hi], where the slope is monotone. Rounding at a
// fold can make a touching endpoint miss the sign change; then the endpoint
// closer to zero is returned.
double monotone_foc_root(double theta, const Contestant& c, double reward, double lo, double hi) {
  auto f = [&](double m) { return payoff_slope(m, theta, c, reward); };
  const double flo = f(lo);
  const double fhi = f(hi);
  if ((flo > 0 && fhi > 0) || (flo < 0 && fhi < 0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
  return math::find_root(f, lo, hi, kFocRoot);
}

struct Branches {
  double low = 0.0;   // root left of the fold
  double high = 0.0;  // root right of the fold
};

// The two outer FOC roots for theta inside the fold window.
Branches outer_roots(double theta, const Contestant& c, double reward, const FoldWindow& w) {
  const double m_max = max_stationary_effort(c, reward);
  const double m_a = std::max(0.0, theta + c.sigma * w.z_low);
  const double m_b = std::max(0.0, theta + c.sigma * w.z_high);
  return {monotone_foc_root(theta, c, reward, 0.0, m_a),
          monotone_foc_root(theta, c, reward, m_b, std::max(m_b, m_max))};
}

}  // namespace

StationaryPoints stationary_points(double theta, const Contestant& c, double reward) {
  StationaryPoints out;
  const double m_max = max_stationary_effort(c, reward);
  const auto window = fold_window(c, reward);
  if (!window) {
    out.points.push_back({monotone_foc_root(theta, c, reward, 0.0, m_max), PointKind::local_max});
    return out;
  }
  out.z_brackets = std::make_pair(window->z_low, window->z_high);
  const double m_a = std::max(0.0, theta + c.sigma * window->z_low);
  const double m_b = std::max(0.0, theta + c.sigma * window->z_high);
  if (theta <= window->theta_low) {
    out.points.push_back(
        {monotone_foc_root(theta, c, reward, m_b, std::max(m_b, m_max)), PointKind::local_max});
  } else if (theta >= window->theta_high) {
    out.points.push_back(
        {monotone_foc_root(theta, c, reward, 0.0, std::min(m_a, m_max)), PointKind::local_max});
  } else {
    out.points.push_back({monotone_foc_root(theta, c, reward, 0.0, m_a), PointKind::local_max});
    out.points.push_back({monotone_foc_root(theta, c, reward, m_a, m_b), PointKind::local_min});
    out.points.push_back(
        {monotone_foc_root(theta, c, reward, m_b, std::max(m_b, m_max)), PointKind::local_max});
  }
  return out;
}

std::vector<double> best_response(double theta, const Contestant& c, double reward) {
  const auto sp = stationary_points(theta, c, reward);
  if (sp.points.size() == 1) return {sp.points.front().effort};
  const double low = sp.points.front().effort;
  const double high = sp.points.back().effort;
  const double gap = payoff(high, theta, c, reward) - payoff(low, theta, c, reward);
  if (std::abs(gap) <= 1e-9 * reward) return {low, high};
  return {gap > 0 ? high : low};
}

double best_response_value(double theta, const Contestant& c, double reward) {
  const auto sp = stationary_points(theta, c, reward);
  if (sp.points.size() == 1) return sp.points.front().effort;
  const double low = sp.points.front().effort;
  const double high = sp.points.back().effort;
  return payoff(high, theta, c, reward) >= payoff(low, theta, c, reward) ? high : low;
}

DropoutInfo dropout_threshold(const Contestant& c, double reward) {
  const double bound = critical_reward(c);
  const auto window = fold_window(c, reward);
  if (!window || window->theta_high - window->theta_low < 1e-9) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "no dropout threshold: reward " << reward << " is at or below C sigma^2 / phi(1) = "
        << bound;
    throw SubcriticalReward(msg.str());
  }
  // Payoff advantage of the high branch; strictly decreasing in theta.
  auto advantage = [&](double theta) {
    const auto r = outer_roots(theta, c, reward, *window);
    return payoff(r.high, theta, c, reward) - payoff(r.low, theta, c, reward);
  };
  const math::RootConfig cfg{1e-11 * std::max(1.0, window->theta_high), 400};
  const double theta_d = math::bisect(advantage, window->theta_low, window->theta_high, cfg);

  const auto r = outer_roots(theta_d, c, reward, *window);
  DropoutInfo info;
  info.theta = theta_d;
  info.br_min = r.low;
  info.br_max = r.high;
  info.window_low = window->theta_low;
  info.window_high = window->theta_high;
  info.payoff_at_dropout = payoff(r.high, theta_d, c, reward);
  return info;
}

}  // namespace stratsel
