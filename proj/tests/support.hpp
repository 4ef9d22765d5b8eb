#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stratsel/model.hpp"

namespace testing {

inline stratsel::GameConfig two_groups(double reward, double alpha, double cost_h, double sigma_h,
                                       double sigma_l, double share_h = 0.5, double cost_l = 1.0) {
  stratsel::GameConfig c;
  c.reward = reward;
  c.alpha = alpha;
  c.groups = {{"H", share_h, cost_h, 0.0, std::nullopt, sigma_h},
              {"L", 1.0 - share_h, cost_l, 0.0, std::nullopt, sigma_l}};
  return c;
}

inline stratsel::GameConfig one_group(double reward, double alpha, double cost, double sigma) {
  stratsel::GameConfig c;
  c.reward = reward;
  c.alpha = alpha;
  c.groups = {{"G", 1.0, cost, 0.0, std::nullopt, sigma}};
  return c;
}

inline stratsel::GameConfig fig1a() { return two_groups(10.0, 0.1, 1.0, 0.1, 1.0); }
inline stratsel::GameConfig fig1b() { return two_groups(10.0, 0.1, 5.0, 0.1, 1.0); }

// Independent re-derivations used as oracles. They use only <cmath> and
// plain bisection, sharing no code with the library.
namespace oracle {

inline double pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

template <typename F>
double bisect(F f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Unique FOC root in the subcritical regime, where C m - (S/s) phi((m-t)/s)
// is increasing in m.
inline double subcritical_br(double theta, double cost, double sigma, double reward) {
  const double top = reward * pdf(0.0) / (cost * sigma);
  return bisect([&](double m) { return cost * m - reward / sigma * pdf((m - theta) / sigma); },
                0.0, top);
}

// Damped fixed-point iteration of theta -> induced threshold of best
// responses, for subcritical configs.
inline double subcritical_equilibrium(const stratsel::GameConfig& c, double start) {
  std::vector<double> sigmas;
  for (const auto& g : c.groups) sigmas.push_back(*g.sigma_tilde);
  auto induced = [&](double theta) {
    std::vector<double> m;
    for (std::size_t g = 0; g < c.groups.size(); ++g)
      m.push_back(subcritical_br(theta, c.groups[g].cost, sigmas[g], c.reward));
    return bisect(
        [&](double t) {
          double mass = 0.0;
          for (std::size_t g = 0; g < m.size(); ++g)
            mass += c.groups[g].share * cdf((m[g] - t) / sigmas[g]);
          return c.alpha - mass;
        },
        -50.0, 50.0);
  };
  double theta = start;
  for (int k = 0; k < 20000; ++k) {
    const double next = 0.5 * theta + 0.5 * induced(theta);
    if (std::abs(next - theta) < 1e-13) return next;
    theta = next;
  }
  return theta;
}

}  // namespace oracle

// Random two- and three-group configs with sigma_tilde given directly or
// derived from noise and eta^2.
inline stratsel::GameConfig random_config(std::mt19937_64& rng, std::size_t groups) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  stratsel::GameConfig c;
  c.reward = std::exp(std::log(0.5) + u(rng) * (std::log(2000.0) - std::log(0.5)));
  c.alpha = 0.05 + 0.9 * u(rng);
  c.eta_sq = 0.5 + u(rng);
  c.dm_mode = u(rng) < 0.75 ? stratsel::DmMode::bayesian : stratsel::DmMode::oblivious;
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    w.push_back(0.2 + u(rng));
    total += w.back();
  }
  double assigned = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    stratsel::GroupParams p;
    p.label = "G" + std::to_string(g);
    p.share = g + 1 == groups ? 1.0 - assigned : w[g] / total;
    assigned += p.share;
    p.cost = 0.5 + 2.0 * u(rng);
    p.noise_var = 3.0 * u(rng);
    c.groups.push_back(p);
  }
  return c;
}

}  // namespace testing
