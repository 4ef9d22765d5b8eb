#include "stratsel/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "stratsel/equilibrium.hpp"
#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"
#include "stratsel/parallel.hpp"

namespace stratsel {

namespace {

constexpr std::size_t kChunk = 1 << 16;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Splits n samples into fixed chunks, one stream each, and folds the chunk
// moments in chunk order so the total is independent of the thread count.
McEstimate chunked_estimate(std::size_t n, std::uint64_t seed,
                            const std::function<double(CounterRng&)>& draw) {
  if (n < kMinSamples) throw DomainError("Monte Carlo estimates need at least 1000 samples");
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  const auto parts = parallel_map<Moments>(chunks, [&](std::size_t k) {
    CounterRng rng(seed, k);
    const std::size_t count = std::min(kChunk, n - k * kChunk);
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = draw(rng);
      m.sum += v;
      m.sum_sq += v * v;
    }
    return m;
  });
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double dn = static_cast<double>(n);
  const double mean = total.sum / dn;
  const double var = std::max(0.0, (total.sum_sq - dn * mean * mean) / (dn - 1.0));
  return {mean, std::sqrt(var / dn), n, seed};
}

struct Sampler {
  double eta = 1.0;
  double noise_sd = 0.0;
  double shrink = 1.0;  // weight of the noisy estimate in the score
  bool bayesian = true;

  Sampler(const GameConfig& config, std::size_t g) {
    const double eta_sq = group_eta_sq(config, g);
    const double noise_var = group_noise_var(config, g);
    eta = std::sqrt(eta_sq);
    noise_sd = std::sqrt(noise_var);
    shrink = eta_sq / (eta_sq + noise_var);
    bayesian = config.dm_mode == DmMode::bayesian;
  }

  // Returns latent quality W and sets `score` to what the decision-maker sees.
  double draw(double effort, CounterRng& rng, double& score) const {
    const double w = effort + eta * rng.normal();
    const double estimate = w + noise_sd * rng.normal();
    score = bayesian ? shrink * estimate + (1.0 - shrink) * effort : estimate;
    return w;
  }
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed ^ splitmix(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return math::normal_quantile(uniform()); }

McEstimate mc_selection_probability(double effort, double theta, const GameConfig& config,
                                    std::size_t g, std::size_t n, std::uint64_t seed) {
  const Sampler s(config, g);
  return chunked_estimate(n, seed, [&](CounterRng& rng) {
    double score = 0.0;
    s.draw(effort, rng, score);
    return score >= theta ? 1.0 : 0.0;
  });
}

McEstimate mc_selection_quality(const std::vector<EffortDistribution>& strategies,
                                const std::vector<double>& thresholds, const GameConfig& config,
                                std::size_t n, std::uint64_t seed) {
  const std::size_t groups = config.groups.size();
  if (strategies.size() != groups) throw InvalidConfig("one strategy per group required");
  if (thresholds.size() != 1 && thresholds.size() != groups)
    throw InvalidConfig("thresholds must be global or per group");
  std::vector<Sampler> samplers;
  for (std::size_t g = 0; g < groups; ++g) samplers.emplace_back(config, g);

  return chunked_estimate(n, seed, [&](CounterRng& rng) {
    double u = rng.uniform();
    std::size_t g = 0;
    while (g + 1 < groups && u >= config.groups[g].share) u -= config.groups[g].share, ++g;
    const auto& support = strategies[g].support;
    double v = rng.uniform() * strategies[g].total_weight();
    std::size_t a = 0;
    while (a + 1 < support.size() && v >= support[a].weight) v -= support[a].weight, ++a;
    double score = 0.0;
    const double w = samplers[g].draw(support[a].effort, rng, score);
    const double theta = thresholds.size() == 1 ? thresholds[0] : thresholds[g];
    return score >= theta ? w : 0.0;
  });
}

double grid_step(const Contestant& c, double reward, std::size_t grid_points) {
  if (grid_points <= 1) return 0.0;
  const double top = std::sqrt(2.0 * reward / c.cost) + 6.0 * c.sigma;
  return top / static_cast<double>(grid_points - 1);
}

double grid_argmax_payoff(double theta, const Contestant& c, double reward,
                          std::size_t grid_points) {
  const double step = grid_step(c, reward, grid_points);
  double best_m = 0.0;
  double best_u = payoff(0.0, theta, c, reward);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double m = step * static_cast<double>(i);
    const double u = payoff(m, theta, c, reward);
    if (u > best_u) {
      best_u = u;
      best_m = m;
    }
  }
  return best_m;
}

double nash_gap(const EquilibriumReport& report, const GameConfig& config,
                std::size_t grid_points) {
  double gap = 0.0;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const Contestant c = contestant_of(config, g);
    const double theta = report.threshold_for(g);
    const double best =
        std::max(payoff(best_response_value(theta, c, config.reward), theta, c, config.reward),
                 payoff(grid_argmax_payoff(theta, c, config.reward, grid_points), theta, c,
                        config.reward));
    for (const auto& atom : report.strategies.at(g).support) {
      if (atom.weight <= 0.0) continue;
      gap = std::max(gap, best - payoff(atom.effort, theta, c, config.reward));
    }
  }
  return gap;
}

}  // namespace stratsel

namespace stratsel {

namespace {

double binomial_floor(double p, std::size_t n) {
  const double dn = static_cast<double>(n);
  return std::max(std::sqrt(std::clamp(p, 0.0, 1.0) * (1.0 - std::clamp(p, 0.0, 1.0)) / dn),
                  1.0 / dn);
}

OracleCheck finish(std::string name, double analytic, double oracle, double tolerance) {
  return {std::move(name), analytic, oracle, tolerance, std::abs(analytic - oracle) <= tolerance};
}

}  // namespace

OracleCheck check_selection_probability(double effort, double theta, const GameConfig& config,
                                        std::size_t g, std::size_t n, std::uint64_t seed) {
  const double analytic = selection_probability(effort, theta, score_sd(config, g));
  const auto mc = mc_selection_probability(effort, theta, config, g, n, seed);
  const double tol = 3.0 * std::max(mc.std_error, binomial_floor(analytic, n));
  return finish("selection_probability[" + config.groups.at(g).label + "]", analytic, mc.mean, tol);
}

OracleCheck check_selection_quality(const EquilibriumReport& report, const GameConfig& config,
                                    std::size_t n, std::uint64_t seed) {
  const auto mc = mc_selection_quality(report.strategies, report.thresholds, config, n, seed);
  const double tol = 3.0 * std::max(mc.std_error, 1.0 / static_cast<double>(n));
  return finish(std::string("selection_quality[") + to_string(report.mode) + "]", report.quality,
                mc.mean, tol);
}

OracleCheck check_best_response(double theta, const GameConfig& config, std::size_t g,
                                std::size_t grid_points) {
  const Contestant c = contestant_of(config, g);
  const double grid = grid_argmax_payoff(theta, c, config.reward, grid_points);
  const auto set = best_response(theta, c, config.reward);
  double nearest = set.front();
  for (double m : set) {
    if (std::abs(m - grid) < std::abs(nearest - grid)) nearest = m;
  }
  return finish("best_response[" + config.groups.at(g).label + "]", nearest, grid,
                grid_step(c, config.reward, grid_points));
}

OracleCheck check_nash_gap(const EquilibriumReport& report, const GameConfig& config,
                           std::size_t grid_points) {
  return finish(std::string("nash_gap[") + to_string(report.mode) + "]", 0.0,
                nash_gap(report, config, grid_points), 1e-7 * config.reward);
}

}  // namespace stratsel
