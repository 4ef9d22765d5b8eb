#include <doctest.h>

#include <cmath>
#include <random>

#include "stratsel/config_io.hpp"
#include "stratsel/errors.hpp"
#include "stratsel/model.hpp"
#include "support.hpp"

using namespace stratsel;

namespace {
GroupParams noisy(double noise) { return {"G", 1.0, 1.0, noise, std::nullopt, std::nullopt}; }

bool mentions(const std::vector<Violation>& v, const std::string& field, const std::string& text) {
  for (const auto& x : v) {
    if (x.field == field && x.message.find(text) != std::string::npos) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("posterior variance") {
  CHECK(posterior_variance(noisy(0.0), 1.0, DmMode::bayesian) == 1.0);
  CHECK(posterior_variance(noisy(3.0), 1.0, DmMode::bayesian) == doctest::Approx(0.25));
  CHECK(posterior_variance(noisy(3.0), 1.0, DmMode::oblivious) == doctest::Approx(4.0));
}

TEST_CASE("posterior variance is monotone in noise, opposite ways per mode") {
  double prev_b = posterior_variance(noisy(0.0), 1.3, DmMode::bayesian);
  double prev_o = posterior_variance(noisy(0.0), 1.3, DmMode::oblivious);
  for (double s = 0.1; s < 10.0; s += 0.1) {
    const double b = posterior_variance(noisy(s), 1.3, DmMode::bayesian);
    const double o = posterior_variance(noisy(s), 1.3, DmMode::oblivious);
    CHECK(b < prev_b);
    CHECK(o > prev_o);
    prev_b = b;
    prev_o = o;
  }
}

TEST_CASE("noisier group has the narrower posterior") {
  CHECK(posterior_variance(noisy(2.0), 1.0, DmMode::bayesian) <
        posterior_variance(noisy(0.5), 1.0, DmMode::bayesian));
}

TEST_CASE("correlation coefficient") {
  CHECK(correlation_coefficient(noisy(0.0), 1.0) == 1.0);
  CHECK(correlation_coefficient(noisy(3.0), 1.0) == doctest::Approx(0.5));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double eta = u(rng);
    const auto g = noisy(u(rng));
    const double rho = correlation_coefficient(g, eta);
    CHECK(rho * rho * eta == doctest::Approx(posterior_variance(g, eta, DmMode::bayesian)).epsilon(1e-12));
  }
}

TEST_CASE("sigma_tilde override and per-group eta") {
  auto c = testing::fig1a();
  CHECK(score_sd(c, 0) == doctest::Approx(0.1));
  CHECK(quality_spread(c, 0) == doctest::Approx(0.1));
  c.groups[1].sigma_tilde.reset();
  c.groups[1].noise_var = 3.0;
  c.groups[1].eta_sq = 4.0;
  CHECK(score_sd(c, 1) == doctest::Approx(std::sqrt(16.0 / 7.0)));
  c.dm_mode = DmMode::oblivious;
  CHECK(score_sd(c, 1) == doctest::Approx(std::sqrt(7.0)));
  CHECK(quality_spread(c, 1) == doctest::Approx(4.0 / std::sqrt(7.0)));
}

TEST_CASE("validate") {
  auto c = testing::two_groups(10.0, 0.5, 1.0, 1.0, 1.0);
  CHECK(validate(c).empty());
  c.groups[0].share = 0.6;
  c.groups[1].share = 0.6;
  CHECK(mentions(validate(c), "groups", "shares sum to 1.2"));
  c = testing::two_groups(10.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(mentions(validate(c), "alpha", "alpha must lie in (0,1)"));
  c.alpha = 1.5;
  CHECK_THROWS_AS(require_valid(c), InvalidConfig);
  c = testing::two_groups(-1.0, 0.5, 0.0, 1.0, 1.0);
  CHECK(validate(c).size() >= 2);
  c = testing::two_groups(1.0, 0.5, 1.0, 1.0, 1.0);
  c.groups[1].label = "H";
  CHECK_FALSE(validate(c).empty());
}

TEST_CASE("effort distributions") {
  CHECK(EffortDistribution::point(2.5).mean() == 2.5);
  const auto mix = EffortDistribution::mixture(0.0, 2.0, 0.5);
  CHECK(mix.mean() == 1.0);
  CHECK(mix.total_weight() == 1.0);
}

TEST_CASE("config JSON round trip and hash") {
  const auto c = testing::fig1a();
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  auto d = c;
  d.alpha = 0.2;
  CHECK(config_hash(d) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
  // FNV-1a 64 of "a" is af63dc4c8601ec8c.
  CHECK(hash_hex(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("config parse errors name the field") {
  auto j = config_to_json(testing::fig1a());
  j.erase("reward");
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("reward"), InvalidConfig);
  j = config_to_json(testing::fig1a());
  j["groups"][1]["cost"] = "high";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("groups[1].cost"), InvalidConfig);
  j = config_to_json(testing::fig1a());
  j["dm_mode"] = "psychic";
  CHECK_THROWS_AS(config_from_json(j), InvalidConfig);
}
