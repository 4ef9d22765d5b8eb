#pragma once

#include <functional>

namespace stratsel::math {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kE = 2.71828182845904523536;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

struct RootConfig {
  double abs_tol = 1e-12;
  int max_iter = 200;
};

double normal_pdf(double z);
double normal_cdf(double z);
// Upper tail 1 - cdf(z), accurate for large positive z.
double normal_ccdf(double z);
// Inverse of normal_cdf on (0,1). Throws DomainError outside.
double normal_quantile(double p);

enum class LambertBranch { principal, minus_one };

// Real Lambert W: the w with w * exp(w) = x on the requested branch.
// principal: x >= -1/e, returns w >= -1.
// minus_one: -1/e <= x < 0, returns w <= -1.
double lambert_w(LambertBranch branch, double x);

using ScalarFunction = std::function<double(double)>;

// Brent's method with bisection safeguard on a sign-changing bracket.
// Throws NoBracket when f(lo) and f(hi) share a strict sign and
// NoConvergence when max_iter is exhausted.
double find_root(const ScalarFunction& f, double lo, double hi, const RootConfig& cfg = {});

// Plain bisection; stops once the bracket is narrower than abs_tol.
double bisect(const ScalarFunction& f, double lo, double hi, const RootConfig& cfg = {});

}  // namespace stratsel::math
