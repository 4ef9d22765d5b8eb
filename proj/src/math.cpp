#include "stratsel/math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "stratsel/errors.hpp"

namespace stratsel::math {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvE = 0.36787944117144232160;
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool same_strict_sign(double a, double b) { return (a > 0 && b > 0) || (a < 0 && b < 0); }

// Acklam's rational approximation, relative error about 1.15e-9.
double quantile_guess(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (p < p_low) return tail(std::sqrt(-2.0 * std::log(p)));
  if (p > 1.0 - p_low) return -tail(std::sqrt(-2.0 * std::log1p(-p)));
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Expansion of W around the branch point in p = sqrt(2(e x + 1)); the
// minus_one branch uses -p.
double branch_point_series(double p) {
  static constexpr std::array<double, 7> k = {-1.0,           1.0,           -1.0 / 3.0,
                                              11.0 / 72.0,    -43.0 / 540.0, 769.0 / 17280.0,
                                              -221.0 / 8505.0};
  double w = 0.0;
  for (auto it = k.rbegin(); it != k.rend(); ++it) w = w * p + *it;
  return w;
}

}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << "normal_quantile: p must lie in (0,1), got " << p;
    throw DomainError(msg.str());
  }
  double x = quantile_guess(p);
  // One Halley step on cdf(x) - p; work on the smaller tail for accuracy.
  const double err = (p <= 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_ccdf(x);
  const double u = err / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double lambert_w(LambertBranch branch, double x) {
  const bool principal = branch == LambertBranch::principal;
  const double lower = -kInvE;
  // Allow the rounding of -1/e itself.
  if (!std::isfinite(x) || x < lower - 4.0 * kEps) {
    std::ostringstream msg;
    msg << "lambert_w(" << (principal ? "principal" : "minus_one") << "): x must be >= -1/e, got "
        << x;
    throw DomainError(msg.str());
  }
  if (!principal && x >= 0.0) {
    std::ostringstream msg;
    msg << "lambert_w(minus_one): x must lie in [-1/e, 0), got " << x;
    throw DomainError(msg.str());
  }
  if (x == 0.0) return 0.0;

  const double p = std::sqrt(std::max(0.0, 2.0 * (kE * x + 1.0)));
  if (p < 1e-3) return branch_point_series(principal ? p : -p);

  double w;
  if (p < 0.5) {
    w = branch_point_series(principal ? p : -p);
  } else if (principal) {
    if (x < 3.0) {
      w = std::log1p(x);
    } else {
      const double l1 = std::log(x);
      const double l2 = std::log(l1);
      w = l1 - l2 + l2 / l1;
    }
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(w))) break;
  }
  if (principal) return std::max(w, -1.0);
  return std::min(w, -1.0);
}

double find_root(const ScalarFunction& f, double lo, double hi, const RootConfig& cfg) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (same_strict_sign(fa, fb)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f=" << fa << ", " << fb
        << ")";
    throw NoBracket(msg.str());
  }
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if (same_strict_sign(fb, fc)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * cfg.abs_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NoConvergence("find_root: iteration limit reached");
}

double bisect(const ScalarFunction& f, double lo, double hi, const RootConfig& cfg) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (same_strict_sign(flo, fhi)) {
    std::ostringstream msg;
    msg << "bisect: no sign change on [" << lo << ", " << hi << "]";
    throw NoBracket(msg.str());
  }
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= cfg.abs_tol || mid == lo || mid == hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (same_strict_sign(fm, flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw NoConvergence("bisect: iteration limit reached");
}

}  // namespace stratsel::math
