#pragma once

// Gamma-family special functions: log-gamma, digamma, upper/lower incomplete
// gamma (plain and log form), and the partial derivatives of the upper
// incomplete gamma function with respect to both arguments.
//
// All functions are pure and thread-safe. Domain violations throw
// std::domain_error; iteration-cap overruns throw std::runtime_error rather
// than returning a half-converged value.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "figdist/quadrature.hpp"

namespace figdist::specfun {

inline constexpr int kMaxIterations = 500;

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(std::string("specfun: ") + what);
}

// ln gamma(a,x) and ln lowergamma(a,x) computed together.
struct LogGammaPair {
  double log_upper;
  double log_lower;
};

// Series for the lower function, valid (and used) for x < a+1.
// gamma(a,x) = x^a e^{-x} * sum_{n>=0} x^n / (a (a+1) ... (a+n)).
inline double lower_series_log(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) {
      return a * std::log(x) - x + std::log(sum);
    }
  }
  throw std::runtime_error("specfun: lower incomplete gamma series did not converge");
}

// Lentz continued fraction for the upper function, used for x >= a+1.
inline double upper_cf_log(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    // 4e-16 sits just above one ulp of 1.0; del can oscillate there forever.
    if (std::abs(del - 1.0) < 4e-16) {
      return -x + a * std::log(x) + std::log(h);
    }
  }
  throw std::runtime_error("specfun: upper incomplete gamma continued fraction did not converge");
}

// Direct evaluation of gamma(a,x) for small a and x < a+1, where forming
// gamma(a) - lowergamma(a,x) would lose most of the significant digits.
// Rearranged so every term is O(1)-conditioned:
//   gamma(a,x) = (gamma(a+1)-1)/a - expm1(a ln x)/a
//              + sum_{k>=1} (-1)^{k+1} x^{a+k} / (k! (a+k)).
inline double upper_small_a_direct(double a, double x) {
  const double t1 = std::expm1(std::lgamma(a + 1.0)) / a;
  const double t2 = -std::expm1(a * std::log(x)) / a;
  double term = std::pow(x, a);  // x^{a+k} / k!
  double sum = 0.0;
  for (int k = 1; k <= kMaxIterations; ++k) {
    term *= x / k;
    const double contrib = ((k & 1) ? term : -term) / (a + k);
    sum += contrib;
    if (term / (a + k) < 1e-18 * std::max(1.0, std::abs(sum))) {
      return t1 + t2 + sum;
    }
  }
  throw std::runtime_error("specfun: small-a upper incomplete gamma series did not converge");
}

inline LogGammaPair log_incomplete_gamma_pair(double a, double x) {
  require(std::isfinite(a) && a > 0.0, "incomplete gamma requires a > 0");
  require(std::isfinite(x) && x >= 0.0, "incomplete gamma requires x >= 0");
  const double lga = std::lgamma(a);
  if (x == 0.0) {
    return {lga, -std::numeric_limits<double>::infinity()};
  }
  if (x < a + 1.0) {
    const double log_lower = lower_series_log(a, x);
    double log_upper;
    if (a <= 0.5) {
      log_upper = std::log(upper_small_a_direct(a, x));
    } else {
      log_upper = lga + std::log1p(-std::exp(log_lower - lga));
    }
    return {log_upper, log_lower};
  }
  const double log_upper = upper_cf_log(a, x);
  const double log_lower = lga + std::log1p(-std::exp(log_upper - lga));
  return {log_upper, log_lower};
}

}  // namespace detail

/// ln gamma(a) for a > 0.
inline double log_gamma(double a) {
  detail::require(std::isfinite(a) && a > 0.0, "log_gamma requires a > 0");
  return std::lgamma(a);
}

/// psi(a) = d/da ln gamma(a) for a > 0. Recurrence up to a >= 10, then the
/// asymptotic Bernoulli series.
inline double digamma(double a) {
  detail::require(std::isfinite(a) && a > 0.0, "digamma requires a > 0");
  double result = 0.0;
  while (a < 10.0) {
    result -= 1.0 / a;
    a += 1.0;
  }
  const double inv2 = 1.0 / (a * a);
  // B_2k / (2k a^2k), k = 1..7
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 -
                                                      inv2 * (1.0 / 12.0)))))));
  return result + std::log(a) - 0.5 / a - series;
}

/// ln of the upper incomplete gamma function gamma(a,x) = int_x^inf t^{a-1} e^{-t} dt.
/// Stable for x well beyond the point where the plain value underflows.
inline double log_upper_incomplete_gamma(double a, double x) {
  return detail::log_incomplete_gamma_pair(a, x).log_upper;
}

/// ln of the lower incomplete gamma function.
inline double log_lower_incomplete_gamma(double a, double x) {
  return detail::log_incomplete_gamma_pair(a, x).log_lower;
}

inline double upper_incomplete_gamma(double a, double x) {
  if (x == 0.0) {
    detail::require(std::isfinite(a) && a > 0.0, "incomplete gamma requires a > 0");
    return std::tgamma(a);
  }
  return std::exp(log_upper_incomplete_gamma(a, x));
}

inline double lower_incomplete_gamma(double a, double x) {
  return std::exp(log_lower_incomplete_gamma(a, x));
}

/// Regularized P(a,x) = lowergamma(a,x) / gamma(a), in [0,1].
inline double regularized_lower_gamma(double a, double x) {
  const auto pair = detail::log_incomplete_gamma_pair(a, x);
  return std::exp(pair.log_lower - std::lgamma(a));
}

/// Regularized Q(a,x) = gamma(a,x) / gamma(a), in [0,1].
inline double regularized_upper_gamma(double a, double x) {
  const auto pair = detail::log_incomplete_gamma_pair(a, x);
  return std::exp(pair.log_upper - std::lgamma(a));
}

/// d/dv gamma(u,v) = -v^{u-1} e^{-v}, evaluated in log space.
inline double dgamma_dv(double u, double v) {
  detail::require(std::isfinite(u) && u > 0.0, "dgamma_dv requires u > 0");
  detail::require(std::isfinite(v) && v > 0.0, "dgamma_dv requires v > 0");
  return -std::exp((u - 1.0) * std::log(v) - v);
}

namespace detail {

inline double dgamma_du_integrand(double u, double t) {
  const double lt = std::log(t);
  const double lg = (u - 1.0) * lt - t;
  if (lg < -745.0) return 0.0;
  return std::exp(lg) * lt;
}

}  // namespace detail

/// d/du gamma(u,v) = int_v^inf t^{u-1} ln(t) e^{-t} dt, by adaptive quadrature.
/// (Equivalently gamma(u,v) ln v plus the Meijer-G correction term; the
/// integral form avoids hypergeometric machinery.)
inline double dgamma_du(double u, double v) {
  detail::require(std::isfinite(u) && u > 0.0, "dgamma_du requires u > 0");
  detail::require(std::isfinite(v) && v >= 0.0, "dgamma_du requires v >= 0");
  if (v == 0.0) {
    return std::tgamma(u) * digamma(u);  // d/du gamma(u)
  }
  quad::Options opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-305;
  auto f = [u](double t) { return detail::dgamma_du_integrand(u, t); };
  // The integrand bulk sits near t = max(lo, u-1); aim the map there.
  auto tail_scale = [u](double lo) {
    return std::max(1.0, u - 1.0 - lo + std::sqrt(u));
  };
  if (v >= 1.0) {
    const auto res = quad::to_infinity(f, v, opt, tail_scale(v));
    if (!res.converged) throw std::runtime_error("specfun: dgamma_du quadrature did not converge");
    return res.value;
  }
  // ln t changes sign at t = 1; integrate the two pieces separately.
  const auto lo = quad::tanh_sinh(f, v, 1.0, opt);
  const auto hi = quad::to_infinity(f, 1.0, opt, tail_scale(1.0));
  if (!lo.converged || !hi.converged) {
    throw std::runtime_error("specfun: dgamma_du quadrature did not converge");
  }
  return lo.value + hi.value;
}

/// d/du ln gamma(u,v). For v >= 1 the common factor v^{u-1} e^{-v} is pulled
/// out of both integrals, so the ratio stays finite long after gamma(u,v)
/// itself has underflowed.
inline double dlog_upper_gamma_du(double u, double v) {
  detail::require(std::isfinite(u) && u > 0.0, "dlog_upper_gamma_du requires u > 0");
  detail::require(std::isfinite(v) && v >= 0.0, "dlog_upper_gamma_du requires v >= 0");
  if (v == 0.0) return digamma(u);
  if (v < 1.0) {
    return dgamma_du(u, v) / upper_incomplete_gamma(u, v);
  }
  quad::Options opt;
  opt.rel_tol = 1e-11;
  auto weight = [&](double s) {
    const double lg = (u - 1.0) * std::log1p(s / v) - s;
    return lg < -745.0 ? 0.0 : std::exp(lg);
  };
  const auto num = quad::to_infinity([&](double s) { return weight(s) * std::log(v + s); }, 0.0, opt);
  const auto den = quad::to_infinity(weight, 0.0, opt);
  if (!num.converged || !den.converged) {
    throw std::runtime_error("specfun: dlog_upper_gamma_du quadrature did not converge");
  }
  return num.value / den.value;
}

}  // namespace figdist::specfun
