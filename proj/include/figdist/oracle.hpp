#pragma once

// Test-support numerics kept independent of the library's own code paths:
// adaptive Gauss-Kronrod quadrature, Kolmogorov-Smirnov statistics, central
// finite differences, and grid search. Acceptance tests validate the main
// library against these, so nothing here may call into specfun or the
// distribution code (and nothing there calls in here).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace figdist::oracle {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule (QUADPACK values).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kron = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    double fi;
    if (i == 7) {
      fi = f(mid);
    } else {
      fi = f(mid - half * kXgk[i]) + f(mid + half * kXgk[i]);
    }
    kron += kWgk[i] * fi;
    if (i % 2 == 1) gauss += kWg[i / 2] * fi;
  }
  kron *= half;
  gauss *= half;
  // Conservative estimate: |K15 - G7| overstates the Kronrod error on smooth
  // panels, which just costs extra subdivisions. Robustness over speed.
  return {lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace detail

inline constexpr int kMaxSubdivisions = 10000;

/// Adaptive integration of f over (lo, hi); hi may be +infinity, in which
/// case the interval is mapped by t = lo + u/(1-u). Endpoints are never
/// evaluated so an integrable singularity at lo is acceptable.
inline QuadratureResult integrate(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  double abs_tol = 1e-10, double rel_tol = 1e-10) {
  std::function<double(double)> g = f;
  double a = lo, b = hi;
  if (std::isinf(hi)) {
    g = [f, lo](double u) {
      const double om = 1.0 - u;
      const double t = lo + u / om;
      if (!std::isfinite(t)) return 0.0;
      const double v = f(t);
      if (v == 0.0 || !std::isfinite(v)) return 0.0;
      return v / (om * om);
    };
    a = 0.0;
    b = 1.0;
  }

  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gk15(g, a, b));
  double total = panels.top().value;
  double total_err = panels.top().error;
  int n = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         n < kMaxSubdivisions) {
    const detail::Panel worst = panels.top();
    panels.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.lo + worst.hi);
    for (const auto& half : {detail::gk15(g, worst.lo, mid), detail::gk15(g, mid, worst.hi)}) {
      total += half.value;
      total_err += half.error;
      panels.push(half);
    }
    ++n;
  }
  QuadratureResult res;
  res.value = total;
  res.error_estimate = std::max(total_err, 0.0);
  res.subdivisions = n;
  res.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
  return res;
}

/// One-sample Kolmogorov-Smirnov statistic: sup |F_n - F|. Sorts a copy.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::domain_error("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double fi = cdf(sample[i]);
    d = std::max(d, std::max(fi - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - fi));
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic. Sorts copies.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic Kolmogorov critical coefficient c(alpha) = sqrt(-ln(alpha/2)/2):
/// 1.3581 at 5%, 1.6276 at 1%.
inline double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ks critical: alpha in (0,1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

inline double ks_critical_value(std::size_t n, double alpha) {
  return ks_critical_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

inline double ks_two_sample_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return ks_critical_coefficient(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

/// Central finite differences with per-coordinate step max(rel_step*|x_j|, rel_step).
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double rel_step = 1e-6) {
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = std::max(rel_step * std::abs(x[j]), rel_step);
    const double xj = x[j];
    x[j] = xj + h;
    const double fp = f(x);
    x[j] = xj - h;
    const double fm = f(x);
    x[j] = xj;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("finite_difference_gradient: non-finite evaluation");
    }
    grad[j] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

/// Argmax of f over an n-point uniform grid on [lo, hi].
template <class F>
double grid_argmax(F&& f, double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo < hi)) throw std::domain_error("grid_argmax: bad grid");
  double best_x = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace figdist::oracle
