#pragma once

// Internal tanh-sinh (double-exponential) quadrature used by the library's
// own numerics (incomplete-gamma parameter derivatives, MGF integrals).
// The test-side integrator in oracle.hpp is a separate Gauss-Kronrod
// implementation; the two share no code.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace figdist::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_level = 11;
};

struct Result {
  double value = 0.0;
  double error = std::numeric_limits<double>::infinity();
  int levels = 0;
  bool converged = false;
};

namespace detail {

struct Node {
  double x;  // abscissa in (-1, 1)
  double w;  // weight
};

// Nodes/weights for level k are the odd multiples of h = 2^-k (all
// multiples for k = 0), following the standard tanh-sinh construction
// x = tanh(pi/2 sinh t).
inline const std::vector<Node>& ts_nodes(int level) {
  static const std::vector<std::vector<Node>> table = [] {
    constexpr double kHalfPi = 1.5707963267948966;
    constexpr double t_max = 3.55;  // beyond this 1-|x| underflows
    std::vector<std::vector<Node>> levels;
    for (int k = 0; k <= 12; ++k) {
      const double h = std::ldexp(1.0, -k);
      std::vector<Node> nodes;
      for (int j = (k == 0) ? 0 : 1;; j += (k == 0) ? 1 : 2) {
        const double t = j * h;
        if (t > t_max) break;
        const double s = kHalfPi * std::sinh(t);
        const double x = std::tanh(s);
        const double w = kHalfPi * std::cosh(t) / (std::cosh(s) * std::cosh(s));
        if (w < 1e-320 || 1.0 - x < 1e-300) break;
        nodes.push_back({x, w});
      }
      levels.push_back(std::move(nodes));
    }
    return levels;
  }();
  return table.at(static_cast<std::size_t>(level));
}

}  // namespace detail

// Integrate f over the finite interval (a, b). Endpoints are never
// evaluated, so integrable endpoint singularities are fine.
template <class F>
Result tanh_sinh(F&& f, double a, double b, Options opt = {}) {
  if (!(a < b)) throw std::invalid_argument("tanh_sinh: requires a < b");
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  auto eval = [&](double x) -> double {
    const double v = f(mid + half * x);
    return std::isfinite(v) ? v : 0.0;  // lost mass is caught by the error estimate
  };

  double h = 1.0;
  double sum = 0.0;
  for (const auto& n : detail::ts_nodes(0)) {
    if (n.x == 0.0) {
      sum += n.w * eval(0.0);
    } else {
      sum += n.w * (eval(n.x) + eval(-n.x));
    }
  }
  Result res;
  double prev = half * h * sum;
  for (int level = 1; level <= opt.max_level; ++level) {
    h *= 0.5;
    for (const auto& n : detail::ts_nodes(level)) {
      sum += n.w * (eval(n.x) + eval(-n.x));
    }
    const double cur = half * h * sum;
    const double err = std::abs(cur - prev);
    res.value = cur;
    res.error = err;
    res.levels = level;
    if (level >= 3 && err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return res;
}

// Integrate f over (a, +inf) via the rational map t = a + scale*u/(1-u).
// Intended for integrands with (at least) exponential decay; pick `scale`
// near the location of the integrand's bulk so the map resolves it
// (u = 1/2 lands at t = a + scale).
template <class F>
Result to_infinity(F&& f, double a, Options opt = {}, double scale = 1.0) {
  auto g = [&](double u) -> double {
    const double om = 1.0 - u;
    const double t = a + scale * u / om;
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t);
    if (v == 0.0 || !std::isfinite(v)) return 0.0;
    return v * scale / (om * om);
  };
  return tanh_sinh(g, 0.0, 1.0, opt);
}

}  // namespace figdist::quad
