#include "figdist/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "figdist/oracle.hpp"

namespace sf = figdist::specfun;
namespace oracle = figdist::oracle;

namespace {

constexpr double kEuler = 0.57721566490153286;

double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

TEST(LogGamma, KnownValues) {
  EXPECT_EQ(sf::log_gamma(1.0), 0.0);
  EXPECT_EQ(sf::log_gamma(2.0), 0.0);
  EXPECT_NEAR(sf::log_gamma(0.5), 0.5 * std::log(M_PI), 1e-15);
  EXPECT_THROW(sf::log_gamma(0.0), std::domain_error);
  EXPECT_THROW(sf::log_gamma(-1.0), std::domain_error);
}

TEST(Digamma, KnownValues) {
  EXPECT_NEAR(sf::digamma(1.0), -kEuler, 1e-14);
  // psi(5) by the recurrence psi(a+1) = psi(a) + 1/a from psi(1).
  double psi5 = -kEuler;
  for (int k = 1; k <= 4; ++k) psi5 += 1.0 / k;
  EXPECT_NEAR(sf::digamma(5.0), psi5, 1e-14);
  EXPECT_NEAR(sf::digamma(5.0), 1.5061176684318005, 1e-14);
  EXPECT_THROW(sf::digamma(0.0), std::domain_error);
}

TEST(UpperIncompleteGamma, Examples) {
  // gamma(1,x) = e^{-x}
  EXPECT_LE(rel_err(sf::upper_incomplete_gamma(1.0, 1.0), std::exp(-1.0)), 1e-13);
  // gamma(a,0) = gamma(a)
  EXPECT_LE(rel_err(sf::upper_incomplete_gamma(2.5, 0.0), 1.3293403881791370), 1e-13);
  // gamma(0.5,1) = sqrt(pi) erfc(1); cross-checked by quadrature below.
  const double want = 0.27880558528066198;
  EXPECT_LE(rel_err(sf::upper_incomplete_gamma(0.5, 1.0), want), 1e-13);
  const auto q = oracle::integrate(
      [](double t) { return std::exp(-0.5 * std::log(t) - t); }, 1.0,
      std::numeric_limits<double>::infinity(), 1e-13, 1e-13);
  ASSERT_TRUE(q.converged);
  EXPECT_LE(rel_err(sf::upper_incomplete_gamma(0.5, 1.0), q.value), 1e-12);
}

TEST(UpperIncompleteGamma, DomainErrors) {
  EXPECT_THROW(sf::upper_incomplete_gamma(0.0, 1.0), std::domain_error);
  EXPECT_THROW(sf::upper_incomplete_gamma(-2.0, 1.0), std::domain_error);
  EXPECT_THROW(sf::upper_incomplete_gamma(1.0, -0.5), std::domain_error);
  EXPECT_THROW(sf::upper_incomplete_gamma(std::nan(""), 1.0), std::domain_error);
  EXPECT_THROW(sf::upper_incomplete_gamma(1.0, std::numeric_limits<double>::infinity()),
               std::domain_error);
}

TEST(LowerIncompleteGamma, Examples) {
  EXPECT_EQ(sf::lower_incomplete_gamma(1.0, 0.0), 0.0);
  // gamma(1, inf) = Gamma(1) = 1; at x = 700 the tail is ~1e-304.
  EXPECT_LE(rel_err(sf::lower_incomplete_gamma(1.0, 700.0), 1.0), 1e-12);
  // int_0^2 t^2 e^{-t} dt
  const auto q = oracle::integrate([](double t) { return t * t * std::exp(-t); },
                                   0.0, 2.0, 1e-13, 1e-13);
  ASSERT_TRUE(q.converged);
  EXPECT_LE(rel_err(sf::lower_incomplete_gamma(3.0, 2.0), q.value), 1e-12);
  EXPECT_LE(rel_err(sf::lower_incomplete_gamma(3.0, 2.0), 0.64664716763387308), 1e-13);
}

TEST(IncompleteGamma, Complementarity) {
  const std::vector<double> as = {1e-3, 0.03, 0.5, 1.0, 2.5, 10.0, 100.0};
  const std::vector<double> xs = {1e-6, 0.1, 0.9, 1.0, 1.5, 5.0, 50.0, 700.0};
  for (double a : as) {
    const double ga = std::tgamma(a);
    for (double x : xs) {
      const double sum = sf::lower_incomplete_gamma(a, x) + sf::upper_incomplete_gamma(a, x);
      EXPECT_LE(rel_err(sum, ga), 1e-12) << "a=" << a << " x=" << x;
    }
  }
}

TEST(IncompleteGamma, Monotonicity) {
  // Grid scaled to a, so consecutive values differ by more than one ulp.
  for (double a : {0.3, 1.0, 4.0, 30.0}) {
    std::vector<double> xs;
    for (double c : {0.05, 0.2, 0.5, 1.0, 1.5, 2.5, 4.0}) xs.push_back(c * a);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      EXPECT_GT(sf::upper_incomplete_gamma(a, xs[i]), sf::upper_incomplete_gamma(a, xs[i + 1]))
          << "a=" << a << " x=" << xs[i];
      EXPECT_LT(sf::lower_incomplete_gamma(a, xs[i]), sf::lower_incomplete_gamma(a, xs[i + 1]))
          << "a=" << a << " x=" << xs[i];
    }
  }
}

TEST(IncompleteGamma, Recurrence) {
  // Gamma(a+1,x) = a Gamma(a,x) + x^a e^{-x}
  for (double a : {0.2, 0.7, 1.0, 3.5, 12.0, 80.0}) {
    for (double x : {0.05, 0.5, 1.0, 4.0, 25.0, 120.0}) {
      const double lhs = sf::upper_incomplete_gamma(a + 1.0, x);
      const double rhs = a * sf::upper_incomplete_gamma(a, x) + std::exp(a * std::log(x) - x);
      EXPECT_LE(rel_err(lhs, rhs), 1e-10) << "a=" << a << " x=" << x;
    }
  }
}

TEST(IncompleteGamma, TailLimitVanishes) {
  // x^k Gamma(alpha/beta, x^beta) -> 0 as x -> inf (alpha = beta = 1).
  auto product = [](double k, double x) {
    return std::exp(k * std::log(x) + sf::log_upper_incomplete_gamma(1.0, x));
  };
  EXPECT_LT(product(-1.0, 50.0), 1e-15);
  EXPECT_LT(product(1.0, 50.0), 1e-15);
  EXPECT_LT(product(5.0, 50.0), 1e-12);
  EXPECT_LT(product(5.0, 60.0), 1e-15);
  EXPECT_GT(product(5.0, 50.0), product(5.0, 60.0));
}

TEST(LogForms, SurviveLargeArguments) {
  // ln Gamma(a, x) stays finite where the plain value underflows.
  const double lg = sf::log_upper_incomplete_gamma(2.0, 800.0);
  EXPECT_TRUE(std::isfinite(lg));
  // Gamma(2, x) = (1+x) e^{-x}
  EXPECT_NEAR(lg, std::log1p(800.0) - 800.0, 1e-10);
  EXPECT_EQ(sf::upper_incomplete_gamma(2.0, 800.0), 0.0);  // underflows as a plain value
}

TEST(DGammaDu, Examples) {
  // d/du Gamma(u)|_{u=1} = Gamma(1) psi(1) = -euler
  EXPECT_NEAR(sf::dgamma_du(1.0, 0.0), -kEuler, 1e-12);

  // (2,1): against a central finite difference of Gamma(u,v) in u.
  const double h = 1e-6;
  const double fd = (sf::upper_incomplete_gamma(2.0 + h, 1.0) -
                     sf::upper_incomplete_gamma(2.0 - h, 1.0)) /
                    (2.0 * h);
  EXPECT_LE(rel_err(sf::dgamma_du(2.0, 1.0), fd), 1e-8);
  EXPECT_LE(rel_err(sf::dgamma_du(2.0, 1.0), 0.58726337556696260), 1e-10);

  // (0.5,3): against the oracle quadrature of the defining integral.
  const auto q = oracle::integrate(
      [](double t) { return std::exp(-0.5 * std::log(t) - t) * std::log(t); }, 3.0,
      std::numeric_limits<double>::infinity(), 1e-13, 1e-13);
  ASSERT_TRUE(q.converged);
  EXPECT_LE(rel_err(sf::dgamma_du(0.5, 3.0), q.value), 1e-9);
  EXPECT_LE(rel_err(sf::dgamma_du(0.5, 3.0), 0.033943538249218600), 1e-9);

  // sign change of ln(t) inside the domain
  EXPECT_LE(rel_err(sf::dgamma_du(0.5, 0.2), -0.38069407915459328), 1e-9);

  EXPECT_THROW(sf::dgamma_du(0.0, 1.0), std::domain_error);
  EXPECT_THROW(sf::dgamma_du(1.0, -1.0), std::domain_error);
}

TEST(DGammaDv, Examples) {
  EXPECT_LE(rel_err(sf::dgamma_dv(1.0, 1.0), -std::exp(-1.0)), 1e-14);
  EXPECT_LE(rel_err(sf::dgamma_dv(3.0, 2.0), -4.0 * std::exp(-2.0)), 1e-14);

  const double h = 1e-6 * 50.0;
  const double fd = (sf::upper_incomplete_gamma(0.7, 50.0 + h) -
                     sf::upper_incomplete_gamma(0.7, 50.0 - h)) /
                    (2.0 * h);
  EXPECT_LE(rel_err(sf::dgamma_dv(0.7, 50.0), fd), 1e-8);
  EXPECT_THROW(sf::dgamma_dv(1.0, 0.0), std::domain_error);
}

TEST(IncompleteGammaDerivatives, FiniteDifferenceGrid) {
  // du and dv derivatives vs central differences over [0.1,50] x [0.01,50].
  // A central difference of f resolves nothing below eps*|f|/h, so points
  // where the true derivative sits under that floor (e.g. dv at u=10,
  // v=0.01, where dv ~ 1e-18 against Gamma(10) ~ 3.6e5) are checked only up
  // to the oracle's own resolution.
  const std::vector<double> us = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0};
  const std::vector<double> vs = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0};
  const double eps = std::numeric_limits<double>::epsilon();
  for (double u : us) {
    for (double v : vs) {
      const double f0 = sf::upper_incomplete_gamma(u, v);
      // The value is exp of an O(|ln f0|) quantity, so its own relative
      // error is ~eps*|ln f0|; that is what the difference quotient divides.
      const double f0_abs_err = eps * f0 * (10.0 + 2.0 * std::abs(std::log(f0)));

      const double hu = 7e-6 * std::max(u, 1.0);
      const double fd_u = (sf::upper_incomplete_gamma(u + hu, v) -
                           sf::upper_incomplete_gamma(u - hu, v)) /
                          (2.0 * hu);
      const double du = sf::dgamma_du(u, v);
      EXPECT_LE(std::abs(du - fd_u), std::max(1e-6 * std::abs(du), f0_abs_err / hu))
          << "u=" << u << " v=" << v;

      const double hv = 7e-6 * std::max(v, 0.01);
      const double fd_v = (sf::upper_incomplete_gamma(u, v + hv) -
                           sf::upper_incomplete_gamma(u, v - hv)) /
                          (2.0 * hv);
      const double dv = sf::dgamma_dv(u, v);
      EXPECT_LE(std::abs(dv - fd_v), std::max(1e-6 * std::abs(dv), f0_abs_err / hv))
          << "u=" << u << " v=" << v;
    }
  }
}

TEST(DLogUpperGammaDu, MatchesRatioAndLogDerivative) {
  for (double u : {0.4, 1.0, 3.0, 8.0}) {
    for (double v : {0.2, 0.9, 2.0, 30.0}) {
      const double ratio = sf::dgamma_du(u, v) / sf::upper_incomplete_gamma(u, v);
      EXPECT_LE(rel_err(sf::dlog_upper_gamma_du(u, v), ratio), 1e-8)
          << "u=" << u << " v=" << v;
    }
  }
  // Large v: compare against a finite difference of the log form, which is
  // still well-defined after Gamma(u,v) underflows.
  const double u = 1.7, v = 900.0, h = 1e-6;
  const double fd = (sf::log_upper_incomplete_gamma(u + h, v) -
                     sf::log_upper_incomplete_gamma(u - h, v)) /
                    (2.0 * h);
  EXPECT_LE(rel_err(sf::dlog_upper_gamma_du(u, v), fd), 1e-7);
  EXPECT_NEAR(sf::dlog_upper_gamma_du(1.0, 0.0), -kEuler, 1e-13);
}

}  // namespace
