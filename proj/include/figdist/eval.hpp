#pragma once

// Model comparison: seeded train/holdout splitting, per-family fits, and
// AIC/BIC reports. Per-family failures are recorded in the report rather
// than aborting the remaining families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "figdist/dataset.hpp"
#include "figdist/mle.hpp"
#include "figdist/sampler.hpp"

namespace figdist {

struct ModelReport {
  std::string model_name;
  std::size_t n_params = 0;
  double loglik_in = 0.0;
  double aic = 0.0;  // 2 k - 2 LL_in
  double bic = 0.0;  // k ln(n_train) - 2 LL_in
  std::optional<double> loglik_out;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool ok = true;
  std::string error;
  std::optional<FitResult> fit;
};

/// Uniform random partition without replacement; ceil(n * fraction)
/// observations go to the test set. Deterministic given the seed.
inline std::pair<Dataset, Dataset> split(const Dataset& data, double holdout_fraction,
                                         RngSeed seed) {
  if (!(holdout_fraction >= 0.0) || holdout_fraction >= 1.0) {
    throw std::domain_error("figdist: holdout fraction must be in [0,1)");
  }
  const std::size_t n = data.n();
  const std::size_t n_test =
      static_cast<std::size_t>(std::ceil(n * holdout_fraction - 1e-12));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  Dataset train, test;
  train.source = data.source;
  test.source = data.source;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_test ? test : train).values.push_back(data.values[idx[i]]);
  }
  return {std::move(train), std::move(test)};
}

/// Fit each family on the train subset, evaluate AIC/BIC in-sample and the
/// log-likelihood on the holdout. Reports are sorted by AIC ascending (BIC
/// tiebreak); failed families sort last.
inline std::vector<ModelReport> compare(const Dataset& data,
                                        const std::vector<Family>& families,
                                        const FitOptions& options = {}) {
  if (families.empty()) {
    throw std::domain_error("figdist: compare needs at least one family");
  }
  auto [train, test] = split(data, options.holdout_fraction, options.seed);
  std::vector<ModelReport> reports;
  for (Family family : families) {
    ModelReport rep;
    rep.model_name = family_name(family);
    rep.n_params = family_n_params(family);
    rep.n_train = train.n();
    rep.n_test = test.n();
    try {
      FitResult fr = family == Family::fig ? fit(train, options)
                                           : fit_submodel(train, family, options);
      rep.loglik_in = fr.loglik;
      rep.aic = 2.0 * static_cast<double>(rep.n_params) - 2.0 * fr.loglik;
      rep.bic = static_cast<double>(rep.n_params) * std::log(static_cast<double>(train.n())) -
                2.0 * fr.loglik;
      if (test.n() > 0) {
        rep.loglik_out = log_likelihood(fr.params, test);
      }
      rep.fit = std::move(fr);
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
    reports.push_back(std::move(rep));
  }
  std::sort(reports.begin(), reports.end(), [](const ModelReport& a, const ModelReport& b) {
    if (a.ok != b.ok) return a.ok;
    if (a.aic != b.aic) return a.aic < b.aic;
    return a.bic < b.bic;
  });
  return reports;
}

}  // namespace figdist
