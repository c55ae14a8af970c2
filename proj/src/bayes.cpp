#include "cbp/bayes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cbp/error.hpp"

namespace cbp {

namespace {

void check_prior(const GammaPrior& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    throw Error(Errc::InvalidInstance, fmt::format("gamma prior needs finite alpha, beta > 0 (got {}, {})", p.alpha, p.beta));
  }
}

}  // namespace

double GammaPrior::cv() const { return 1.0 / std::sqrt(alpha); }

GammaPrior prior_from_mean_cv(double mean, double cv) {
  if (!(mean > 0.0) || !(cv > 0.0)) {
    throw Error(Errc::InvalidInstance, fmt::format("prior mean and cv must be > 0 (got {}, {})", mean, cv));
  }
  GammaPrior p{1.0 / (cv * cv), 0.0};
  p.beta = p.alpha / mean;
  check_prior(p);
  return p;
}

GammaPrior posterior_update(const GammaPrior& prior, int shocks, UsageIntegral usage) {
  check_prior(prior);
  if (shocks < 0 || !(usage.value >= 0.0)) {
    throw Error(Errc::NegativeRateInput, "shock count and usage must be nonnegative");
  }
  return {prior.alpha + shocks, prior.beta + usage.value};
}

double ce_estimate(const GammaPrior& prior, int shocks, UsageIntegral usage) {
  return posterior_update(prior, shocks, usage).mean();
}

CESchedule ce_schedule(double horizon, int n_opt) {
  if (n_opt < 0) throw Error(Errc::InvalidInstance, "n_opt must be >= 0");
  if (!(horizon > 0.0)) throw Error(Errc::EmptyHorizon, "horizon must be > 0");
  CESchedule s{n_opt, {}};
  for (int j = 1; j <= n_opt; ++j) s.epochs.push_back(j * horizon / (n_opt + 1));
  return s;
}

}  // namespace cbp
