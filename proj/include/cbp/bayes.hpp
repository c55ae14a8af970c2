#pragma once

#include <vector>

namespace cbp {

/// Gamma belief over the base rate, shape-rate form: density proportional to
/// lambda^(alpha-1) exp(-beta lambda).
struct GammaPrior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / beta; }
  double variance() const { return alpha / (beta * beta); }
  double cv() const;
};

/// alpha = 1/cv^2, beta = alpha/mean. Throws InvalidInstance unless both are
/// finite and positive.
GammaPrior prior_from_mean_cv(double mean, double cv);

/// Integral of f(s_u) du along the applied policy.
struct UsageIntegral {
  double value = 0.0;
};

GammaPrior posterior_update(const GammaPrior& prior, int shocks, UsageIntegral usage);

/// Posterior mean (alpha + y) / (beta + usage).
double ce_estimate(const GammaPrior& prior, int shocks, UsageIntegral usage);

struct CESchedule {
  int n_opt = 0;
  std::vector<double> epochs;  ///< elapsed times j T / (n_opt + 1), j = 1..n_opt
};

CESchedule ce_schedule(double horizon, int n_opt);

}  // namespace cbp
