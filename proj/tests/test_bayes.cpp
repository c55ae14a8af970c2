#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cbp/bayes.hpp"
#include "cbp/error.hpp"

using namespace cbp;

namespace {

struct Moments {
  double mean;
  double variance;
};

// Bayes rule on a lambda grid: prior density times Poisson likelihood of y
// shocks over exposure u, normalized numerically.
Moments grid_posterior(const GammaPrior& prior, int y, double u) {
  const int n = 100000;
  const double post_mean = (prior.alpha + y) / (prior.beta + u);
  const double post_sd = std::sqrt(prior.alpha + y) / (prior.beta + u);
  const double hi = post_mean + 40 * post_sd;
  const double h = hi / n;
  double w0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lam = (i + 0.5) * h;
    const double log_prior = (prior.alpha - 1) * std::log(lam) - prior.beta * lam;
    const double log_lik = y * std::log(lam * u + 1e-300) - lam * u;
    const double w = std::exp(log_prior + log_lik - ((prior.alpha + y - 1) * std::log(post_mean) - (prior.beta + u) * post_mean));
    w0 += w;
    w1 += w * lam;
    w2 += w * lam * lam;
  }
  const double mean = w1 / w0;
  return {mean, w2 / w0 - mean * mean};
}

}  // namespace

TEST_CASE("conjugate update examples") {
  const GammaPrior p{2.0, 2.0};
  const auto same = posterior_update(p, 0, {0.0});
  CHECK(same.alpha == 2.0);
  CHECK(same.beta == 2.0);
  const auto post = posterior_update(p, 3, {1.5});
  CHECK(post.alpha == 5.0);
  CHECK(post.beta == 3.5);
  CHECK_THROWS_AS(posterior_update(p, -1, {0.0}), Error);
  CHECK_THROWS_AS(posterior_update(p, 0, {-0.1}), Error);
}

TEST_CASE("sequential updates equal one batch update") {
  const GammaPrior p{1.7, 0.9};
  const auto a = posterior_update(posterior_update(p, 2, {0.75}), 5, {1.25});
  const auto b = posterior_update(p, 7, {2.0});
  CHECK(a.alpha == b.alpha);
  CHECK(a.beta == b.beta);
}

TEST_CASE("posterior moments agree with grid Bayes") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const GammaPrior p{0.5 + 4 * u(rng), 0.3 + 3 * u(rng)};
    const int y = static_cast<int>(12 * u(rng));
    const double usage = 8 * u(rng);
    const auto post = posterior_update(p, y, {usage});
    const auto oracle = grid_posterior(p, y, usage);
    INFO("alpha=" << p.alpha << " beta=" << p.beta << " y=" << y << " usage=" << usage);
    CHECK(std::abs(post.mean() - oracle.mean) <= 1e-4 * oracle.mean);
    CHECK(std::abs(post.variance() - oracle.variance) <= 1e-4 * oracle.variance);
  }
}

TEST_CASE("certainty-equivalent estimate") {
  const auto p = prior_from_mean_cv(1.0, std::sqrt(0.5));
  CHECK(p.alpha == doctest::Approx(2.0));
  CHECK(p.beta == doctest::Approx(2.0));
  CHECK(ce_estimate(p, 0, {0.0}) == p.mean());
  CHECK(ce_estimate(p, 0, {1e9}) < 1e-8);
  CHECK(ce_estimate(p, 0, {1e9}) > 0.0);
  for (int y = 1; y < 10; ++y) CHECK(ce_estimate(p, y, {3.0}) > ce_estimate(p, y - 1, {3.0}));
  CHECK_THROWS_AS(prior_from_mean_cv(0.0, 1.0), Error);
  CHECK_THROWS_AS(prior_from_mean_cv(1.0, 0.0), Error);
}

TEST_CASE("posterior cv never grows") {
  const GammaPrior p{1.3, 0.8};
  for (int y = 0; y < 8; ++y) {
    for (double usage : {0.0, 0.5, 2.0, 10.0}) {
      const double cv = posterior_update(p, y, {usage}).cv();
      CHECK(cv <= posterior_update(p, y > 0 ? y - 1 : 0, {usage}).cv());
      CHECK(cv <= posterior_update(p, y, {usage / 2}).cv());
      CHECK(cv == doctest::Approx(1.0 / std::sqrt(p.alpha + y)));
    }
  }
}

TEST_CASE("re-optimization schedule") {
  CHECK(ce_schedule(10.0, 0).epochs.empty());
  CHECK(ce_schedule(10.0, 1).epochs == std::vector<double>{5.0});
  CHECK(ce_schedule(15.0, 4).epochs == std::vector<double>{3.0, 6.0, 9.0, 12.0});
  const auto s = ce_schedule(7.0, 6);
  for (std::size_t j = 0; j < s.epochs.size(); ++j) {
    CHECK(s.epochs[j] > 0.0);
    CHECK(s.epochs[j] < 7.0);
    if (j > 0) CHECK(s.epochs[j] > s.epochs[j - 1]);
  }
  CHECK_THROWS_AS(ce_schedule(10.0, -1), Error);
}
