// Copyright 2026 The adadps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adadps/privacy.hpp"

using namespace adadps;

namespace {

// Independent extended-precision oracle for the sampled Gaussian RDP at
// integer order alpha: direct log-sum-exp evaluation of
//   log sum_k C(alpha,k) (1-q)^(alpha-k) q^k exp(k(k-1)/(2 sigma^2))
// in long double with lgammal for the binomial coefficients.
long double rdp_oracle(long double q, long double sigma, int alpha) {
  if (q == 1.0L) return alpha / (2.0L * sigma * sigma);
  std::vector<long double> terms;
  for (int k = 0; k <= alpha; ++k) {
    const long double log_binom =
        lgammal(alpha + 1.0L) - lgammal(k + 1.0L) - lgammal(alpha - k + 1.0L);
    const long double t = log_binom + (alpha - k) * logl(1.0L - q) +
                          k * logl(q) +
                          (static_cast<long double>(k) * (k - 1)) /
                              (2.0L * sigma * sigma);
    terms.push_back(t);
  }
  long double mx = terms[0];
  for (long double t : terms) mx = std::max(mx, t);
  long double s = 0.0L;
  for (long double t : terms) s += expl(t - mx);
  return (mx + logl(s)) / (alpha - 1);
}

}  // namespace

TEST_CASE("clip scales down, leaves small vectors alone") {
  const Vec g = {6.0, 8.0};  // norm 10
  const Vec c = clip(g, 1.0);
  CHECK(l2_norm(c) == doctest::Approx(1.0));
  CHECK(c[0] == doctest::Approx(0.6));
  CHECK(c[1] == doctest::Approx(0.8));

  const Vec small = {0.3, 0.4};  // norm 0.5
  const Vec u = clip(small, 1.0);
  CHECK(u[0] == 0.3);
  CHECK(u[1] == 0.4);

  const Vec z = clip({0.0, 0.0}, 1.0);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  CHECK_THROWS_AS(clip(g, 0.0), std::invalid_argument);
}

TEST_CASE("clip is idempotent and norm-bounded") {
  RngStream rng(3, streams::kData);
  for (int trial = 0; trial < 20; ++trial) {
    Vec g = sample_std_normal(rng, 10);
    for (double& x : g) x *= 5.0;
    const Vec once = clip(g, 1.0);
    const Vec twice = clip(once, 1.0);
    CHECK(l2_norm(once) <= 1.0 + 1e-12);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(once[j] == twice[j]);
  }
}

TEST_CASE("clip with kNoClip returns the input unchanged") {
  const Vec g = {100.0, -200.0};
  const Vec c = clip(g, kNoClip);
  CHECK(c[0] == g[0]);
  CHECK(c[1] == g[1]);
}

TEST_CASE("privatize_batch noiseless reductions") {
  PrivacyConfig cfg;
  cfg.sigma = 0.0;
  cfg.clip_C = 10.0;
  cfg.batch_b = 2;
  cfg.dataset_n = 4;
  RngStream rng(0, streams::kNoise);

  // all grads within C: exact batch mean
  const Vec out = privatize_batch({{1.0, 2.0}, {3.0, 4.0}}, cfg, rng);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 3.0);

  // one large gradient, sigma = 0: direction kept, norm C / b
  cfg.batch_b = 1;
  cfg.clip_C = 1.0;
  const Vec big = privatize_batch({{30.0, 40.0}}, cfg, rng);
  CHECK(l2_norm(big) == doctest::Approx(1.0));
  CHECK(big[0] == doctest::Approx(0.6));
}

TEST_CASE("privatize_batch rejects batch size mismatch") {
  PrivacyConfig cfg;
  cfg.sigma = 1.0;
  cfg.batch_b = 3;
  cfg.dataset_n = 10;
  RngStream rng(0, streams::kNoise);
  CHECK_THROWS_AS(privatize_batch({{1.0}, {2.0}}, cfg, rng),
                  std::invalid_argument);
}

TEST_CASE("privatize_batch noise std equals sigma C / b within 1%") {
  PrivacyConfig cfg;
  cfg.sigma = 1.3;
  cfg.clip_C = 0.7;
  cfg.batch_b = 4;
  cfg.dataset_n = 100;
  RngStream rng(2024, streams::kNoise);
  const std::vector<Vec> grads(4, Vec{0.1, -0.2});

  PrivacyConfig noiseless = cfg;
  noiseless.sigma = 0.0;
  RngStream dummy(0, streams::kNoise);
  const Vec mean = privatize_batch(grads, noiseless, dummy);

  const int trials = 100000;
  double sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const Vec out = privatize_batch(grads, cfg, rng);
    const double n0 = out[0] - mean[0];
    const double n1 = out[1] - mean[1];
    sumsq += n0 * n0 + n1 * n1;
  }
  const double emp_std = std::sqrt(sumsq / (2.0 * trials));
  const double want = cfg.sigma * cfg.clip_C / cfg.batch_b;
  CHECK(emp_std == doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("privatize_batch micro-batching averages groups before clipping") {
  PrivacyConfig cfg;
  cfg.sigma = 0.0;
  cfg.clip_C = 0.5;
  cfg.batch_b = 4;
  cfg.dataset_n = 100;
  cfg.micro_batch = 2;
  RngStream rng(0, streams::kNoise);
  // group means: (2,0) and (0,0); clipped to norm 0.5: (0.5,0) and (0,0)
  const std::vector<Vec> grads = {
      {3.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  const Vec out = privatize_batch(grads, cfg, rng);
  CHECK(out[0] == doctest::Approx(0.25));
  CHECK(out[1] == 0.0);
}

TEST_CASE("rdp matches closed form at q = 1") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const std::vector<double> vals =
        rdp_subsampled_gaussian(1.0, sigma, {2, 3, 16});
    CHECK(vals[0] == doctest::Approx(2.0 / (2.0 * sigma * sigma)));
    CHECK(vals[1] == doctest::Approx(3.0 / (2.0 * sigma * sigma)));
    CHECK(vals[2] == doctest::Approx(16.0 / (2.0 * sigma * sigma)));
  }
}

TEST_CASE("rdp vanishes as sigma grows") {
  const std::vector<double> vals =
      rdp_subsampled_gaussian(0.01, 1e6, {2, 8, 64});
  for (double v : vals) {
    CHECK(v >= 0.0);
    CHECK(v < 1e-6);
  }
}

TEST_CASE("rdp matches the extended-precision oracle on the grid") {
  std::vector<int> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  for (double q : {0.001, 0.01, 0.1}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const std::vector<double> got = rdp_subsampled_gaussian(q, sigma, orders);
      for (std::size_t i = 0; i < orders.size(); ++i) {
        const long double want = rdp_oracle(q, sigma, orders[i]);
        const long double rel =
            fabsl(got[i] - want) / std::max(fabsl(want), 1e-300L);
        CHECK(static_cast<double>(rel) <= 1e-6);
      }
    }
  }
}

TEST_CASE("rdp input validation") {
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.0, 1.0, {2}), std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(1.1, 1.0, {2}), std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.1, 0.0, {2}), std::invalid_argument);
  CHECK_THROWS_AS(rdp_subsampled_gaussian(0.1, 1.0, {1}), std::invalid_argument);
}

TEST_CASE("spend monotone in steps, antitone in sigma, monotone in q") {
  for (double q : {0.001, 0.01, 0.1}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      PrivacyConfig cfg;
      cfg.sigma = sigma;
      cfg.batch_b = static_cast<int>(q * 1000);
      cfg.dataset_n = 1000;
      cfg.delta = 1e-5;
      const double e1 = spend(cfg, 1).epsilon;
      const double e2 = spend(cfg, 2).epsilon;
      const double e100 = spend(cfg, 100).epsilon;
      CHECK(e2 >= e1);
      CHECK(e100 >= e2);

      PrivacyConfig wider = cfg;
      wider.sigma = 2.0 * sigma;
      CHECK(spend(wider, 100).epsilon < e100);

      if (cfg.batch_b * 2 <= cfg.dataset_n) {
        PrivacyConfig denser = cfg;
        denser.batch_b *= 2;
        CHECK(spend(denser, 100).epsilon >= e100);
      }
    }
  }
}

TEST_CASE("spend: huge sigma gives tiny epsilon") {
  PrivacyConfig cfg;
  cfg.sigma = 1e6;
  cfg.batch_b = 10;
  cfg.dataset_n = 1000;
  cfg.delta = 1e-5;
  CHECK(spend(cfg, 1).epsilon < 1e-3);
}

TEST_CASE("spend validates input") {
  PrivacyConfig cfg;
  cfg.sigma = 1.0;
  cfg.batch_b = 10;
  cfg.dataset_n = 1000;
  cfg.delta = 1e-5;
  CHECK_THROWS_AS(spend(cfg, 0), std::invalid_argument);
  PrivacyConfig bad = cfg;
  bad.delta = 1.0;
  CHECK_THROWS_AS(spend(bad, 1), std::invalid_argument);
  PrivacyConfig noclip = cfg;
  noclip.clip_C = kNoClip;
  CHECK_THROWS_AS(noclip.validate(), std::invalid_argument);
}

TEST_CASE("spend records the minimizing order from the grid") {
  PrivacyConfig cfg;
  cfg.sigma = 1.0;
  cfg.batch_b = 10;
  cfg.dataset_n = 1000;
  cfg.delta = 1e-5;
  const PrivacySpend s = spend(cfg, 100);
  CHECK(s.steps == 100);
  CHECK(s.best_order >= 2);
  double best = 1e300;
  for (const auto& [alpha, rdp] : s.rdp_orders) {
    best = std::min(best, 100.0 * rdp + std::log(1.0 / cfg.delta) / (alpha - 1));
  }
  CHECK(s.epsilon == doctest::Approx(best));
}

TEST_CASE("micro-batching changes the accountant's sampling unit") {
  PrivacyConfig cfg;
  cfg.sigma = 1.0;
  cfg.batch_b = 64;
  cfg.dataset_n = 6400;
  cfg.delta = 1e-5;
  PrivacyConfig micro = cfg;
  micro.micro_batch = 4;
  // same ratio b/n, so identical epsilon; the unit differs, not q
  CHECK(spend(micro, 10).epsilon == doctest::Approx(spend(cfg, 10).epsilon));
  CHECK(micro.mechanism_batches() == 16);
}
