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

#include "adadps/data.hpp"
#include "adadps/optimizers.hpp"

using namespace adadps;

namespace {

Dataset small_dataset(std::uint64_t seed, int d = 10, int n = 80) {
  return gen_sparse_classification(seed, d, n, 2);
}

OptimizerConfig private_cfg(Method m, double sigma = 0.8, double clip = 1.0,
                            int b = 8, int n = 80) {
  OptimizerConfig cfg;
  cfg.method = m;
  cfg.alpha = 0.2;
  PrivacyConfig pc;
  pc.sigma = sigma;
  pc.clip_C = clip;
  pc.batch_b = b;
  pc.dataset_n = n;
  pc.delta = 1e-4;
  cfg.privacy = pc;
  return cfg;
}

Vec run_to_final(const OptimizerConfig& cfg, const Dataset& ds,
                 const Dataset* pub, const SideInfo& side, int T,
                 std::uint64_t seed, PrivacySpend* spend_out = nullptr) {
  TrainOptions opts;
  opts.T = T;
  opts.seed = seed;
  TrainState final_state;
  const ModelSpec spec = ds.default_model_spec();
  train(cfg, spec, ds, pub, nullptr, side, opts, &final_state);
  if (spend_out != nullptr) *spend_out = final_state.spend;
  return final_state.w;
}

void check_bitwise(const Vec& a, const Vec& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
}

bool any_difference(const Vec& a, const Vec& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("reduction: AdaDPS with A = ones is bitwise DP-SGD") {
  const Dataset ds = small_dataset(1);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  const Vec w_ada =
      run_to_final(private_cfg(Method::kAdaDps), ds, nullptr, ones, 30, 5);
  const Vec w_dp =
      run_to_final(private_cfg(Method::kDpSgd), ds, nullptr, ones, 30, 5);
  check_bitwise(w_ada, w_dp);
}

TEST_CASE("reduction: AdaDPS with sigma = 0 and clipping off is bitwise AdaS") {
  const Dataset ds = small_dataset(2);
  Vec a(ds.default_model_spec().param_count());
  RngStream rng(3, streams::kData);
  for (double& x : a) x = 0.1 + rng.uniform();
  const SideInfo oracle = oracle_sideinfo(a);

  OptimizerConfig ada = private_cfg(Method::kAdaDps, 0.0, kNoClip);
  const Vec w_ada = run_to_final(ada, ds, nullptr, oracle, 30, 7);

  // keep the noiseless privacy config so both runs draw identical batches
  OptimizerConfig adas = ada;
  adas.method = Method::kAdas;
  const Vec w_adas = run_to_final(adas, ds, nullptr, oracle, 30, 7);
  check_bitwise(w_ada, w_adas);
}

TEST_CASE("reduction: PDA-DPMD with lambda = 1 is bitwise DP-SGD") {
  const Dataset ds = small_dataset(4);
  const Dataset pub = small_dataset(99, 10, 20);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  OptimizerConfig pda = private_cfg(Method::kPdaDpmd);
  pda.pda_lambda = 1.0;
  const Vec w_pda = run_to_final(pda, ds, &pub, ones, 30, 11);
  const Vec w_dp =
      run_to_final(private_cfg(Method::kDpSgd), ds, &pub, ones, 30, 11);
  check_bitwise(w_pda, w_dp);
}

TEST_CASE("reduction: DP-Adam with beta1 = 0 is bitwise DP-RMSProp") {
  const Dataset ds = small_dataset(5);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  OptimizerConfig adam = private_cfg(Method::kDpAdam);
  adam.adam_beta1 = 0.0;
  const Vec w_adam = run_to_final(adam, ds, nullptr, ones, 30, 13);
  const Vec w_rms =
      run_to_final(private_cfg(Method::kDpRmsprop), ds, nullptr, ones, 30, 13);
  check_bitwise(w_adam, w_rms);
}

TEST_CASE("order of operations: AdaDPS differs from DP-R-Pub with noise on") {
  const Dataset ds = small_dataset(6);
  const Dataset pub = small_dataset(77, 10, 20);
  const ModelSpec spec = ds.default_model_spec();
  const SideInfo pub_side =
      public_sideinfo(spec.param_count(), PreconditionerKind::kRmsprop);
  OptimizerConfig ada = private_cfg(Method::kAdaDps);
  const Vec w_ada = run_to_final(ada, ds, &pub, pub_side, 10, 17);
  OptimizerConfig rpub = private_cfg(Method::kDpRPub);
  const Vec w_rpub = run_to_final(rpub, ds, &pub, pub_side, 10, 17);
  CHECK(any_difference(w_ada, w_rpub));
}

TEST_CASE("determinism: same seed gives the identical trajectory") {
  const Dataset ds = small_dataset(7);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  const Vec w1 =
      run_to_final(private_cfg(Method::kDpSgd), ds, nullptr, ones, 25, 3);
  const Vec w2 =
      run_to_final(private_cfg(Method::kDpSgd), ds, nullptr, ones, 25, 3);
  check_bitwise(w1, w2);
}

TEST_CASE("dpsgd noiseless with large C is plain mini-batch SGD") {
  const Dataset ds = small_dataset(8);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  OptimizerConfig dp = private_cfg(Method::kDpSgd, 0.0, kNoClip, 8);
  const Vec w_dp = run_to_final(dp, ds, nullptr, ones, 20, 9);
  OptimizerConfig sgd = dp;
  sgd.method = Method::kSgd;
  const Vec w_sgd = run_to_final(sgd, ds, nullptr, ones, 20, 9);
  check_bitwise(w_dp, w_sgd);
}

TEST_CASE("dpadam noiseless with large C matches textbook adam") {
  const Dataset ds = small_dataset(9);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  OptimizerConfig dp = private_cfg(Method::kDpAdam, 0.0, kNoClip, 8);
  const Vec w_dp = run_to_final(dp, ds, nullptr, ones, 20, 19);
  OptimizerConfig adam = dp;
  adam.method = Method::kAdam;
  const Vec w_adam = run_to_final(adam, ds, nullptr, ones, 20, 19);
  check_bitwise(w_dp, w_adam);
}

TEST_CASE("dpadam bias correction at t = 1") {
  // single example, sigma 0, large C: g~ = g; at t=1 m_hat = g, v_hat = g^2,
  // so the step is -lr * g / (|g| + eps)
  ModelSpec spec{ModelKind::kLinReg, 1, 1};
  SparseExample ex;
  ex.indices = {0};
  ex.values = {1.0};
  ex.y = 2.0;  // w=0 -> g = (w.x - y) x = -2
  Dataset ds;
  ds.d_in = 1;
  ds.task = Task::kRegression;
  ds.examples = {ex};

  OptimizerConfig cfg = private_cfg(Method::kDpAdam, 0.0, kNoClip, 1, 1);
  cfg.alpha = 0.1;
  RngStream noise(0, streams::kNoise);
  TrainState s;
  s.w = {0.0};
  s.side = ones_sideinfo(1);
  s.adam_m = {0.0};
  s.adam_v = {0.0};
  const TrainState next = step_dpadam(s, spec, {ex}, cfg, noise);
  const double expect = 0.1 * (-2.0) / (2.0 + cfg.adam_eps);
  CHECK(next.w[0] == doctest::Approx(-expect));
}

TEST_CASE("pda_dpmd degenerate lambdas") {
  ModelSpec spec{ModelKind::kLinReg, 1, 1};
  SparseExample ex;
  ex.indices = {0};
  ex.values = {1.0};
  ex.y = 1.0;  // g(0) = -1
  OptimizerConfig cfg = private_cfg(Method::kPdaDpmd, 0.0, kNoClip, 1, 1);
  cfg.alpha = 0.5;
  RngStream noise(0, streams::kNoise);
  TrainState s;
  s.w = {0.0};
  s.side = ones_sideinfo(1);
  s.adam_m = {0.0};
  s.adam_v = {0.0};

  // lambda = 0: pure public gradient
  cfg.pda_lambda = 0.0;
  SparseExample pub = ex;
  pub.y = 3.0;  // g_pub(0) = -3
  TrainState next = step_pda_dpmd(s, spec, {ex}, {pub}, cfg, noise);
  CHECK(next.w[0] == doctest::Approx(0.5 * 3.0));

  // lambda = 0.5, sigma = 0, public == private: plain SGD step
  cfg.pda_lambda = 0.5;
  next = step_pda_dpmd(s, spec, {ex}, {ex}, cfg, noise);
  CHECK(next.w[0] == doctest::Approx(0.5 * 1.0));
}

TEST_CASE("dp_r_pub with zero public gradients divides by eps_t only") {
  ModelSpec spec{ModelKind::kLinReg, 1, 1};
  SparseExample ex;
  ex.indices = {0};
  ex.values = {1.0};
  ex.y = 1.0;  // g(0) = -1
  SparseExample empty_pub;  // no features -> zero gradient
  OptimizerConfig cfg = private_cfg(Method::kDpRPub, 0.0, kNoClip, 1, 1);
  cfg.alpha = 1.0;
  cfg.rule.eps = 1e-2;
  RngStream noise(0, streams::kNoise);
  TrainState s;
  s.w = {0.0};
  s.side = public_sideinfo(1, PreconditionerKind::kRmsprop);
  s.adam_m = {0.0};
  s.adam_v = {0.0};
  const TrainState next = step_dp_r_pub(s, spec, {ex}, {empty_pub}, cfg, noise);
  CHECK(next.w[0] == doctest::Approx(1.0 / 1e-2));
}

TEST_CASE("dp_adam_pub matches the hand-unrolled 3-step recurrence") {
  // d = 1 linreg on x = 1: gradient at w is (w - y). One private example
  // with y = 1, one public example with y = 2, sigma = 0, C large.
  // Unroll (see fixtures/dp_adam_pub_unroll.md):
  //   g(w) = w - 1 (private),  g_pub(w) = w - 2
  //   mixed = b1 g + (1-b1) g_pub
  //   m <- b2 m + (1-b2) mixed;           m_hat = m / (1 - b2^t)
  //   v <- b3 v + (1-b3) g_pub^2;         v_hat = v / (1 - b3^t)
  //   w <- w - lr m_hat / (sqrt(v_hat) + eps)
  ModelSpec spec{ModelKind::kLinReg, 1, 1};
  SparseExample priv;
  priv.indices = {0};
  priv.values = {1.0};
  priv.y = 1.0;
  SparseExample pub = priv;
  pub.y = 2.0;

  OptimizerConfig cfg = private_cfg(Method::kDpAdamPub, 0.0, kNoClip, 1, 1);
  cfg.alpha = 0.1;
  cfg.adam_beta1 = 0.5;
  cfg.adam_beta2 = 0.9;
  cfg.adam_beta3 = 0.8;
  cfg.adam_eps = 1e-8;

  RngStream noise(0, streams::kNoise);
  TrainState s;
  s.w = {0.0};
  s.side = ones_sideinfo(1);
  s.adam_m = {0.0};
  s.adam_v = {0.0};

  double w = 0.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 3; ++t) {
    s = step_dp_adam_pub(s, spec, {priv}, {pub}, cfg, noise);

    const double g = w - 1.0;
    const double g_pub = w - 2.0;
    const double mixed = 0.5 * g + 0.5 * g_pub;
    m = 0.9 * m + 0.1 * mixed;
    v = 0.8 * v + 0.2 * g_pub * g_pub;
    const double m_hat = m / (1.0 - std::pow(0.9, t));
    const double v_hat = v / (1.0 - std::pow(0.8, t));
    w -= 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);

    CHECK(s.w[0] == doctest::Approx(w).epsilon(1e-14));
  }
}

TEST_CASE("dp_adam_pub with beta1 = 1 ignores the public gradient in m") {
  ModelSpec spec{ModelKind::kLinReg, 1, 1};
  SparseExample priv;
  priv.indices = {0};
  priv.values = {1.0};
  priv.y = 1.0;
  SparseExample pub = priv;
  pub.y = 5.0;
  OptimizerConfig cfg = private_cfg(Method::kDpAdamPub, 0.0, kNoClip, 1, 1);
  cfg.adam_beta1 = 1.0;  // step functions do not re-validate
  cfg.alpha = 0.1;
  RngStream noise(0, streams::kNoise);
  TrainState s;
  s.w = {0.0};
  s.side = ones_sideinfo(1);
  s.adam_m = {0.0};
  s.adam_v = {0.0};
  const TrainState a = step_dp_adam_pub(s, spec, {priv}, {pub}, cfg, noise);
  // at t = 1 the bias corrections cancel: m_hat = mixed = g_priv = -1 and
  // v_hat = g_pub^2 = 25, regardless of beta2/beta3
  CHECK(a.w[0] ==
        doctest::Approx(-0.1 * (-1.0) / (std::sqrt(25.0) + cfg.adam_eps)));
}

TEST_CASE("sensitivity: single-example influence on the pre-noise mean is at most C/b") {
  const Dataset ds = small_dataset(10, 12, 100);
  const ModelSpec spec = ds.default_model_spec();
  RngStream rng(55, streams::kData);
  PrivacyConfig pc;
  pc.sigma = 0.0;
  pc.clip_C = 0.5;
  pc.batch_b = 10;
  pc.dataset_n = 100;
  RngStream dummy(0, streams::kNoise);
  for (int trial = 0; trial < 100; ++trial) {
    Vec w(spec.param_count());
    for (double& x : w) x = rng.normal();
    Batch batch;
    for (int i = 0; i < 10; ++i) {
      batch.push_back(ds.examples[rng.uniform_int(ds.examples.size())]);
    }
    std::vector<Vec> grads = batch_grads(spec, w, batch);
    const Vec base = privatize_batch(grads, pc, dummy);
    // substitute one example's gradient by the null gradient
    const std::size_t victim = rng.uniform_int(10);
    grads[victim].assign(grads[victim].size(), 0.0);
    const Vec swapped = privatize_batch(grads, pc, dummy);
    Vec diff(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) diff[j] = base[j] - swapped[j];
    CHECK(l2_norm(diff) <= pc.clip_C / pc.batch_b + 1e-12);
  }
}

TEST_CASE("privacy ledger: epsilon after T steps equals an independent spend") {
  const Dataset ds = small_dataset(11);
  const SideInfo ones = ones_sideinfo(ds.default_model_spec().param_count());
  const OptimizerConfig cfg = private_cfg(Method::kDpSgd);
  PrivacySpend ledger;
  run_to_final(cfg, ds, nullptr, ones, 17, 23, &ledger);
  const PrivacySpend direct = spend(*cfg.privacy, 17);
  CHECK(ledger.epsilon == doctest::Approx(direct.epsilon));
  CHECK(ledger.steps == 17);
}

TEST_CASE("trace length and content") {
  const Dataset ds = small_dataset(12);
  const ModelSpec spec = ds.default_model_spec();
  const SideInfo ones = ones_sideinfo(spec.param_count());
  const OptimizerConfig cfg = private_cfg(Method::kDpSgd);
  TrainOptions opts;
  opts.T = 25;
  opts.eval_every = 10;
  opts.seed = 0;
  const std::vector<TraceRow> trace =
      train(cfg, spec, ds, nullptr, &ds, ones, opts);
  REQUIRE(trace.size() == 3);  // ceil(25 / 10)
  CHECK(trace[0].step == 10);
  CHECK(trace[1].step == 20);
  CHECK(trace[2].step == 25);
  CHECK(trace[0].epsilon > 0.0);
  CHECK(trace[2].epsilon >= trace[0].epsilon);
  for (const TraceRow& row : trace) CHECK(row.eval_metric.has_value());

  TrainOptions one;
  one.T = 1;
  one.eval_every = 10;
  const std::vector<TraceRow> t1 = train(cfg, spec, ds, nullptr, nullptr, ones, one);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].epsilon == doctest::Approx(spend(*cfg.privacy, 1).epsilon));
}

TEST_CASE("convex descent sanity in theory mode") {
  const ToyProblem toy = gen_toy(31);
  OptimizerConfig cfg;
  cfg.method = Method::kAdas;
  // the oracle divides rare coordinates by 0.01, so the stable step size is
  // small; 0.002 converges fast without oscillation
  cfg.alpha = 0.002;
  cfg.lr_mode = LrMode::kInvSqrt;
  cfg.rule.beta_mode = BetaMode::kTheory;
  const ModelSpec spec = toy.data.default_model_spec();
  TrainOptions opts;
  opts.T = 60;
  opts.eval_every = 5;
  opts.seed = 2;
  const std::vector<TraceRow> trace =
      train(cfg, spec, toy.data, nullptr, nullptr, toy.oracle, opts);
  const double initial =
      evaluate(spec, Vec(spec.param_count(), 0.0), toy.data.examples).mean_loss;
  double best = 1e300;
  double prev_best = 1e300;
  for (const TraceRow& row : trace) {
    best = std::min(best, row.train_loss);
    CHECK(best <= prev_best + 1e-15);
    prev_best = best;
  }
  CHECK(best < initial);
}

TEST_CASE("train validates its inputs") {
  const Dataset ds = small_dataset(13);
  const ModelSpec spec = ds.default_model_spec();
  const SideInfo ones = ones_sideinfo(spec.param_count());
  OptimizerConfig cfg = private_cfg(Method::kDpRPub);
  TrainOptions opts;
  opts.T = 2;
  // public pool required but missing
  CHECK_THROWS_AS(train(cfg, spec, ds, nullptr, nullptr, ones, opts),
                  std::invalid_argument);
  OptimizerConfig bad = private_cfg(Method::kDpSgd);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(train(bad, spec, ds, nullptr, nullptr, ones, opts),
                  std::invalid_argument);
  opts.T = 0;
  CHECK_THROWS_AS(train(private_cfg(Method::kDpSgd), spec, ds, nullptr, nullptr,
                        ones, opts),
                  std::invalid_argument);
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::kAdaDps, Method::kDpSgd, Method::kDpAdam,
                   Method::kDpRmsprop, Method::kDpRPub, Method::kDpAdamPub,
                   Method::kPdaDpmd, Method::kSgd, Method::kAdam, Method::kAdas}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK_THROWS(method_from_name("nope"));
}
