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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adadps/data.hpp"
#include "adadps/models.hpp"
#include "adadps/privacy.hpp"
#include "adadps/sideinfo.hpp"

namespace adadps {

enum class Method {
  kAdaDps,     // precondition-then-privatize
  kDpSgd,
  kDpAdam,     // privatize-then-adapt, noisy moments
  kDpRmsprop,  // DP-Adam without the momentum buffer
  kDpRPub,     // privatize-then-divide by a public-data preconditioner
  kDpAdamPub,  // DP-Adam with public-data moments
  kPdaDpmd,    // convex combination of privatized and clean public gradients
  kSgd,        // non-private references
  kAdam,
  kAdas,       // non-private preconditioned SGD (no momentum)
};

enum class LrMode { kConstant, kInvSqrt };

struct OptimizerConfig {
  Method method = Method::kDpSgd;
  LrMode lr_mode = LrMode::kConstant;
  double alpha = 0.1;
  std::optional<PrivacyConfig> privacy;  // nullopt = non-private
  PreconditionerRule rule;               // adadps / adas / dp_r_pub
  double pda_lambda = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_beta3 = 0.999;  // DP-Adam-Pub public second-moment average
  double adam_eps = 1e-8;

  bool needs_public_batch() const;
  bool needs_privacy() const;
  double lr_at(int t) const;  // t >= 1
  void validate() const;
};

struct TrainState {
  Vec w;
  int t = 0;
  SideInfo side;
  Vec adam_m, adam_v;  // noisy-moment state (DP-Adam family)
  PrivacySpend spend;
};

TrainState make_train_state(const ModelSpec& spec, const SideInfo& side,
                            RngStream& init_rng);

using Batch = std::vector<SparseExample>;

// Algorithm order: update side info from the public batch (Option 1),
// precondition each per-example gradient, clip, average, add
// (1/b) N(0, sigma^2 C^2), SGD step. With fixed side info (Option 2) no
// public batch is needed.
TrainState step_adadps(const TrainState& state, const ModelSpec& spec,
                       const Batch& batch_private, const Batch* batch_public,
                       const OptimizerConfig& cfg, RngStream& noise_rng);

TrainState step_dpsgd(const TrainState& state, const ModelSpec& spec,
                      const Batch& batch, const OptimizerConfig& cfg,
                      RngStream& noise_rng);

// Privatize first, then first/second moment estimates from the noisy mean
// with bias correction.
TrainState step_dpadam(const TrainState& state, const ModelSpec& spec,
                       const Batch& batch, const OptimizerConfig& cfg,
                       RngStream& noise_rng);

TrainState step_dprmsprop(const TrainState& state, const ModelSpec& spec,
                          const Batch& batch, const OptimizerConfig& cfg,
                          RngStream& noise_rng);

// Privatize first, then divide by the public-data RMSProp preconditioner
// (contrast with step_adadps, which preconditions before the mechanism).
TrainState step_dp_r_pub(const TrainState& state, const ModelSpec& spec,
                         const Batch& batch_private, const Batch& batch_public,
                         const OptimizerConfig& cfg, RngStream& noise_rng);

// m^t = b2 m^{t-1} + (1-b2)(b1 gt~ + (1-b1) g^), v^t = b3 v^{t-1} + (1-b3)(g^)^2,
// bias-corrected step; g^ is the clean public mean.
TrainState step_dp_adam_pub(const TrainState& state, const ModelSpec& spec,
                            const Batch& batch_private,
                            const Batch& batch_public,
                            const OptimizerConfig& cfg, RngStream& noise_rng);

// g_eff = lambda * privatized(private mean) + (1 - lambda) * clean public
// mean; plain SGD step, no preconditioning.
TrainState step_pda_dpmd(const TrainState& state, const ModelSpec& spec,
                         const Batch& batch_private, const Batch& batch_public,
                         const OptimizerConfig& cfg, RngStream& noise_rng);

TrainState step_sgd(const TrainState& state, const ModelSpec& spec,
                    const Batch& batch, const OptimizerConfig& cfg);

TrainState step_adam(const TrainState& state, const ModelSpec& spec,
                     const Batch& batch, const OptimizerConfig& cfg);

// Non-private preconditioned SGD, no momentum; averages per-example
// preconditioned gradients (so that the noiseless, unclipped AdaDPS
// trajectory coincides with it bit for bit).
TrainState step_adas(const TrainState& state, const ModelSpec& spec,
                     const Batch& batch, const Batch* batch_public,
                     const OptimizerConfig& cfg);

struct TraceRow {
  int step = 0;
  double train_loss = 0.0;
  std::optional<double> eval_metric;
  double epsilon = 0.0;
};

struct TrainOptions {
  int T = 1;
  int eval_every = 10;
  std::uint64_t seed = 0;
};

// Runs T steps of the configured rule, recording metrics every eval_every
// steps (and at step T). Private batches are sampled uniformly without
// replacement; public batches come from an independent sub-stream, so
// methods without public data see identical private-batch sequences.
std::vector<TraceRow> train(const OptimizerConfig& cfg, const ModelSpec& spec,
                            const Dataset& train_set,
                            const Dataset* public_pool,
                            const Dataset* eval_set, const SideInfo& side0,
                            const TrainOptions& opts,
                            TrainState* final_state = nullptr);

std::string method_name(Method m);
Method method_from_name(const std::string& name);

}  // namespace adadps
