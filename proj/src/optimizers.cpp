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

#include "adadps/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adadps {

namespace {

// Same summation order as privatize_batch so noiseless trajectories of the
// private and non-private variants coincide bitwise.
Vec mean_of(const std::vector<Vec>& grads) {
  const std::size_t d = grads.front().size();
  Vec out(d, 0.0);
  for (const Vec& g : grads) {
    for (std::size_t j = 0; j < d; ++j) out[j] += g[j];
  }
  const double b = static_cast<double>(grads.size());
  for (std::size_t j = 0; j < d; ++j) out[j] /= b;
  return out;
}

void sgd_update(Vec& w, const Vec& g, double lr) {
  for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
}

Vec public_mean_grad(const ModelSpec& spec, const Vec& w, const Batch& pub) {
  return mean_of(batch_grads(spec, w, pub));
}

const PrivacyConfig& require_privacy(const OptimizerConfig& cfg,
                                     const char* who) {
  if (!cfg.privacy) {
    throw std::invalid_argument(std::string(who) + ": privacy config required");
  }
  return *cfg.privacy;
}

void refresh_spend(TrainState& s, const OptimizerConfig& cfg) {
  if (cfg.privacy && cfg.privacy->enabled()) {
    if (s.spend.rdp_orders.empty()) {
      s.spend = spend(*cfg.privacy, s.t);
    } else {
      s.spend = spend_from_rdp(s.spend.rdp_orders, cfg.privacy->delta, s.t);
    }
  }
}

}  // namespace

bool OptimizerConfig::needs_public_batch() const {
  switch (method) {
    case Method::kDpRPub:
    case Method::kDpAdamPub:
    case Method::kPdaDpmd:
      return true;
    default:
      return false;
  }
}

bool OptimizerConfig::needs_privacy() const {
  switch (method) {
    case Method::kAdaDps:
    case Method::kDpSgd:
    case Method::kDpAdam:
    case Method::kDpRmsprop:
    case Method::kDpRPub:
    case Method::kDpAdamPub:
    case Method::kPdaDpmd:
      return true;
    default:
      return false;
  }
}

double OptimizerConfig::lr_at(int t) const {
  if (t < 1) throw std::invalid_argument("lr_at: t must be >= 1");
  return lr_mode == LrMode::kConstant ? alpha : alpha / std::sqrt(static_cast<double>(t));
}

void OptimizerConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("optimizer: alpha must be > 0");
  if (!(pda_lambda >= 0.0 && pda_lambda <= 1.0)) {
    throw std::invalid_argument("optimizer: pda_lambda must be in [0,1]");
  }
  // beta1 = 0 is allowed: it turns the momentum buffer off, which is the
  // DP-RMSProp reduction.
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) {
    throw std::invalid_argument("optimizer: adam_beta1 must be in [0,1)");
  }
  for (double b : {adam_beta2, adam_beta3}) {
    if (!(b > 0.0 && b < 1.0)) {
      throw std::invalid_argument("optimizer: adam betas must be in (0,1)");
    }
  }
  if (needs_privacy()) {
    require_privacy(*this, "optimizer").validate();
  }
}

TrainState make_train_state(const ModelSpec& spec, const SideInfo& side,
                            RngStream& init_rng) {
  TrainState s;
  s.w = init_params(spec, init_rng);
  s.side = side;
  s.adam_m.assign(s.w.size(), 0.0);
  s.adam_v.assign(s.w.size(), 0.0);
  return s;
}

TrainState step_adadps(const TrainState& state, const ModelSpec& spec,
                       const Batch& batch_private, const Batch* batch_public,
                       const OptimizerConfig& cfg, RngStream& noise_rng) {
  const PrivacyConfig& priv = require_privacy(cfg, "step_adadps");
  TrainState next = state;
  next.t = state.t + 1;
  if (!state.side.is_fixed()) {
    if (batch_public == nullptr) {
      throw std::invalid_argument("step_adadps: public batch required (Option 1)");
    }
    next.side = update_public(state.side, cfg.rule,
                              public_mean_grad(spec, state.w, *batch_public));
  }
  std::vector<Vec> grads = batch_grads(spec, state.w, batch_private);
  for (Vec& g : grads) g = precondition(g, next.side, cfg.rule);
  const Vec gt = privatize_batch(grads, priv, noise_rng);
  sgd_update(next.w, gt, cfg.lr_at(next.t));
  refresh_spend(next, cfg);
  return next;
}

TrainState step_dpsgd(const TrainState& state, const ModelSpec& spec,
                      const Batch& batch, const OptimizerConfig& cfg,
                      RngStream& noise_rng) {
  const PrivacyConfig& priv = require_privacy(cfg, "step_dpsgd");
  TrainState next = state;
  next.t = state.t + 1;
  const Vec gt = privatize_batch(batch_grads(spec, state.w, batch), priv, noise_rng);
  sgd_update(next.w, gt, cfg.lr_at(next.t));
  refresh_spend(next, cfg);
  return next;
}

namespace {

// Shared by DP-Adam (beta1 from cfg) and DP-RMSProp (beta1 = 0, no
// momentum); both apply the bias-corrected step to the privatized mean.
TrainState noisy_moment_step(const TrainState& state, const ModelSpec& spec,
                             const Batch& batch, const OptimizerConfig& cfg,
                             double beta1, RngStream& noise_rng,
                             const char* who) {
  const PrivacyConfig& priv = require_privacy(cfg, who);
  TrainState next = state;
  next.t = state.t + 1;
  const Vec gt = privatize_batch(batch_grads(spec, state.w, batch), priv, noise_rng);
  const double b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(beta1, next.t);
  const double corr2 = 1.0 - std::pow(b2, next.t);
  const double lr = cfg.lr_at(next.t);
  for (std::size_t j = 0; j < next.w.size(); ++j) {
    next.adam_m[j] = beta1 * next.adam_m[j] + (1.0 - beta1) * gt[j];
    next.adam_v[j] = b2 * next.adam_v[j] + (1.0 - b2) * gt[j] * gt[j];
    const double m_hat = next.adam_m[j] / corr1;
    const double v_hat = next.adam_v[j] / corr2;
    next.w[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
  refresh_spend(next, cfg);
  return next;
}

}  // namespace

TrainState step_dpadam(const TrainState& state, const ModelSpec& spec,
                       const Batch& batch, const OptimizerConfig& cfg,
                       RngStream& noise_rng) {
  return noisy_moment_step(state, spec, batch, cfg, cfg.adam_beta1, noise_rng,
                           "step_dpadam");
}

TrainState step_dprmsprop(const TrainState& state, const ModelSpec& spec,
                          const Batch& batch, const OptimizerConfig& cfg,
                          RngStream& noise_rng) {
  return noisy_moment_step(state, spec, batch, cfg, 0.0, noise_rng,
                           "step_dprmsprop");
}

TrainState step_dp_r_pub(const TrainState& state, const ModelSpec& spec,
                         const Batch& batch_private, const Batch& batch_public,
                         const OptimizerConfig& cfg, RngStream& noise_rng) {
  const PrivacyConfig& priv = require_privacy(cfg, "step_dp_r_pub");
  TrainState next = state;
  next.t = state.t + 1;
  // Noise enters BEFORE the division; this is the whole difference from
  // step_adadps.
  next.side = update_public(state.side, cfg.rule,
                            public_mean_grad(spec, state.w, batch_public));
  const Vec gt =
      privatize_batch(batch_grads(spec, state.w, batch_private), priv, noise_rng);
  sgd_update(next.w, elementwise_div(gt, next.side.A), cfg.lr_at(next.t));
  refresh_spend(next, cfg);
  return next;
}

TrainState step_dp_adam_pub(const TrainState& state, const ModelSpec& spec,
                            const Batch& batch_private,
                            const Batch& batch_public,
                            const OptimizerConfig& cfg, RngStream& noise_rng) {
  const PrivacyConfig& priv = require_privacy(cfg, "step_dp_adam_pub");
  TrainState next = state;
  next.t = state.t + 1;
  const Vec g_pub = public_mean_grad(spec, state.w, batch_public);
  const Vec gt =
      privatize_batch(batch_grads(spec, state.w, batch_private), priv, noise_rng);
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2, b3 = cfg.adam_beta3;
  const double corr2 = 1.0 - std::pow(b2, next.t);
  const double corr3 = 1.0 - std::pow(b3, next.t);
  const double lr = cfg.lr_at(next.t);
  for (std::size_t j = 0; j < next.w.size(); ++j) {
    const double mixed = b1 * gt[j] + (1.0 - b1) * g_pub[j];
    next.adam_m[j] = b2 * next.adam_m[j] + (1.0 - b2) * mixed;
    next.adam_v[j] = b3 * next.adam_v[j] + (1.0 - b3) * g_pub[j] * g_pub[j];
    const double m_hat = next.adam_m[j] / corr2;
    const double v_hat = next.adam_v[j] / corr3;
    next.w[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
  refresh_spend(next, cfg);
  return next;
}

TrainState step_pda_dpmd(const TrainState& state, const ModelSpec& spec,
                         const Batch& batch_private, const Batch& batch_public,
                         const OptimizerConfig& cfg, RngStream& noise_rng) {
  const PrivacyConfig& priv = require_privacy(cfg, "step_pda_dpmd");
  if (!(cfg.pda_lambda >= 0.0 && cfg.pda_lambda <= 1.0)) {
    throw std::invalid_argument("step_pda_dpmd: lambda must be in [0,1]");
  }
  TrainState next = state;
  next.t = state.t + 1;
  const Vec gt =
      privatize_batch(batch_grads(spec, state.w, batch_private), priv, noise_rng);
  const Vec g_pub = public_mean_grad(spec, state.w, batch_public);
  Vec g_eff(gt.size());
  for (std::size_t j = 0; j < gt.size(); ++j) {
    g_eff[j] = cfg.pda_lambda * gt[j] + (1.0 - cfg.pda_lambda) * g_pub[j];
  }
  sgd_update(next.w, g_eff, cfg.lr_at(next.t));
  refresh_spend(next, cfg);
  return next;
}

TrainState step_sgd(const TrainState& state, const ModelSpec& spec,
                    const Batch& batch, const OptimizerConfig& cfg) {
  TrainState next = state;
  next.t = state.t + 1;
  sgd_update(next.w, mean_of(batch_grads(spec, state.w, batch)), cfg.lr_at(next.t));
  return next;
}

TrainState step_adam(const TrainState& state, const ModelSpec& spec,
                     const Batch& batch, const OptimizerConfig& cfg) {
  TrainState next = state;
  next.t = state.t + 1;
  const Vec g = mean_of(batch_grads(spec, state.w, batch));
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, next.t);
  const double corr2 = 1.0 - std::pow(b2, next.t);
  const double lr = cfg.lr_at(next.t);
  for (std::size_t j = 0; j < next.w.size(); ++j) {
    next.adam_m[j] = b1 * next.adam_m[j] + (1.0 - b1) * g[j];
    next.adam_v[j] = b2 * next.adam_v[j] + (1.0 - b2) * g[j] * g[j];
    next.w[j] -= lr * (next.adam_m[j] / corr1) /
                 (std::sqrt(next.adam_v[j] / corr2) + cfg.adam_eps);
  }
  return next;
}

TrainState step_adas(const TrainState& state, const ModelSpec& spec,
                     const Batch& batch, const Batch* batch_public,
                     const OptimizerConfig& cfg) {
  TrainState next = state;
  next.t = state.t + 1;
  if (!state.side.is_fixed()) {
    if (batch_public == nullptr) {
      throw std::invalid_argument("step_adas: public batch required for Option 1 side info");
    }
    next.side = update_public(state.side, cfg.rule,
                              public_mean_grad(spec, state.w, *batch_public));
  }
  std::vector<Vec> grads = batch_grads(spec, state.w, batch);
  for (Vec& g : grads) g = precondition(g, next.side, cfg.rule);
  sgd_update(next.w, mean_of(grads), cfg.lr_at(next.t));
  return next;
}

namespace {

Batch sample_without_replacement(const Dataset& ds, int b, RngStream& rng) {
  const std::size_t n = ds.examples.size();
  if (b < 1 || static_cast<std::size_t>(b) > n) {
    throw std::invalid_argument("train: batch size out of range");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Batch batch;
  batch.reserve(b);
  for (int i = 0; i < b; ++i) {
    const std::size_t pick = i + rng.uniform_int(n - i);
    std::swap(idx[i], idx[pick]);
    batch.push_back(ds.examples[idx[i]]);
  }
  return batch;
}

Batch sample_public(const Dataset& pool, int b, RngStream& rng) {
  if (pool.examples.empty()) {
    throw std::invalid_argument("train: public pool is empty");
  }
  if (pool.examples.size() >= static_cast<std::size_t>(b)) {
    return sample_without_replacement(pool, b, rng);
  }
  // Pool smaller than the batch: uniform with replacement.
  Batch batch;
  batch.reserve(b);
  for (int i = 0; i < b; ++i) {
    batch.push_back(pool.examples[rng.uniform_int(pool.examples.size())]);
  }
  return batch;
}

}  // namespace

std::vector<TraceRow> train(const OptimizerConfig& cfg, const ModelSpec& spec,
                            const Dataset& train_set,
                            const Dataset* public_pool,
                            const Dataset* eval_set, const SideInfo& side0,
                            const TrainOptions& opts,
                            TrainState* final_state) {
  cfg.validate();
  if (opts.T < 1) throw std::invalid_argument("train: T must be >= 1");
  if (opts.eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");

  const int b = cfg.privacy ? cfg.privacy->batch_b
                            : std::min<int>(64, static_cast<int>(train_set.size()));

  RngStream init_rng(opts.seed, streams::kData);
  RngStream sample_rng(opts.seed, streams::kBatchSampling);
  RngStream noise_rng(opts.seed, streams::kNoise);
  RngStream public_rng(opts.seed, streams::kPublicSampling);

  TrainState state = make_train_state(spec, side0, init_rng);

  // Option 1 (public-data-driven side info) applies to adadps / adas when
  // the initial side info is not one of the fixed heuristics.
  const bool side_from_public =
      (cfg.method == Method::kAdaDps || cfg.method == Method::kAdas) &&
      !side0.is_fixed();
  const bool wants_public = cfg.needs_public_batch() || side_from_public;
  if (wants_public && public_pool == nullptr) {
    throw std::invalid_argument("train: method requires a public pool");
  }

  std::vector<TraceRow> trace;
  for (int t = 1; t <= opts.T; ++t) {
    const Batch batch = sample_without_replacement(train_set, b, sample_rng);
    Batch pub;
    if (wants_public) pub = sample_public(*public_pool, b, public_rng);

    switch (cfg.method) {
      case Method::kAdaDps:
        state = step_adadps(state, spec, batch, side_from_public ? &pub : nullptr,
                            cfg, noise_rng);
        break;
      case Method::kDpSgd:
        state = step_dpsgd(state, spec, batch, cfg, noise_rng);
        break;
      case Method::kDpAdam:
        state = step_dpadam(state, spec, batch, cfg, noise_rng);
        break;
      case Method::kDpRmsprop:
        state = step_dprmsprop(state, spec, batch, cfg, noise_rng);
        break;
      case Method::kDpRPub:
        state = step_dp_r_pub(state, spec, batch, pub, cfg, noise_rng);
        break;
      case Method::kDpAdamPub:
        state = step_dp_adam_pub(state, spec, batch, pub, cfg, noise_rng);
        break;
      case Method::kPdaDpmd:
        state = step_pda_dpmd(state, spec, batch, pub, cfg, noise_rng);
        break;
      case Method::kSgd:
        state = step_sgd(state, spec, batch, cfg);
        break;
      case Method::kAdam:
        state = step_adam(state, spec, batch, cfg);
        break;
      case Method::kAdas:
        state = step_adas(state, spec, batch, side_from_public ? &pub : nullptr, cfg);
        break;
    }

    if (t % opts.eval_every == 0 || t == opts.T) {
      TraceRow row;
      row.step = t;
      row.train_loss = evaluate(spec, state.w, train_set.examples).mean_loss;
      if (eval_set != nullptr && !eval_set->examples.empty()) {
        const Metrics m = evaluate(spec, state.w, eval_set->examples);
        row.eval_metric = m.accuracy ? *m.accuracy : m.mean_loss;
      }
      row.epsilon = state.spend.steps > 0 ? state.spend.epsilon : 0.0;
      trace.push_back(row);
    }
  }
  if (final_state != nullptr) *final_state = state;
  return trace;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kAdaDps: return "adadps";
    case Method::kDpSgd: return "dpsgd";
    case Method::kDpAdam: return "dpadam";
    case Method::kDpRmsprop: return "dprmsprop";
    case Method::kDpRPub: return "dp_r_pub";
    case Method::kDpAdamPub: return "dp_adam_pub";
    case Method::kPdaDpmd: return "pda_dpmd";
    case Method::kSgd: return "sgd";
    case Method::kAdam: return "adam";
    case Method::kAdas: return "adas";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::kAdaDps, Method::kDpSgd, Method::kDpAdam,
                   Method::kDpRmsprop, Method::kDpRPub, Method::kDpAdamPub,
                   Method::kPdaDpmd, Method::kSgd, Method::kAdam, Method::kAdas}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

}  // namespace adadps
