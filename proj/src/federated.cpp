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

#include "adadps/federated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adadps {

void FederatedNetwork::validate() const {
  if (devices.empty()) throw std::invalid_argument("network: no devices");
  if (weights.size() != devices.size()) {
    throw std::invalid_argument("network: weights length mismatch");
  }
  double sum = 0.0;
  for (double p : weights) sum += p;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("network: weights must sum to 1");
  }
  for (const Dataset& d : devices) {
    if (d.examples.empty()) {
      throw std::invalid_argument("network: empty device dataset");
    }
  }
}

FederatedNetwork FederatedNetwork::uniform(std::vector<Dataset> devices) {
  FederatedNetwork net;
  net.weights.assign(devices.size(), 1.0 / static_cast<double>(devices.size()));
  net.devices = std::move(devices);
  return net;
}

void FedConfig::validate(int n_devices) const {
  if (rounds < 1) throw std::invalid_argument("fed: rounds must be >= 1");
  if (devices_per_round < 1 || devices_per_round > n_devices) {
    throw std::invalid_argument("fed: need 1 <= devices_per_round <= n_devices");
  }
  if (local_steps < 1) throw std::invalid_argument("fed: local_steps must be >= 1");
  if (!(local_lr >= 0.0)) throw std::invalid_argument("fed: local_lr must be >= 0");
  if (!(clip_C > 0.0)) throw std::invalid_argument("fed: clip_C must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("fed: sigma must be >= 0");
  if (!(server_momentum >= 0.0 && server_momentum < 1.0)) {
    throw std::invalid_argument("fed: server_momentum must be in [0,1)");
  }
}

FedState make_fed_state(const ModelSpec& spec, RngStream& init_rng) {
  FedState s;
  s.w = init_params(spec, init_rng);
  s.momentum.assign(s.w.size(), 0.0);
  s.adam_m.assign(s.w.size(), 0.0);
  s.adam_v.assign(s.w.size(), 0.0);
  return s;
}

namespace {

Batch local_batch_of(const Dataset& device, int batch_size, RngStream& rng) {
  const std::size_t n = device.examples.size();
  if (batch_size <= 0 || static_cast<std::size_t>(batch_size) >= n) {
    return device.examples;  // full local data
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Batch batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const std::size_t pick = i + rng.uniform_int(n - i);
    std::swap(idx[i], idx[pick]);
    batch.push_back(device.examples[idx[i]]);
  }
  return batch;
}

Vec preconditioned_mean_grad(const ModelSpec& spec, const Vec& w,
                             const Batch& batch, const SideInfo& side) {
  std::vector<Vec> grads = batch_grads(spec, w, batch);
  const std::size_t d = w.size();
  Vec out(d, 0.0);
  for (Vec& g : grads) {
    g = elementwise_div(g, side.A);
    for (std::size_t j = 0; j < d; ++j) out[j] += g[j];
  }
  for (std::size_t j = 0; j < d; ++j) out[j] /= static_cast<double>(grads.size());
  return out;
}

}  // namespace

Vec local_update(const Dataset& device, const Vec& w_global,
                 const ModelSpec& spec, const FedConfig& cfg,
                 const SideInfo& side, RngStream& rng) {
  if (device.examples.empty()) {
    throw std::invalid_argument("local_update: empty device data");
  }
  Vec w = w_global;
  Vec delta(w.size(), 0.0);
  for (int s = 0; s < cfg.local_steps; ++s) {
    const Batch batch = local_batch_of(device, cfg.local_batch, rng);
    const Vec g = preconditioned_mean_grad(spec, w, batch, side);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double inc = -(cfg.local_lr * g[j]);
      w[j] += inc;
      delta[j] += inc;
    }
  }
  Vec out = clip(delta, cfg.clip_C);
  if (cfg.sigma > 0.0) {
    const double scale = cfg.sigma * cfg.clip_C;  // full variance per device
    for (double& x : out) x += scale * rng.normal();
  }
  return out;
}

FedState fed_round(const FederatedNetwork& network, const FedState& state,
                   const ModelSpec& spec, const FedConfig& cfg,
                   const SideInfo& side, RngStream& sample_rng,
                   RngStream& device_rng_root) {
  network.validate();
  cfg.validate(network.n_devices());
  const int n = network.n_devices();
  const int b = cfg.devices_per_round;

  // Uniform sample without replacement; processed in device-index order.
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < b; ++i) {
    const int pick = i + static_cast<int>(sample_rng.uniform_int(n - i));
    std::swap(ids[i], ids[pick]);
  }
  std::vector<int> selected(ids.begin(), ids.begin() + b);
  std::sort(selected.begin(), selected.end());

  FedState next = state;
  next.round = state.round + 1;
  const SideInfo ones = ones_sideinfo(state.w.size());
  const SideInfo& dev_side = cfg.method == FedMethod::kAdaDpsFl ? side : ones;

  const std::size_t d = state.w.size();
  Vec agg(d, 0.0);
  for (int id : selected) {
    RngStream dev_rng = device_rng_root.split(
        (static_cast<std::uint64_t>(next.round) << 32) ^ static_cast<std::uint64_t>(id));
    const Vec delta =
        local_update(network.devices[id], state.w, spec, cfg, dev_side, dev_rng);
    for (std::size_t j = 0; j < d; ++j) agg[j] += delta[j];
  }
  for (std::size_t j = 0; j < d; ++j) agg[j] /= static_cast<double>(b);

  switch (cfg.method) {
    case FedMethod::kDpFedAvg:
    case FedMethod::kAdaDpsFl:
      if (cfg.server_momentum > 0.0) {
        for (std::size_t j = 0; j < d; ++j) {
          next.momentum[j] = cfg.server_momentum * next.momentum[j] + agg[j];
          next.w[j] += next.momentum[j];
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) next.w[j] += agg[j];
      }
      break;
    case FedMethod::kDpFedAdam: {
      // Server-side Adam on the averaged update (server learning rate 1).
      const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
      const double corr1 = 1.0 - std::pow(b1, next.round);
      const double corr2 = 1.0 - std::pow(b2, next.round);
      for (std::size_t j = 0; j < d; ++j) {
        next.adam_m[j] = b1 * next.adam_m[j] + (1.0 - b1) * agg[j];
        next.adam_v[j] = b2 * next.adam_v[j] + (1.0 - b2) * agg[j] * agg[j];
        next.w[j] += (next.adam_m[j] / corr1) /
                     (std::sqrt(next.adam_v[j] / corr2) + cfg.adam_eps);
      }
      break;
    }
  }
  return next;
}

PrivacySpend fed_spend(const FedConfig& cfg, int n_devices, int rounds) {
  cfg.validate(n_devices);
  if (rounds < 1) throw std::invalid_argument("fed_spend: rounds must be >= 1");
  PrivacyConfig pc;
  pc.sigma = cfg.sigma;
  pc.clip_C = cfg.clip_C;
  pc.batch_b = cfg.devices_per_round;
  pc.dataset_n = n_devices;
  pc.delta = cfg.delta;
  return spend(pc, rounds);
}

std::vector<TraceRow> run_federated(const FederatedNetwork& network,
                                    const ModelSpec& spec,
                                    const FedConfig& cfg, const SideInfo& side,
                                    const Dataset* eval_set,
                                    std::uint64_t seed,
                                    FedState* final_state) {
  network.validate();
  cfg.validate(network.n_devices());
  RngStream init_rng(seed, streams::kData);
  RngStream sample_rng(seed, streams::kBatchSampling);
  RngStream device_rng_root(seed, streams::kNoise);

  FedState state = make_fed_state(spec, init_rng);

  std::vector<SparseExample> all;
  for (const Dataset& dev : network.devices) {
    all.insert(all.end(), dev.examples.begin(), dev.examples.end());
  }

  std::vector<TraceRow> trace;
  for (int r = 1; r <= cfg.rounds; ++r) {
    state = fed_round(network, state, spec, cfg, side, sample_rng, device_rng_root);
    TraceRow row;
    row.step = r;
    row.train_loss = evaluate(spec, state.w, all).mean_loss;
    if (eval_set != nullptr && !eval_set->examples.empty()) {
      const Metrics m = evaluate(spec, state.w, eval_set->examples);
      row.eval_metric = m.accuracy ? *m.accuracy : m.mean_loss;
    }
    row.epsilon = cfg.sigma > 0.0 ? fed_spend(cfg, network.n_devices(), r).epsilon : 0.0;
    trace.push_back(row);
  }
  if (final_state != nullptr) *final_state = state;
  return trace;
}

std::string fed_method_name(FedMethod m) {
  switch (m) {
    case FedMethod::kDpFedAvg: return "dp_fedavg";
    case FedMethod::kDpFedAdam: return "dp_fedadam";
    case FedMethod::kAdaDpsFl: return "adadps_fl";
  }
  return "unknown";
}

FedMethod fed_method_from_name(const std::string& name) {
  for (FedMethod m : {FedMethod::kDpFedAvg, FedMethod::kDpFedAdam, FedMethod::kAdaDpsFl}) {
    if (fed_method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown federated method '" + name + "'");
}

}  // namespace adadps
