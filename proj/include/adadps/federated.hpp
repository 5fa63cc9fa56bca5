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

#include <string>
#include <vector>

#include "adadps/data.hpp"
#include "adadps/optimizers.hpp"
#include "adadps/privacy.hpp"
#include "adadps/sideinfo.hpp"

namespace adadps {

struct FederatedNetwork {
  std::vector<Dataset> devices;
  Vec weights;  // p_i, sums to 1; defaults to 1/n

  int n_devices() const { return static_cast<int>(devices.size()); }
  void validate() const;
  static FederatedNetwork uniform(std::vector<Dataset> devices);
};

enum class FedMethod { kDpFedAvg, kDpFedAdam, kAdaDpsFl };

struct FedConfig {
  int rounds = 1;
  int devices_per_round = 1;
  int local_steps = 1;
  int local_batch = 0;  // 0 = full local data each local step
  double local_lr = 0.1;
  double clip_C = 1.0;
  double sigma = 0.0;
  double server_momentum = 0.0;  // 0 disables; 0.9 is the usual choice
  double delta = 1e-3;
  FedMethod method = FedMethod::kDpFedAvg;
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;

  void validate(int n_devices) const;
};

struct FedState {
  Vec w;
  Vec momentum;        // server momentum buffer
  Vec adam_m, adam_v;  // dp_fedadam server state
  int round = 0;
};

FedState make_fed_state(const ModelSpec& spec, RngStream& init_rng);

// s local steps of w <- w - eta * (mean preconditioned gradient), then
// Delta clipped to C and per-device noise N(0, sigma^2 C^2) at full
// variance (the 1/b enters at aggregation). Delta is accumulated as the
// exact sum of local increments.
Vec local_update(const Dataset& device, const Vec& w_global,
                 const ModelSpec& spec, const FedConfig& cfg,
                 const SideInfo& side, RngStream& rng);

// One communication round: uniform device sample without replacement,
// aggregation of noised updates in device-index order, server momentum
// (server learning rate fixed at 1).
FedState fed_round(const FederatedNetwork& network, const FedState& state,
                   const ModelSpec& spec, const FedConfig& cfg,
                   const SideInfo& side, RngStream& sample_rng,
                   RngStream& device_rng_root);

// User-level accounting: sampling ratio devices_per_round / n_devices.
PrivacySpend fed_spend(const FedConfig& cfg, int n_devices, int rounds);

// Full simulation; one trace row per round (train loss over all device
// data, eval metric on eval_set, epsilon so far).
std::vector<TraceRow> run_federated(const FederatedNetwork& network,
                                    const ModelSpec& spec,
                                    const FedConfig& cfg, const SideInfo& side,
                                    const Dataset* eval_set,
                                    std::uint64_t seed,
                                    FedState* final_state = nullptr);

std::string fed_method_name(FedMethod m);
FedMethod fed_method_from_name(const std::string& name);

}  // namespace adadps
