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

#include <limits>
#include <utility>
#include <vector>

#include "adadps/numerics.hpp"

namespace adadps {

// Sentinel: clipping disabled. Only valid together with sigma == 0, since
// unbounded sensitivity voids any privacy claim.
inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

// Parameters of the subsampled Gaussian mechanism. sigma == 0 means
// explicitly non-private mode (exact clipped means, no accounting).
struct PrivacyConfig {
  double sigma = 0.0;       // noise multiplier, unitless
  double clip_C = 1.0;      // L2 clipping threshold
  int batch_b = 1;          // examples (or devices) per step
  int dataset_n = 1;        // private examples (or devices) total
  double delta = 1e-5;      // target delta
  int micro_batch = 0;      // 0 = off; m > 0 averages groups of m gradients
                            // before clipping (the privacy unit becomes the
                            // micro-batch; the accountant then uses b/m)

  bool enabled() const { return sigma > 0.0; }
  void validate() const;
  // Sampling ratio seen by the accountant (micro-batching adjusts b).
  double sampling_ratio() const;
  int mechanism_batches() const;
};

struct PrivacySpend {
  double epsilon = 0.0;
  double delta = 0.0;
  int steps = 0;
  int best_order = 0;  // order minimizing the (epsilon, delta) conversion
  std::vector<std::pair<int, double>> rdp_orders;  // (alpha, per-step rdp)
};

// g scaled to L2 norm at most C: g * min(1, C / ||g||). C = kNoClip returns
// g unchanged.
Vec clip(const Vec& g, double C);

// (1/b) sum_i clip(g_i, C) + (1/b) N(0, sigma^2 C^2 I). With sigma == 0 the
// noise stream is not consumed and the exact clipped mean is returned.
// Micro-batching (cfg.micro_batch = m) averages consecutive groups of m
// gradients first and clips the group means.
Vec privatize_batch(const std::vector<Vec>& grads, const PrivacyConfig& cfg,
                    RngStream& rng);

// Per-order RDP of one step of the sampled Gaussian mechanism at sampling
// ratio q, via the integer-order binomial expansion
//   eps(alpha) = log( sum_{k=0..alpha} C(alpha,k) (1-q)^(alpha-k) q^k
//                     exp(k(k-1)/(2 sigma^2)) ) / (alpha - 1).
// q == 1 uses the unsubsampled closed form alpha / (2 sigma^2). The
// subsampling model is Poisson-style amplification, the standard
// approximation for uniform without-replacement batches.
std::vector<double> rdp_subsampled_gaussian(double q, double sigma,
                                            const std::vector<int>& orders);

// Integer orders 2..64 plus {128, 256}.
const std::vector<int>& default_rdp_orders();

// Linear RDP composition over `steps`, then conversion
//   eps = min_alpha [ steps * eps_rdp(alpha) + log(1/delta) / (alpha - 1) ].
PrivacySpend spend(const PrivacyConfig& cfg, int steps);

// Same conversion from precomputed per-step RDP values; the per-step
// values do not depend on the step count, so incremental ledgers reuse
// them instead of re-evaluating the mechanism sums.
PrivacySpend spend_from_rdp(const std::vector<std::pair<int, double>>& rdp,
                            double delta, int steps);

}  // namespace adadps
