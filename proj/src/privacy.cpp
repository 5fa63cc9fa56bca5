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

#include "adadps/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adadps {

namespace {

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

void PrivacyConfig::validate() const {
  if (sigma < 0.0) throw std::invalid_argument("privacy: sigma must be >= 0");
  if (!(clip_C > 0.0)) throw std::invalid_argument("privacy: clip_C must be > 0");
  if (batch_b < 1 || batch_b > dataset_n) {
    throw std::invalid_argument("privacy: need 1 <= batch_b <= dataset_n");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("privacy: need 0 < delta < 1");
  }
  if (micro_batch < 0 || (micro_batch > 0 && batch_b % micro_batch != 0)) {
    throw std::invalid_argument("privacy: micro_batch must divide batch_b");
  }
  if (std::isinf(clip_C) && sigma > 0.0) {
    throw std::invalid_argument(
        "privacy: clipping disabled (C = inf) requires sigma = 0");
  }
}

int PrivacyConfig::mechanism_batches() const {
  return micro_batch > 0 ? batch_b / micro_batch : batch_b;
}

double PrivacyConfig::sampling_ratio() const {
  return static_cast<double>(batch_b) / static_cast<double>(dataset_n);
}

Vec clip(const Vec& g, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("clip: C must be > 0");
  if (std::isinf(C)) return g;
  const double norm = l2_norm(g);
  if (norm <= C) return g;
  const double scale = C / norm;
  Vec out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = g[j] * scale;
  return out;
}

Vec privatize_batch(const std::vector<Vec>& grads, const PrivacyConfig& cfg,
                    RngStream& rng) {
  cfg.validate();
  if (static_cast<int>(grads.size()) != cfg.batch_b) {
    throw std::invalid_argument("privatize_batch: |grads| != cfg.batch_b");
  }
  const std::size_t d = grads.front().size();
  for (const Vec& g : grads) {
    if (g.size() != d) {
      throw std::invalid_argument("privatize_batch: ragged gradient list");
    }
  }

  // Units entering the mechanism: raw gradients, or micro-batch means.
  std::vector<Vec> units;
  if (cfg.micro_batch > 0) {
    const int m = cfg.micro_batch;
    for (int start = 0; start < cfg.batch_b; start += m) {
      Vec mean(d, 0.0);
      for (int i = start; i < start + m; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += grads[i][j];
      }
      for (std::size_t j = 0; j < d; ++j) mean[j] /= m;
      units.push_back(std::move(mean));
    }
  } else {
    units = grads;
  }

  const double b = static_cast<double>(units.size());
  Vec out(d, 0.0);
  for (const Vec& g : units) {
    Vec c = clip(g, cfg.clip_C);
    for (std::size_t j = 0; j < d; ++j) out[j] += c[j];
  }
  for (std::size_t j = 0; j < d; ++j) out[j] /= b;
  if (cfg.sigma > 0.0) {
    const double scale = cfg.sigma * cfg.clip_C / b;
    for (std::size_t j = 0; j < d; ++j) out[j] += scale * rng.normal();
  }
  return out;
}

std::vector<double> rdp_subsampled_gaussian(double q, double sigma,
                                            const std::vector<int>& orders) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("rdp: need 0 < q <= 1");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("rdp: sigma must be > 0");
  std::vector<double> out;
  out.reserve(orders.size());
  for (int alpha : orders) {
    if (alpha < 2) throw std::invalid_argument("rdp: orders must be >= 2");
    if (q == 1.0) {
      out.push_back(alpha / (2.0 * sigma * sigma));
      continue;
    }
    // log-sum-exp over k of
    //   log C(alpha,k) + (alpha-k) log(1-q) + k log q + k(k-1)/(2 sigma^2)
    const double log_q = std::log(q);
    const double log_1mq = std::log1p(-q);
    double log_binom = 0.0;  // log C(alpha, 0)
    double acc = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= alpha; ++k) {
      const double term = log_binom + k * log_q + (alpha - k) * log_1mq +
                          k * (k - 1) / (2.0 * sigma * sigma);
      acc = log_add(acc, term);
      // C(alpha, k+1) = C(alpha, k) * (alpha - k) / (k + 1)
      log_binom += std::log(static_cast<double>(alpha - k)) -
                   std::log(static_cast<double>(k + 1));
    }
    out.push_back(std::max(0.0, acc / (alpha - 1)));
  }
  return out;
}

const std::vector<int>& default_rdp_orders() {
  static const std::vector<int> orders = [] {
    std::vector<int> o;
    for (int a = 2; a <= 64; ++a) o.push_back(a);
    // Powers of two beyond 64: the (eps, delta) conversion carries an
    // additive log(1/delta) / (alpha - 1) term, so very quiet mechanisms
    // (huge sigma) need large orders for epsilon to approach 0.
    for (int a = 128; a <= 65536; a *= 2) o.push_back(a);
    return o;
  }();
  return orders;
}

PrivacySpend spend(const PrivacyConfig& cfg, int steps) {
  cfg.validate();
  if (steps < 1) throw std::invalid_argument("spend: steps must be >= 1");
  if (!cfg.enabled()) {
    throw std::invalid_argument("spend: sigma = 0 carries no privacy ledger");
  }
  // With micro-batching the privacy unit is the micro-batch; counting both
  // batch and dataset in micro-batches leaves the ratio at b/n.
  const double q = cfg.sampling_ratio();
  const std::vector<int>& orders = default_rdp_orders();
  const std::vector<double> per_step =
      rdp_subsampled_gaussian(q, cfg.sigma, orders);

  std::vector<std::pair<int, double>> rdp;
  rdp.reserve(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    rdp.emplace_back(orders[i], per_step[i]);
  }
  return spend_from_rdp(rdp, cfg.delta, steps);
}

PrivacySpend spend_from_rdp(const std::vector<std::pair<int, double>>& rdp,
                            double delta, int steps) {
  if (rdp.empty()) throw std::invalid_argument("spend: no rdp orders");
  if (steps < 1) throw std::invalid_argument("spend: steps must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("spend: need 0 < delta < 1");
  }
  PrivacySpend s;
  s.delta = delta;
  s.steps = steps;
  s.rdp_orders = rdp;
  s.epsilon = std::numeric_limits<double>::infinity();
  const double log_inv_delta = std::log(1.0 / delta);
  for (const auto& [alpha, per_step] : rdp) {
    const double eps = per_step * steps + log_inv_delta / (alpha - 1);
    if (eps < s.epsilon) {
      s.epsilon = eps;
      s.best_order = alpha;
    }
  }
  if (!std::isfinite(s.epsilon)) {
    throw std::runtime_error("spend: no valid order produced a finite epsilon");
  }
  return s;
}

}  // namespace adadps
