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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adadps/numerics.hpp"

namespace adadps {

// One sparse-feature example. The label in use depends on the task:
// y for regression and binary classification (0/1), cls for multiclass,
// target for autoencoding. Indices are strictly increasing.
struct SparseExample {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  double y = 0.0;
  int cls = 0;
  Vec target;

  void validate(std::uint32_t d_in) const;
  double dot(const Vec& w, std::size_t offset = 0) const;
};

enum class ModelKind { kLinReg, kLogReg, kSoftmax, kMlp };
enum class Activation { kRelu, kTanh };

// Parameter layout:
//   linreg / logreg: w[0..d_in)                         (no bias)
//   softmax:         class-major, w[k*d_in + j], k < K  (no bias)
//   mlp:             [W1 (hidden x d_in, row-major), b1 (hidden),
//                     W2 (K x hidden, row-major),    b2 (K)]
struct ModelSpec {
  ModelKind kind = ModelKind::kLinReg;
  int d_in = 1;
  int K = 1;                               // classes / outputs
  int hidden = 0;                          // mlp only
  Activation activation = Activation::kTanh;  // mlp only
  bool autoencode = false;                 // mlp: MSE against ex.target

  std::size_t param_count() const;
  void validate() const;
};

struct Metrics {
  double mean_loss = 0.0;
  std::optional<double> accuracy;
};

// Linreg: 0.5 (w.x - y)^2. Logreg: binary cross-entropy with sigmoid.
// Softmax: cross-entropy. Mlp: softmax cross-entropy, or
// 0.5 ||out - target||^2 when autoencoding.
double loss(const ModelSpec& spec, const Vec& w, const SparseExample& ex);

// Exact analytic gradient of loss w.r.t. w. For the GLMs this is
// c(x; w) * x, supported only on the example's nonzero features.
Vec per_example_grad(const ModelSpec& spec, const Vec& w,
                     const SparseExample& ex);

// Per-example gradients in input order.
std::vector<Vec> batch_grads(const ModelSpec& spec, const Vec& w,
                             const std::vector<SparseExample>& batch);

// Mean loss over the examples; argmax accuracy (lowest-index tie-break)
// for classification tasks.
Metrics evaluate(const ModelSpec& spec, const Vec& w,
                 const std::vector<SparseExample>& examples);

// Zeros for the GLMs; uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per
// layer for the mlp, drawn from the given stream.
Vec init_params(const ModelSpec& spec, RngStream& rng);

}  // namespace adadps
