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

#include "adadps/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adadps {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Softmax probabilities from logits, in place.
void softmax_inplace(Vec& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

int argmax_lowest(const Vec& v) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(v.size()); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best;
}

struct MlpLayout {
  std::size_t w1, b1, w2, b2, total;
};

MlpLayout mlp_layout(const ModelSpec& s) {
  MlpLayout l;
  l.w1 = 0;
  l.b1 = static_cast<std::size_t>(s.hidden) * s.d_in;
  l.w2 = l.b1 + s.hidden;
  l.b2 = l.w2 + static_cast<std::size_t>(s.K) * s.hidden;
  l.total = l.b2 + s.K;
  return l;
}

double activate(Activation a, double z) {
  return a == Activation::kRelu ? std::max(0.0, z) : std::tanh(z);
}

double activate_deriv(Activation a, double z) {
  if (a == Activation::kRelu) return z > 0.0 ? 1.0 : 0.0;
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

// Forward pass; fills hidden pre-activations and output logits.
void mlp_forward(const ModelSpec& s, const Vec& w, const SparseExample& ex,
                 Vec& h_pre, Vec& out) {
  const MlpLayout l = mlp_layout(s);
  h_pre.assign(s.hidden, 0.0);
  for (std::size_t i = 0; i < ex.indices.size(); ++i) {
    const std::uint32_t j = ex.indices[i];
    const double x = ex.values[i];
    for (int h = 0; h < s.hidden; ++h) {
      h_pre[h] += w[l.w1 + static_cast<std::size_t>(h) * s.d_in + j] * x;
    }
  }
  for (int h = 0; h < s.hidden; ++h) h_pre[h] += w[l.b1 + h];
  out.assign(s.K, 0.0);
  for (int k = 0; k < s.K; ++k) {
    double acc = w[l.b2 + k];
    const std::size_t row = l.w2 + static_cast<std::size_t>(k) * s.hidden;
    for (int h = 0; h < s.hidden; ++h) {
      acc += w[row + h] * activate(s.activation, h_pre[h]);
    }
    out[k] = acc;
  }
}

void check_dims(const ModelSpec& spec, const Vec& w) {
  spec.validate();
  if (w.size() != spec.param_count()) {
    throw std::invalid_argument("models: parameter vector length mismatch");
  }
}

}  // namespace

void SparseExample::validate(std::uint32_t d_in) const {
  if (indices.size() != values.size()) {
    throw std::invalid_argument("example: indices/values length mismatch");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= d_in) {
      throw std::invalid_argument("example: feature index out of range");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("example: indices not strictly increasing");
    }
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("example: non-finite feature value");
    }
  }
}

double SparseExample::dot(const Vec& w, std::size_t offset) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    acc += w[offset + indices[i]] * values[i];
  }
  return acc;
}

std::size_t ModelSpec::param_count() const {
  switch (kind) {
    case ModelKind::kLinReg:
      return static_cast<std::size_t>(d_in);
    case ModelKind::kLogReg:
      return static_cast<std::size_t>(d_in);
    case ModelKind::kSoftmax:
      return static_cast<std::size_t>(d_in) * K;
    case ModelKind::kMlp:
      return mlp_layout(*this).total;
  }
  return 0;
}

void ModelSpec::validate() const {
  if (d_in < 1) throw std::invalid_argument("model: d_in must be >= 1");
  if (kind == ModelKind::kSoftmax && K < 2) {
    throw std::invalid_argument("model: softmax needs K >= 2");
  }
  if (kind == ModelKind::kMlp) {
    if (hidden < 1) throw std::invalid_argument("model: mlp needs hidden >= 1");
    if (K < 1) throw std::invalid_argument("model: mlp needs K >= 1");
  }
}

double loss(const ModelSpec& spec, const Vec& w, const SparseExample& ex) {
  check_dims(spec, w);
  switch (spec.kind) {
    case ModelKind::kLinReg: {
      const double r = ex.dot(w) - ex.y;
      return 0.5 * r * r;
    }
    case ModelKind::kLogReg: {
      const double z = ex.dot(w);
      // -y log p - (1-y) log(1-p), stable form
      return softplus(z) - ex.y * z;
    }
    case ModelKind::kSoftmax: {
      Vec logits(spec.K);
      for (int k = 0; k < spec.K; ++k) {
        logits[k] = ex.dot(w, static_cast<std::size_t>(k) * spec.d_in);
      }
      const double m = *std::max_element(logits.begin(), logits.end());
      double lse = 0.0;
      for (double z : logits) lse += std::exp(z - m);
      return m + std::log(lse) - logits[ex.cls];
    }
    case ModelKind::kMlp: {
      Vec h_pre, out;
      mlp_forward(spec, w, ex, h_pre, out);
      if (spec.autoencode) {
        if (static_cast<int>(ex.target.size()) != spec.K) {
          throw std::invalid_argument("mlp: target length != K");
        }
        double s = 0.0;
        for (int k = 0; k < spec.K; ++k) {
          const double r = out[k] - ex.target[k];
          s += r * r;
        }
        return 0.5 * s;
      }
      const double m = *std::max_element(out.begin(), out.end());
      double lse = 0.0;
      for (double z : out) lse += std::exp(z - m);
      return m + std::log(lse) - out[ex.cls];
    }
  }
  throw std::logic_error("loss: unknown model kind");
}

Vec per_example_grad(const ModelSpec& spec, const Vec& w,
                     const SparseExample& ex) {
  check_dims(spec, w);
  Vec g(w.size(), 0.0);
  switch (spec.kind) {
    case ModelKind::kLinReg: {
      const double c = ex.dot(w) - ex.y;  // residual
      for (std::size_t i = 0; i < ex.indices.size(); ++i) {
        g[ex.indices[i]] = c * ex.values[i];
      }
      return g;
    }
    case ModelKind::kLogReg: {
      const double c = sigmoid(ex.dot(w)) - ex.y;
      for (std::size_t i = 0; i < ex.indices.size(); ++i) {
        g[ex.indices[i]] = c * ex.values[i];
      }
      return g;
    }
    case ModelKind::kSoftmax: {
      Vec p(spec.K);
      for (int k = 0; k < spec.K; ++k) {
        p[k] = ex.dot(w, static_cast<std::size_t>(k) * spec.d_in);
      }
      softmax_inplace(p);
      for (int k = 0; k < spec.K; ++k) {
        const double c = p[k] - (k == ex.cls ? 1.0 : 0.0);
        const std::size_t off = static_cast<std::size_t>(k) * spec.d_in;
        for (std::size_t i = 0; i < ex.indices.size(); ++i) {
          g[off + ex.indices[i]] = c * ex.values[i];
        }
      }
      return g;
    }
    case ModelKind::kMlp: {
      const MlpLayout l = mlp_layout(spec);
      Vec h_pre, out;
      mlp_forward(spec, w, ex, h_pre, out);
      Vec d_out(spec.K);
      if (spec.autoencode) {
        if (static_cast<int>(ex.target.size()) != spec.K) {
          throw std::invalid_argument("mlp: target length != K");
        }
        for (int k = 0; k < spec.K; ++k) d_out[k] = out[k] - ex.target[k];
      } else {
        Vec p = out;
        softmax_inplace(p);
        for (int k = 0; k < spec.K; ++k) {
          d_out[k] = p[k] - (k == ex.cls ? 1.0 : 0.0);
        }
      }
      Vec h_act(spec.hidden), d_hidden(spec.hidden, 0.0);
      for (int h = 0; h < spec.hidden; ++h) {
        h_act[h] = activate(spec.activation, h_pre[h]);
      }
      for (int k = 0; k < spec.K; ++k) {
        const std::size_t row = l.w2 + static_cast<std::size_t>(k) * spec.hidden;
        for (int h = 0; h < spec.hidden; ++h) {
          g[row + h] = d_out[k] * h_act[h];
          d_hidden[h] += w[row + h] * d_out[k];
        }
        g[l.b2 + k] = d_out[k];
      }
      for (int h = 0; h < spec.hidden; ++h) {
        const double d_pre = d_hidden[h] * activate_deriv(spec.activation, h_pre[h]);
        const std::size_t row = l.w1 + static_cast<std::size_t>(h) * spec.d_in;
        for (std::size_t i = 0; i < ex.indices.size(); ++i) {
          g[row + ex.indices[i]] = d_pre * ex.values[i];
        }
        g[l.b1 + h] = d_pre;
      }
      return g;
    }
  }
  throw std::logic_error("per_example_grad: unknown model kind");
}

std::vector<Vec> batch_grads(const ModelSpec& spec, const Vec& w,
                             const std::vector<SparseExample>& batch) {
  if (batch.empty()) throw std::invalid_argument("batch_grads: empty batch");
  std::vector<Vec> out;
  out.reserve(batch.size());
  for (const SparseExample& ex : batch) {
    out.push_back(per_example_grad(spec, w, ex));
  }
  return out;
}

Metrics evaluate(const ModelSpec& spec, const Vec& w,
                 const std::vector<SparseExample>& examples) {
  if (examples.empty()) throw std::invalid_argument("evaluate: empty dataset");
  check_dims(spec, w);
  Metrics m;
  double loss_sum = 0.0;
  long correct = 0;
  bool classify = spec.kind == ModelKind::kLogReg ||
                  spec.kind == ModelKind::kSoftmax ||
                  (spec.kind == ModelKind::kMlp && !spec.autoencode);
  for (const SparseExample& ex : examples) {
    loss_sum += loss(spec, w, ex);
    if (!classify) continue;
    int pred = 0;
    if (spec.kind == ModelKind::kLogReg) {
      pred = ex.dot(w) > 0.0 ? 1 : 0;  // tie at p = 0.5 goes to class 0
      correct += (pred == static_cast<int>(ex.y));
      continue;
    }
    Vec logits;
    if (spec.kind == ModelKind::kSoftmax) {
      logits.resize(spec.K);
      for (int k = 0; k < spec.K; ++k) {
        logits[k] = ex.dot(w, static_cast<std::size_t>(k) * spec.d_in);
      }
    } else {
      Vec h_pre;
      mlp_forward(spec, w, ex, h_pre, logits);
    }
    pred = argmax_lowest(logits);
    correct += (pred == ex.cls);
  }
  m.mean_loss = loss_sum / examples.size();
  if (classify) {
    m.accuracy = static_cast<double>(correct) / examples.size();
  }
  return m;
}

Vec init_params(const ModelSpec& spec, RngStream& rng) {
  spec.validate();
  Vec w(spec.param_count(), 0.0);
  if (spec.kind != ModelKind::kMlp) return w;
  const MlpLayout l = mlp_layout(spec);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(spec.d_in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
  for (std::size_t i = l.w1; i < l.b1; ++i) w[i] = (2.0 * rng.uniform() - 1.0) * s1;
  for (std::size_t i = l.w2; i < l.b2; ++i) w[i] = (2.0 * rng.uniform() - 1.0) * s2;
  return w;
}

}  // namespace adadps
