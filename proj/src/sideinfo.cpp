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

#include "adadps/sideinfo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adadps/data.hpp"

namespace adadps {

namespace {

void check_positive(const Vec& A, const char* what) {
  for (double a : A) {
    if (!(a > 0.0)) {
      throw std::domain_error(std::string(what) + ": A must be > 0 everywhere");
    }
  }
}

// Rescale so that max_j A_j = 1; pins the scale so learning-rate grids
// transfer across datasets.
void max_normalize(Vec& A) {
  const double m = *std::max_element(A.begin(), A.end());
  for (double& a : A) a /= m;
}

}  // namespace

double PreconditionerRule::beta_at(int t) const {
  if (t < 1) throw std::invalid_argument("beta_at: t must be >= 1");
  if (beta_mode == BetaMode::kConstant) return beta;
  return 1.0 - gamma / t;
}

double PreconditionerRule::eps_at(int /*t*/) const {
  // Both modes keep eps^t constant; a constant floor already satisfies
  // sqrt(t+1) eps^{t+1} >= sqrt(t) eps^t.
  return eps;
}

void PreconditionerRule::validate() const {
  if (beta_mode == BetaMode::kConstant && !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("rule: constant beta must be in (0,1)");
  }
  if (beta_mode == BetaMode::kTheory && !(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("rule: gamma must be in (0,1]");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) && kind == PreconditionerKind::kAdam) {
    throw std::invalid_argument("rule: beta1 must be in (0,1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("rule: eps must be > 0");
}

SideInfo ones_sideinfo(std::size_t d) {
  SideInfo s;
  s.A.assign(d, 1.0);
  s.v.assign(d, 0.0);
  s.provenance = Provenance::kOnes;
  return s;
}

SideInfo oracle_sideinfo(const Vec& A_fixed) {
  check_positive(A_fixed, "oracle_sideinfo");
  SideInfo s;
  s.A = A_fixed;
  s.v.assign(A_fixed.size(), 0.0);
  s.provenance = Provenance::kOracle;
  return s;
}

SideInfo public_sideinfo(std::size_t d, PreconditionerKind kind) {
  SideInfo s;
  s.A.assign(d, 1.0);
  s.v.assign(d, 0.0);
  switch (kind) {
    case PreconditionerKind::kRmsprop:
      s.provenance = Provenance::kPublicRmsprop;
      break;
    case PreconditionerKind::kAdam:
      s.M.assign(d, 0.0);
      s.provenance = Provenance::kPublicAdam;
      break;
    case PreconditionerKind::kAdagrad:
      s.provenance = Provenance::kPublicAdagrad;
      break;
  }
  return s;
}

SideInfo update_public(const SideInfo& info, const PreconditionerRule& rule,
                       const Vec& public_grad) {
  rule.validate();
  check_same_length(info.A, public_grad, "update_public");
  SideInfo out = info;
  out.t = info.t + 1;
  const double beta = rule.beta_at(out.t);
  out.eps_t = rule.eps_at(out.t);
  const std::size_t d = public_grad.size();
  switch (rule.kind) {
    case PreconditionerKind::kRmsprop:
    case PreconditionerKind::kAdam:
      for (std::size_t j = 0; j < d; ++j) {
        out.v[j] = beta * out.v[j] + (1.0 - beta) * public_grad[j] * public_grad[j];
        out.A[j] = std::sqrt(out.v[j]) + out.eps_t;
      }
      out.provenance = rule.kind == PreconditionerKind::kAdam
                           ? Provenance::kPublicAdam
                           : Provenance::kPublicRmsprop;
      if (rule.kind == PreconditionerKind::kAdam) {
        if (out.M.empty()) out.M.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          out.M[j] = rule.beta1 * out.M[j] + (1.0 - rule.beta1) * public_grad[j];
        }
      }
      break;
    case PreconditionerKind::kAdagrad:
      // (A^t)^2 = (A^{t-1})^2 + g^2, accumulated in v; the eps floor keeps
      // A positive before the first nonzero gradient.
      for (std::size_t j = 0; j < d; ++j) {
        out.v[j] += public_grad[j] * public_grad[j];
        out.A[j] = std::sqrt(out.v[j]) + out.eps_t;
      }
      out.provenance = Provenance::kPublicAdagrad;
      break;
  }
  return out;
}

Vec precondition(const Vec& g, const SideInfo& info,
                 const PreconditionerRule& rule) {
  check_positive(info.A, "precondition");
  if (rule.kind == PreconditionerKind::kAdam && !info.M.empty()) {
    check_same_length(g, info.M, "precondition");
    const double beta = rule.beta_at(std::max(info.t, 1));
    Vec mixed(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      mixed[j] = beta * g[j] + (1.0 - beta) * info.M[j];
    }
    return elementwise_div(mixed, info.A);
  }
  return elementwise_div(g, info.A);
}

SideInfo frequency_sideinfo(const Dataset& dataset, double eps_A, bool invert) {
  if (dataset.examples.empty()) {
    throw std::invalid_argument("frequency_sideinfo: empty dataset");
  }
  if (!(eps_A > 0.0)) {
    throw std::invalid_argument("frequency_sideinfo: eps_A must be > 0");
  }
  Vec A(dataset.d_in, 0.0);
  for (const SparseExample& ex : dataset.examples) {
    for (std::size_t i = 0; i < ex.indices.size(); ++i) {
      A[ex.indices[i]] += std::abs(ex.values[i]);
    }
  }
  for (double& a : A) {
    a = a / dataset.examples.size() + eps_A;
    if (invert) a = 1.0 / a;
  }
  max_normalize(A);
  SideInfo s;
  s.A = std::move(A);
  s.v.assign(dataset.d_in, 0.0);
  s.provenance = Provenance::kFrequency;
  return s;
}

SideInfo tfidf_sideinfo(const Dataset& dataset, double eps_A) {
  if (dataset.examples.empty()) {
    throw std::invalid_argument("tfidf_sideinfo: empty dataset");
  }
  if (!(eps_A > 0.0)) {
    throw std::invalid_argument("tfidf_sideinfo: eps_A must be > 0");
  }
  const std::size_t n_docs = dataset.examples.size();
  std::vector<double> doc_freq(dataset.d_in, 0.0);
  for (const SparseExample& ex : dataset.examples) {
    for (std::uint32_t j : ex.indices) doc_freq[j] += 1.0;
  }
  Vec score(dataset.d_in, 0.0);
  for (const SparseExample& ex : dataset.examples) {
    double doc_len = 0.0;
    for (double v : ex.values) doc_len += v;
    if (doc_len <= 0.0) continue;
    for (std::size_t i = 0; i < ex.indices.size(); ++i) {
      const std::uint32_t j = ex.indices[i];
      const double tf = ex.values[i] / doc_len;
      const double idf = std::log(static_cast<double>(n_docs) / (1.0 + doc_freq[j]));
      score[j] += tf * idf;
    }
  }
  Vec A(dataset.d_in);
  for (int j = 0; j < dataset.d_in; ++j) {
    // idf goes negative for features present in (almost) every document;
    // the mean score is clamped at 0 so A stays strictly positive and such
    // features get the maximal A (smallest coordinate steps).
    const double s = std::max(0.0, score[j] / n_docs);
    A[j] = 1.0 / (s + eps_A);
  }
  max_normalize(A);
  SideInfo s;
  s.A = std::move(A);
  s.v.assign(dataset.d_in, 0.0);
  s.provenance = Provenance::kTfidf;
  return s;
}

void save_sideinfo_csv(const SideInfo& info, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sideinfo_csv: cannot open " + path);
  out << "feature_id,A\n";
  out.precision(17);
  for (std::size_t j = 0; j < info.A.size(); ++j) {
    out << j << "," << info.A[j] << "\n";
  }
}

SideInfo load_sideinfo_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sideinfo_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "feature_id,A") {
    throw std::runtime_error("load_sideinfo_csv: bad header in " + path);
  }
  Vec A;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("load_sideinfo_csv: malformed row in " + path);
    }
    A.push_back(std::stod(line.substr(comma + 1)));
  }
  return oracle_sideinfo(A);
}

}  // namespace adadps
