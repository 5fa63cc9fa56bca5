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

#include "adadps/models.hpp"
#include "adadps/numerics.hpp"

namespace adadps {

struct Dataset;  // data.hpp

enum class Provenance {
  kOnes,
  kOracle,
  kPublicRmsprop,
  kPublicAdam,
  kPublicAdagrad,
  kFrequency,
  kTfidf,
};

enum class PreconditionerKind { kRmsprop, kAdam, kAdagrad };
enum class BetaMode { kConstant, kTheory };
enum class EpsMode { kConstant, kTheorySchedule };

// How the per-step second-moment average and the small additive floor are
// scheduled. Theory mode uses beta^t = 1 - gamma/t, which sits inside the
// [1 - 1/t, 1 - gamma/t] band required for the sqrt(t)-monotone bound; the
// theory eps schedule keeps eps^t constant, which satisfies
// sqrt(t+1) eps^{t+1} >= sqrt(t) eps^t.
struct PreconditionerRule {
  PreconditionerKind kind = PreconditionerKind::kRmsprop;
  BetaMode beta_mode = BetaMode::kConstant;
  double beta = 0.999;     // constant mode second-moment average
  double gamma = 1.0;      // theory mode, in (0, 1]
  EpsMode eps_mode = EpsMode::kConstant;
  double eps = 1e-8;       // eps^t floor
  double beta1 = 0.9;      // Adam momentum buffer average

  double beta_at(int t) const;  // t >= 1
  double eps_at(int t) const;
  void validate() const;
};

// Preconditioner state A^t (always strictly positive) plus the second
// moment accumulator v^t and optional momentum buffer M^t.
struct SideInfo {
  Vec A;
  Vec M;        // empty unless Adam
  Vec v;        // second-moment accumulator
  double eps_t = 1e-8;
  int t = 0;
  Provenance provenance = Provenance::kOnes;

  bool is_fixed() const {
    return provenance == Provenance::kOnes || provenance == Provenance::kOracle ||
           provenance == Provenance::kFrequency || provenance == Provenance::kTfidf;
  }
};

SideInfo ones_sideinfo(std::size_t d);

// Constant A^t = A_fixed for all t; every entry must be > 0.
SideInfo oracle_sideinfo(const Vec& A_fixed);

// Fresh state for a public-data preconditioner (A starts at 1, v at 0,
// M allocated for Adam); update_public evolves it each step.
SideInfo public_sideinfo(std::size_t d, PreconditionerKind kind);

// One public-batch update of (v, A, M) under the rule. Rmsprop:
// v^t = beta^t v^{t-1} + (1-beta^t) g^2, A^t = sqrt(v^t) + eps^t.
// Adagrad: (A^t)^2 = (A^{t-1})^2 + g^2. Adam: rmsprop plus the M buffer.
SideInfo update_public(const SideInfo& info, const PreconditionerRule& rule,
                       const Vec& public_grad);

// Rmsprop/adagrad: g / A^t. Adam: (beta^t g + (1-beta^t) M^t) / A^t.
Vec precondition(const Vec& g, const SideInfo& info,
                 const PreconditionerRule& rule);

// A_j = mean_i |x_j^i| + eps_A, rescaled so max_j A_j = 1; fixed for all t.
// With invert = true A_j = 1 / (mean_i |x_j^i| + eps_A) before rescaling
// (rare features then get the larger coordinate steps).
SideInfo frequency_sideinfo(const Dataset& dataset, double eps_A,
                            bool invert = false);

// Per-feature score s_j = corpus mean of tf-idf_j with tf = count / doc
// length and idf = ln(n_docs / (1 + doc_freq_j)); A_j = 1 / (s_j + eps_A),
// rescaled so max_j A_j = 1.
SideInfo tfidf_sideinfo(const Dataset& dataset, double eps_A);

// Audit format: header "feature_id,A", one row per coordinate.
void save_sideinfo_csv(const SideInfo& info, const std::string& path);
SideInfo load_sideinfo_csv(const std::string& path);

}  // namespace adadps
