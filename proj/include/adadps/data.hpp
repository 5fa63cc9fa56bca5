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
#include <string>
#include <vector>

#include "adadps/models.hpp"
#include "adadps/sideinfo.hpp"

namespace adadps {

enum class Task { kRegression, kBinary, kMulticlass, kAutoencode };

struct Dataset {
  std::vector<SparseExample> examples;
  int d_in = 0;
  Task task = Task::kRegression;
  int K = 1;               // classes (multiclass) or outputs (autoencode)
  std::string name;
  std::vector<int> units;  // optional per-example unit/group tag; empty if
                           // the dataset has no unit structure

  std::size_t size() const { return examples.size(); }
  void validate() const;
  ModelSpec default_model_spec() const;
};

struct SplitSpec {
  double public_fraction = 0.01;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  enum class Mode { kInDistribution, kHeldOutUnits } mode = Mode::kInDistribution;
};

struct SplitResult {
  Dataset train;   // private
  Dataset public_pool;
  Dataset test;
};

// The sparse linear-regression construction used by the committed toy
// recipe: d = 500, n = 1000, binary features with Pr(x_j = 1) = 0.9 for
// j < 50 and 0.01 otherwise, true w_j = 0.01 for j < 50 and 1.0 otherwise,
// labels y = <w, x> + N(0, 0.01). The oracle preconditioner is 1 on the
// frequent block and 0.01 on the rare block.
struct ToyProblem {
  Dataset data;
  SideInfo oracle;
  Vec true_w;
};
ToyProblem gen_toy(std::uint64_t seed);

// Heavy-tailed synthetic sparse classification: a frequent, uninformative
// feature block plus rare features that each carry one class's signal.
struct FrequencyProfile {
  double frac_frequent = 0.1;
  double p_frequent = 0.9;
  double p_rare_active = 0.5;    // rare feature of the example's own class
  double p_rare_inactive = 0.01; // rare feature of another class
  double label_noise = 0.0;      // label flip probability
};
Dataset gen_sparse_classification(std::uint64_t seed, int d, int n, int K,
                                  const FrequencyProfile& profile = {});

// A heterogeneous device partition of gen_sparse_classification: device i
// holds mostly class (i mod K) examples.
std::vector<Dataset> gen_heterogeneous_devices(std::uint64_t seed,
                                               int n_devices,
                                               int examples_per_device, int d,
                                               int K,
                                               const FrequencyProfile& profile = {});

// One example per line: `label idx:val idx:val ...` after a one-line header
// `#d_in=<int> task=<kind>` (kind in {regression, binary, multiclass,
// autoencode}; multiclass carries ` K=<int>`). Autoencode examples take
// their dense feature vector as the reconstruction target.
Dataset load_sparse(const std::string& path);
void save_sparse(const Dataset& dataset, const std::string& path);

SplitResult split(const Dataset& dataset, const SplitSpec& spec);

// Corpus featurization: one whitespace-tokenized document per line; the
// vocabulary is the vocab_size most frequent tokens (ties broken by first
// appearance), out-of-vocabulary tokens dropped. bow = raw counts, tfidf
// as in tfidf_sideinfo's per-document definition. Labels default to 0.
enum class FeaturizeMode { kBow, kTfidf };
Dataset featurize(const std::vector<std::string>& corpus_lines,
                  FeaturizeMode mode, int vocab_size);

std::string task_name(Task task);

}  // namespace adadps
