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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adadps/data.hpp"
#include "adadps/federated.hpp"
#include "adadps/optimizers.hpp"

namespace adadps {

// Schema violation; `path` points at the offending config field
// ("optimizer.method", "run.seeds[2]", ...). The CLI maps this to exit
// code 2; everything else exits 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// How the preconditioner A is sourced. Fixed heuristics are built from
// the public pool; public_* variants are refreshed from a public
// mini-batch every step.
enum class SideInfoSpec {
  kOnes,
  kOracle,  // toy generator only
  kFrequency,
  kFrequencyInverted,
  kTfidf,
  kPublicRmsprop,
  kPublicAdam,
  kPublicAdagrad,
};

struct DataSection {
  std::string path;       // sparse file, exclusive with generator
  std::string generator;  // "toy" | "sparse_classification" | "heterogeneous_devices"
  std::uint64_t seed = 0;
  int d = 100, n = 1000, K = 2;
  int n_devices = 10, examples_per_device = 100;
  SplitSpec split;
};

struct ModelSection {
  bool specified = false;  // default: Dataset::default_model_spec()
  std::string kind;        // "linreg" | "logreg" | "softmax" | "mlp"
  int hidden = 32;
  std::string activation = "relu";
};

struct OptimizerSection {
  std::string method = "dpsgd";  // central Method or federated FedMethod name
  double lr = 0.1;
  std::string lr_mode = "constant";
  std::string preconditioner = "rmsprop";
  double beta = 0.999;
  double eps = 1e-8;
  double pda_lambda = 0.5;
  double beta1 = 0.9, beta2 = 0.999, beta3 = 0.999;
  SideInfoSpec side_info = SideInfoSpec::kOnes;
  double side_eps = 1e-3;  // floor added by the frequency/tfidf heuristics
};

struct PrivacySection {
  bool enabled = false;
  double sigma = 1.0;
  double clip = 1.0;
  int batch = 64;
  double delta = 1e-3;
  int micro_batch = 1;
};

struct FederatedSection {
  bool enabled = false;
  int rounds = 10;
  int devices_per_round = 2;
  int local_steps = 1;
  int local_batch = 0;
  double local_lr = 0.1;
  double server_momentum = 0.0;
};

struct RunSection {
  int T = 100;
  int eval_every = 10;
  std::vector<std::uint64_t> seeds = {0};
  std::string output = "out";
};

struct ExperimentConfig {
  DataSection data;
  ModelSection model;
  OptimizerSection optimizer;
  PrivacySection privacy;
  FederatedSection federated;
  RunSection run;
};

// Strict parse: unknown keys and type mismatches raise ConfigError with
// the field path. Semantic checks (method names, ranges) happen here too.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<TraceRow> trace;
  double final_loss = 0.0;
  std::optional<double> final_metric;
};

struct ExperimentResult {
  std::string method;
  std::vector<SeedResult> per_seed;
  double epsilon = 0.0;
  double delta = 0.0;
};

// One training run per seed. Writes <output>/seed_<s>.csv with columns
// run_seed, step_or_round, train_loss, eval_metric, epsilon_so_far, and
// <output>/summary.json. Returns the in-memory result for callers that
// want it.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Summary JSON text with keys {method, seeds, final_loss_mean,
// final_loss_std, final_metric_mean, final_metric_std, epsilon, delta}.
std::string summary_json(const ExperimentResult& result);

void write_csv(const SeedResult& result, const std::string& path);

double mean_of(const std::vector<double>& xs);
double std_of(const std::vector<double>& xs);  // sample std, n-1

}  // namespace adadps
