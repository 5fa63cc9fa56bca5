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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adadps/data.hpp"
#include "adadps/harness.hpp"
#include "adadps/privacy.hpp"

namespace {

// Exit codes: 0 success, 1 runtime error, 2 config/usage error.
constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

int cmd_run(const std::string& config_path) {
  const adadps::ExperimentConfig cfg = adadps::load_config(config_path);
  const adadps::ExperimentResult result = adadps::run_experiment(cfg);
  std::cout << adadps::summary_json(result);
  return kOk;
}

int cmd_accountant(double sigma, int batch, int n, double delta, int steps,
                   int micro_batch) {
  adadps::PrivacyConfig pc;
  pc.sigma = sigma;
  pc.clip_C = 1.0;
  pc.batch_b = batch;
  pc.dataset_n = n;
  pc.delta = delta;
  pc.micro_batch = micro_batch > 1 ? micro_batch : 0;
  const adadps::PrivacySpend s = adadps::spend(pc, steps);
  nlohmann::json out;
  out["epsilon"] = s.epsilon;
  out["order"] = s.best_order;
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_gen(const std::string& generator, std::uint64_t seed,
            const std::string& out_path, int d, int n, int K) {
  adadps::Dataset data;
  if (generator == "toy") {
    data = adadps::gen_toy(seed).data;
  } else if (generator == "sparse_classification") {
    data = adadps::gen_sparse_classification(seed, d, n, K);
  } else {
    throw adadps::ConfigError("generator", "unknown generator '" + generator + "'");
  }
  adadps::save_sparse(data, out_path);
  return kOk;
}

int cmd_featurize(const std::string& corpus_path, const std::string& mode,
                  int vocab, const std::string& out_path) {
  std::ifstream in(corpus_path);
  if (!in) throw std::runtime_error("cannot open " + corpus_path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  const adadps::FeaturizeMode m = mode == "bow" ? adadps::FeaturizeMode::kBow
                                                : adadps::FeaturizeMode::kTfidf;
  adadps::save_sparse(adadps::featurize(lines, m, vocab), out_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private preconditioned optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();

  double sigma = 1.0, delta = 1e-5;
  int batch = 1, n = 1, steps = 1, micro_batch = 1;
  CLI::App* acct = app.add_subcommand("accountant", "Privacy spend for given parameters");
  acct->add_option("--sigma", sigma, "noise multiplier")->required();
  acct->add_option("--batch", batch, "batch size b")->required();
  acct->add_option("--n", n, "dataset size n")->required();
  acct->add_option("--delta", delta, "target delta")->required();
  acct->add_option("--steps", steps, "composed steps")->required();
  acct->add_option("--micro-batch", micro_batch, "micro-batch size m");

  std::string generator, out_path;
  std::uint64_t seed = 0;
  int d = 100, gen_n = 1000, K = 2;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset file");
  gen->add_option("generator", generator, "toy | sparse_classification")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output path")->required();
  gen->add_option("--d", d, "feature count");
  gen->add_option("--n", gen_n, "example count");
  gen->add_option("--K", K, "class count");

  std::string corpus_path, mode = "bow";
  int vocab = 1000;
  CLI::App* feat = app.add_subcommand("featurize", "Featurize a token corpus");
  feat->add_option("corpus", corpus_path, "one document per line")->required();
  feat->add_option("--mode", mode, "bow | tfidf")
      ->check(CLI::IsMember({"bow", "tfidf"}));
  feat->add_option("--vocab", vocab, "vocabulary size");
  feat->add_option("--out", out_path, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (acct->parsed()) {
      return cmd_accountant(sigma, batch, n, delta, steps, micro_batch);
    }
    if (gen->parsed()) return cmd_gen(generator, seed, out_path, d, gen_n, K);
    if (feat->parsed()) return cmd_featurize(corpus_path, mode, vocab, out_path);
  } catch (const adadps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
