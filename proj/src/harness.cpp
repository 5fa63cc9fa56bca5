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

#include "adadps/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace adadps {

using nlohmann::json;

namespace {

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) {
      throw ConfigError(path + "." + it.key(), "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& path, const char* key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& path, const char* key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(path + "." + key, "expected an integer");
  }
  return v.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path, const char* key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(path + "." + key, "expected an integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

SideInfoSpec side_info_from_name(const std::string& name,
                                 const std::string& path) {
  if (name == "ones") return SideInfoSpec::kOnes;
  if (name == "oracle") return SideInfoSpec::kOracle;
  if (name == "frequency") return SideInfoSpec::kFrequency;
  if (name == "frequency_inverted") return SideInfoSpec::kFrequencyInverted;
  if (name == "tfidf") return SideInfoSpec::kTfidf;
  if (name == "public_rmsprop") return SideInfoSpec::kPublicRmsprop;
  if (name == "public_adam") return SideInfoSpec::kPublicAdam;
  if (name == "public_adagrad") return SideInfoSpec::kPublicAdagrad;
  throw ConfigError(path, "unknown side_info '" + name + "'");
}

DataSection parse_data(const json& j) {
  const std::string path = "data";
  expect_object(j, path);
  reject_unknown(j, path,
                 {"path", "generator", "seed", "d", "n", "K", "n_devices",
                  "examples_per_device", "split"});
  DataSection s;
  s.path = get_string(j, path, "path", "");
  s.generator = get_string(j, path, "generator", "");
  if (s.path.empty() == s.generator.empty()) {
    throw ConfigError(path, "exactly one of path / generator is required");
  }
  if (!s.generator.empty() && s.generator != "toy" &&
      s.generator != "sparse_classification" &&
      s.generator != "heterogeneous_devices") {
    throw ConfigError(path + ".generator", "unknown generator '" + s.generator + "'");
  }
  s.seed = get_u64(j, path, "seed", 0);
  s.d = get_int(j, path, "d", 100);
  s.n = get_int(j, path, "n", 1000);
  s.K = get_int(j, path, "K", 2);
  s.n_devices = get_int(j, path, "n_devices", 10);
  s.examples_per_device = get_int(j, path, "examples_per_device", 100);
  if (j.contains("split")) {
    const json& sp = expect_object(j.at("split"), path + ".split");
    reject_unknown(sp, path + ".split",
                   {"public_fraction", "test_fraction", "seed", "mode"});
    s.split.public_fraction =
        get_number(sp, path + ".split", "public_fraction", 0.01);
    s.split.test_fraction = get_number(sp, path + ".split", "test_fraction", 0.2);
    s.split.seed = get_u64(sp, path + ".split", "seed", 0);
    const std::string mode =
        get_string(sp, path + ".split", "mode", "in_distribution");
    if (mode == "in_distribution") {
      s.split.mode = SplitSpec::Mode::kInDistribution;
    } else if (mode == "held_out_units") {
      s.split.mode = SplitSpec::Mode::kHeldOutUnits;
    } else {
      throw ConfigError(path + ".split.mode", "unknown mode '" + mode + "'");
    }
    if (s.split.public_fraction < 0.0 || s.split.test_fraction < 0.0 ||
        s.split.public_fraction + s.split.test_fraction >= 1.0) {
      throw ConfigError(path + ".split", "fractions must be >= 0 and sum below 1");
    }
  }
  return s;
}

ModelSection parse_model(const json& j) {
  const std::string path = "model";
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "hidden", "activation"});
  ModelSection s;
  s.specified = true;
  s.kind = get_string(j, path, "kind", "");
  if (s.kind != "linreg" && s.kind != "logreg" && s.kind != "softmax" &&
      s.kind != "mlp") {
    throw ConfigError(path + ".kind", "unknown kind '" + s.kind + "'");
  }
  s.hidden = get_int(j, path, "hidden", 32);
  s.activation = get_string(j, path, "activation", "relu");
  if (s.activation != "relu" && s.activation != "tanh") {
    throw ConfigError(path + ".activation", "must be relu or tanh");
  }
  return s;
}

OptimizerSection parse_optimizer(const json& j) {
  const std::string path = "optimizer";
  expect_object(j, path);
  reject_unknown(j, path,
                 {"method", "lr", "lr_mode", "preconditioner", "beta", "eps",
                  "pda_lambda", "beta1", "beta2", "beta3", "side_info",
                  "side_eps"});
  OptimizerSection s;
  s.method = get_string(j, path, "method", "dpsgd");
  try {
    (void)method_from_name(s.method);
  } catch (const std::invalid_argument&) {
    try {
      (void)fed_method_from_name(s.method);
    } catch (const std::invalid_argument&) {
      throw ConfigError(path + ".method", "unknown method '" + s.method + "'");
    }
  }
  s.lr = get_number(j, path, "lr", 0.1);
  if (!(s.lr > 0.0)) throw ConfigError(path + ".lr", "must be > 0");
  s.lr_mode = get_string(j, path, "lr_mode", "constant");
  if (s.lr_mode != "constant" && s.lr_mode != "inv_sqrt") {
    throw ConfigError(path + ".lr_mode", "must be constant or inv_sqrt");
  }
  s.preconditioner = get_string(j, path, "preconditioner", "rmsprop");
  if (s.preconditioner != "rmsprop" && s.preconditioner != "adam" &&
      s.preconditioner != "adagrad") {
    throw ConfigError(path + ".preconditioner",
                      "must be rmsprop, adam or adagrad");
  }
  s.beta = get_number(j, path, "beta", 0.999);
  s.eps = get_number(j, path, "eps", 1e-8);
  s.pda_lambda = get_number(j, path, "pda_lambda", 0.5);
  if (s.pda_lambda < 0.0 || s.pda_lambda > 1.0) {
    throw ConfigError(path + ".pda_lambda", "must be in [0,1]");
  }
  s.beta1 = get_number(j, path, "beta1", 0.9);
  s.beta2 = get_number(j, path, "beta2", 0.999);
  s.beta3 = get_number(j, path, "beta3", 0.999);
  s.side_info = side_info_from_name(get_string(j, path, "side_info", "ones"),
                                    path + ".side_info");
  s.side_eps = get_number(j, path, "side_eps", 1e-3);
  return s;
}

PrivacySection parse_privacy(const json& j) {
  const std::string path = "privacy";
  expect_object(j, path);
  reject_unknown(j, path, {"sigma", "clip", "batch", "delta", "micro_batch"});
  PrivacySection s;
  s.enabled = true;
  s.sigma = get_number(j, path, "sigma", 1.0);
  s.clip = get_number(j, path, "clip", 1.0);
  s.batch = get_int(j, path, "batch", 64);
  s.delta = get_number(j, path, "delta", 1e-3);
  s.micro_batch = get_int(j, path, "micro_batch", 1);
  if (s.sigma < 0.0) throw ConfigError(path + ".sigma", "must be >= 0");
  if (!(s.clip > 0.0)) throw ConfigError(path + ".clip", "must be > 0");
  if (s.batch < 1) throw ConfigError(path + ".batch", "must be >= 1");
  if (!(s.delta > 0.0 && s.delta < 1.0)) {
    throw ConfigError(path + ".delta", "must be in (0,1)");
  }
  if (s.micro_batch < 1) throw ConfigError(path + ".micro_batch", "must be >= 1");
  return s;
}

FederatedSection parse_federated(const json& j) {
  const std::string path = "federated";
  expect_object(j, path);
  reject_unknown(j, path,
                 {"rounds", "devices_per_round", "local_steps", "local_batch",
                  "local_lr", "server_momentum"});
  FederatedSection s;
  s.enabled = true;
  s.rounds = get_int(j, path, "rounds", 10);
  s.devices_per_round = get_int(j, path, "devices_per_round", 2);
  s.local_steps = get_int(j, path, "local_steps", 1);
  s.local_batch = get_int(j, path, "local_batch", 0);
  s.local_lr = get_number(j, path, "local_lr", 0.1);
  s.server_momentum = get_number(j, path, "server_momentum", 0.0);
  return s;
}

RunSection parse_run(const json& j) {
  const std::string path = "run";
  expect_object(j, path);
  reject_unknown(j, path, {"T", "eval_every", "seeds", "output"});
  RunSection s;
  s.T = get_int(j, path, "T", 100);
  if (s.T < 1) throw ConfigError(path + ".T", "must be >= 1");
  s.eval_every = get_int(j, path, "eval_every", 10);
  if (s.eval_every < 1) throw ConfigError(path + ".eval_every", "must be >= 1");
  if (j.contains("seeds")) {
    const json& arr = j.at("seeds");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError(path + ".seeds", "expected a non-empty array");
    }
    s.seeds.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_integer()) {
        throw ConfigError(path + ".seeds[" + std::to_string(i) + "]",
                          "expected an integer");
      }
      s.seeds.push_back(arr[i].get<std::uint64_t>());
    }
  }
  s.output = get_string(j, path, "output", "out");
  return s;
}

bool is_federated_method(const std::string& name) {
  return name == "dp_fedavg" || name == "dp_fedadam" || name == "adadps_fl";
}

ModelSpec resolve_model(const ModelSection& m, const Dataset& data) {
  if (!m.specified) return data.default_model_spec();
  ModelSpec spec;
  spec.d_in = data.d_in;
  if (m.kind == "linreg") {
    spec.kind = ModelKind::kLinReg;
  } else if (m.kind == "logreg") {
    spec.kind = ModelKind::kLogReg;
  } else if (m.kind == "softmax") {
    spec.kind = ModelKind::kSoftmax;
    spec.K = data.K;
  } else {
    spec.kind = ModelKind::kMlp;
    spec.K = data.task == Task::kAutoencode ? data.d_in : data.K;
    spec.hidden = m.hidden;
    spec.activation = m.activation == "relu" ? Activation::kRelu : Activation::kTanh;
    spec.autoencode = data.task == Task::kAutoencode;
  }
  spec.validate();
  return spec;
}

// Tile a per-feature scaling up to the parameter vector: GLM weights take
// their feature's entry (class-major for softmax), mlp first-layer rows
// likewise, all other parameters are left at 1.
Vec expand_feature_A(const ModelSpec& spec, const Vec& feature_A) {
  if (static_cast<int>(feature_A.size()) != spec.d_in) {
    throw std::invalid_argument("expand_feature_A: size mismatch");
  }
  Vec A(spec.param_count(), 1.0);
  switch (spec.kind) {
    case ModelKind::kLinReg:
    case ModelKind::kLogReg:
      A = feature_A;
      break;
    case ModelKind::kSoftmax:
      for (int k = 0; k < spec.K; ++k) {
        for (int j = 0; j < spec.d_in; ++j) {
          A[static_cast<std::size_t>(k) * spec.d_in + j] = feature_A[j];
        }
      }
      break;
    case ModelKind::kMlp:
      for (int h = 0; h < spec.hidden; ++h) {
        for (int j = 0; j < spec.d_in; ++j) {
          A[static_cast<std::size_t>(h) * spec.d_in + j] = feature_A[j];
        }
      }
      break;
  }
  return A;
}

PreconditionerKind preconditioner_kind(const std::string& name) {
  if (name == "rmsprop") return PreconditionerKind::kRmsprop;
  if (name == "adam") return PreconditionerKind::kAdam;
  return PreconditionerKind::kAdagrad;
}

SideInfo build_side_info(const ExperimentConfig& cfg, const ModelSpec& spec,
                         const Dataset& heuristic_source,
                         const SideInfo* oracle) {
  switch (cfg.optimizer.side_info) {
    case SideInfoSpec::kOnes:
      return ones_sideinfo(spec.param_count());
    case SideInfoSpec::kOracle: {
      if (oracle == nullptr) {
        throw ConfigError("optimizer.side_info",
                          "oracle side info requires the toy generator");
      }
      return oracle_sideinfo(expand_feature_A(spec, oracle->A));
    }
    case SideInfoSpec::kFrequency:
    case SideInfoSpec::kFrequencyInverted: {
      const bool invert = cfg.optimizer.side_info == SideInfoSpec::kFrequencyInverted;
      SideInfo f = frequency_sideinfo(heuristic_source, cfg.optimizer.side_eps, invert);
      SideInfo s = oracle_sideinfo(expand_feature_A(spec, f.A));
      s.provenance = Provenance::kFrequency;
      return s;
    }
    case SideInfoSpec::kTfidf: {
      SideInfo f = tfidf_sideinfo(heuristic_source, cfg.optimizer.side_eps);
      SideInfo s = oracle_sideinfo(expand_feature_A(spec, f.A));
      s.provenance = Provenance::kTfidf;
      return s;
    }
    case SideInfoSpec::kPublicRmsprop:
      return public_sideinfo(spec.param_count(), PreconditionerKind::kRmsprop);
    case SideInfoSpec::kPublicAdam:
      return public_sideinfo(spec.param_count(), PreconditionerKind::kAdam);
    case SideInfoSpec::kPublicAdagrad:
      return public_sideinfo(spec.param_count(), PreconditionerKind::kAdagrad);
  }
  throw std::logic_error("unreachable");
}

struct CentralSetup {
  Dataset train, public_pool, test;
  ModelSpec spec;
  SideInfo side;
};

CentralSetup central_setup(const ExperimentConfig& cfg) {
  CentralSetup setup;
  SideInfo oracle;
  bool have_oracle = false;
  Dataset full;
  if (!cfg.data.path.empty()) {
    full = load_sparse(cfg.data.path);
  } else if (cfg.data.generator == "toy") {
    ToyProblem toy = gen_toy(cfg.data.seed);
    full = std::move(toy.data);
    oracle = std::move(toy.oracle);
    have_oracle = true;
  } else if (cfg.data.generator == "sparse_classification") {
    full = gen_sparse_classification(cfg.data.seed, cfg.data.d, cfg.data.n,
                                     cfg.data.K);
  } else {
    throw ConfigError("data.generator",
                      "heterogeneous_devices requires a federated method");
  }
  SplitResult parts = split(full, cfg.data.split);
  setup.train = std::move(parts.train);
  setup.public_pool = std::move(parts.public_pool);
  setup.test = std::move(parts.test);
  setup.spec = resolve_model(cfg.model, setup.train);
  const Dataset& src =
      setup.public_pool.examples.empty() ? setup.train : setup.public_pool;
  setup.side = build_side_info(cfg, setup.spec, src, have_oracle ? &oracle : nullptr);
  return setup;
}

OptimizerConfig central_optimizer(const ExperimentConfig& cfg, int dataset_n) {
  OptimizerConfig oc;
  oc.method = method_from_name(cfg.optimizer.method);
  oc.lr_mode = cfg.optimizer.lr_mode == "constant" ? LrMode::kConstant
                                                   : LrMode::kInvSqrt;
  oc.alpha = cfg.optimizer.lr;
  if (cfg.privacy.enabled) {
    PrivacyConfig pc;
    pc.sigma = cfg.privacy.sigma;
    pc.clip_C = cfg.privacy.clip;
    pc.batch_b = cfg.privacy.batch;
    pc.dataset_n = dataset_n;
    pc.delta = cfg.privacy.delta;
    pc.micro_batch = cfg.privacy.micro_batch > 1 ? cfg.privacy.micro_batch : 0;
    oc.privacy = pc;
  }
  oc.rule.kind = preconditioner_kind(cfg.optimizer.preconditioner);
  oc.rule.beta = cfg.optimizer.beta;
  oc.rule.eps = cfg.optimizer.eps;
  oc.rule.beta1 = cfg.optimizer.beta1;
  oc.pda_lambda = cfg.optimizer.pda_lambda;
  oc.adam_beta1 = cfg.optimizer.beta1;
  oc.adam_beta2 = cfg.optimizer.beta2;
  oc.adam_beta3 = cfg.optimizer.beta3;
  oc.adam_eps = cfg.optimizer.eps;
  oc.validate();
  return oc;
}

struct FedSetup {
  FederatedNetwork network;
  Dataset eval;
  ModelSpec spec;
  SideInfo side;
  FedConfig fed;
};

FedSetup federated_setup(const ExperimentConfig& cfg) {
  if (cfg.data.generator != "heterogeneous_devices") {
    throw ConfigError("data.generator",
                      "federated methods require heterogeneous_devices");
  }
  FedSetup setup;
  setup.network = FederatedNetwork::uniform(gen_heterogeneous_devices(
      cfg.data.seed, cfg.data.n_devices, cfg.data.examples_per_device,
      cfg.data.d, cfg.data.K));
  setup.eval = gen_sparse_classification(
      cfg.data.seed + 1,
      cfg.data.d,
      std::max(100, cfg.data.n_devices * cfg.data.examples_per_device / 5),
      cfg.data.K);
  Dataset pooled = setup.network.devices[0];
  for (std::size_t i = 1; i < setup.network.devices.size(); ++i) {
    const Dataset& dev = setup.network.devices[i];
    pooled.examples.insert(pooled.examples.end(), dev.examples.begin(),
                           dev.examples.end());
  }
  setup.spec = resolve_model(cfg.model, pooled);
  setup.side = build_side_info(cfg, setup.spec, pooled, nullptr);

  FedConfig fc;
  fc.method = fed_method_from_name(cfg.optimizer.method);
  fc.rounds = cfg.federated.rounds;
  fc.devices_per_round = cfg.federated.devices_per_round;
  fc.local_steps = cfg.federated.local_steps;
  fc.local_batch = cfg.federated.local_batch;
  fc.local_lr = cfg.federated.local_lr;
  fc.server_momentum = cfg.federated.server_momentum;
  fc.adam_beta1 = cfg.optimizer.beta1;
  fc.adam_beta2 = cfg.optimizer.beta2;
  fc.adam_eps = cfg.optimizer.eps;
  if (cfg.privacy.enabled) {
    fc.clip_C = cfg.privacy.clip;
    fc.sigma = cfg.privacy.sigma;
    fc.delta = cfg.privacy.delta;
  } else {
    fc.sigma = 0.0;
  }
  fc.validate(setup.network.n_devices());
  setup.fed = fc;
  return setup;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  expect_object(j, "<root>");
  reject_unknown(j, "<root>",
                 {"data", "model", "optimizer", "privacy", "federated", "run"});
  if (!j.contains("data")) throw ConfigError("data", "missing required section");
  if (!j.contains("run")) throw ConfigError("run", "missing required section");
  ExperimentConfig cfg;
  cfg.data = parse_data(j.at("data"));
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  if (j.contains("optimizer")) cfg.optimizer = parse_optimizer(j.at("optimizer"));
  if (j.contains("privacy")) cfg.privacy = parse_privacy(j.at("privacy"));
  if (j.contains("federated")) cfg.federated = parse_federated(j.at("federated"));
  cfg.run = parse_run(j.at("run"));

  const bool fed_method = is_federated_method(cfg.optimizer.method);
  if (fed_method && !cfg.federated.enabled) {
    throw ConfigError("federated",
                      "section required for method " + cfg.optimizer.method);
  }
  if (!fed_method && cfg.federated.enabled) {
    throw ConfigError("federated",
                      "section only valid with a federated method");
  }
  Method m = Method::kSgd;
  if (!fed_method) m = method_from_name(cfg.optimizer.method);
  const bool needs_dp = !fed_method &&
                        (m == Method::kAdaDps || m == Method::kDpSgd ||
                         m == Method::kDpAdam || m == Method::kDpRmsprop ||
                         m == Method::kDpRPub || m == Method::kDpAdamPub ||
                         m == Method::kPdaDpmd);
  if (needs_dp && !cfg.privacy.enabled) {
    throw ConfigError("privacy",
                      "section required for method " + cfg.optimizer.method);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

void write_csv(const SeedResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "run_seed,step_or_round,train_loss,eval_metric,epsilon_so_far\n";
  for (const TraceRow& row : result.trace) {
    out << result.seed << "," << row.step << ","
        << format_double(row.train_loss) << ",";
    if (row.eval_metric) out << format_double(*row.eval_metric);
    out << "," << format_double(row.epsilon) << "\n";
  }
}

std::string summary_json(const ExperimentResult& result) {
  std::vector<double> losses, metrics;
  json seeds = json::array();
  bool all_metrics = !result.per_seed.empty();
  for (const SeedResult& r : result.per_seed) {
    seeds.push_back(r.seed);
    losses.push_back(r.final_loss);
    if (r.final_metric) {
      metrics.push_back(*r.final_metric);
    } else {
      all_metrics = false;
    }
  }
  json out;
  out["method"] = result.method;
  out["seeds"] = seeds;
  out["final_loss_mean"] = mean_of(losses);
  out["final_loss_std"] = std_of(losses);
  if (all_metrics) {
    out["final_metric_mean"] = mean_of(metrics);
    out["final_metric_std"] = std_of(metrics);
  } else {
    out["final_metric_mean"] = nullptr;
    out["final_metric_std"] = nullptr;
  }
  out["epsilon"] = result.epsilon;
  out["delta"] = result.delta;
  return out.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.method = cfg.optimizer.method;
  result.delta = cfg.privacy.enabled ? cfg.privacy.delta : 0.0;

  const bool fed = is_federated_method(cfg.optimizer.method);
  if (fed) {
    FedSetup setup = federated_setup(cfg);
    for (std::uint64_t seed : cfg.run.seeds) {
      SeedResult sr;
      sr.seed = seed;
      sr.trace = run_federated(setup.network, setup.spec, setup.fed, setup.side,
                               &setup.eval, seed);
      sr.final_loss = sr.trace.back().train_loss;
      sr.final_metric = sr.trace.back().eval_metric;
      result.per_seed.push_back(std::move(sr));
    }
    if (setup.fed.sigma > 0.0) {
      result.epsilon = fed_spend(setup.fed, setup.network.n_devices(),
                                 setup.fed.rounds).epsilon;
    }
  } else {
    CentralSetup setup = central_setup(cfg);
    const OptimizerConfig oc =
        central_optimizer(cfg, static_cast<int>(setup.train.size()));
    TrainOptions opts;
    opts.T = cfg.run.T;
    opts.eval_every = cfg.run.eval_every;
    const Dataset* pub =
        setup.public_pool.examples.empty() ? nullptr : &setup.public_pool;
    const Dataset* eval_set = setup.test.examples.empty() ? nullptr : &setup.test;
    for (std::uint64_t seed : cfg.run.seeds) {
      opts.seed = seed;
      SeedResult sr;
      sr.seed = seed;
      TrainState final_state;
      sr.trace = train(oc, setup.spec, setup.train, pub, eval_set, setup.side,
                       opts, &final_state);
      sr.final_loss = sr.trace.back().train_loss;
      sr.final_metric = sr.trace.back().eval_metric;
      result.per_seed.push_back(std::move(sr));
      result.epsilon = final_state.spend.epsilon;
    }
  }

  std::filesystem::create_directories(cfg.run.output);
  for (const SeedResult& sr : result.per_seed) {
    write_csv(sr, cfg.run.output + "/seed_" + std::to_string(sr.seed) + ".csv");
  }
  std::ofstream summary(cfg.run.output + "/summary.json");
  if (!summary) {
    throw std::runtime_error("run_experiment: cannot write summary.json");
  }
  summary << summary_json(result);
  return result;
}

}  // namespace adadps
