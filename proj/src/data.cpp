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

#include "adadps/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace adadps {

void Dataset::validate() const {
  for (const SparseExample& ex : examples) {
    ex.validate(static_cast<std::uint32_t>(d_in));
    switch (task) {
      case Task::kRegression:
        break;
      case Task::kBinary:
        if (ex.y != 0.0 && ex.y != 1.0) {
          throw std::invalid_argument("dataset: binary label must be 0 or 1");
        }
        break;
      case Task::kMulticlass:
        if (ex.cls < 0 || ex.cls >= K) {
          throw std::invalid_argument("dataset: class id out of range");
        }
        break;
      case Task::kAutoencode:
        if (static_cast<int>(ex.target.size()) != K) {
          throw std::invalid_argument("dataset: autoencode target length != K");
        }
        break;
    }
  }
  if (!units.empty() && units.size() != examples.size()) {
    throw std::invalid_argument("dataset: units length mismatch");
  }
}

ModelSpec Dataset::default_model_spec() const {
  ModelSpec spec;
  spec.d_in = d_in;
  switch (task) {
    case Task::kRegression:
      spec.kind = ModelKind::kLinReg;
      break;
    case Task::kBinary:
      spec.kind = ModelKind::kLogReg;
      break;
    case Task::kMulticlass:
      spec.kind = ModelKind::kSoftmax;
      spec.K = K;
      break;
    case Task::kAutoencode:
      spec.kind = ModelKind::kMlp;
      spec.K = K;
      spec.hidden = 16;
      spec.autoencode = true;
      break;
  }
  return spec;
}

ToyProblem gen_toy(std::uint64_t seed) {
  constexpr int kD = 500;
  constexpr int kN = 1000;
  constexpr int kFrequent = 50;
  RngStream rng(seed, streams::kData);

  ToyProblem toy;
  toy.true_w.assign(kD, 0.0);
  Vec oracle_a(kD, 0.0);
  for (int j = 0; j < kD; ++j) {
    toy.true_w[j] = j < kFrequent ? 0.01 : 1.0;
    oracle_a[j] = j < kFrequent ? 1.0 : 0.01;
  }
  toy.oracle = oracle_sideinfo(oracle_a);

  toy.data.d_in = kD;
  toy.data.task = Task::kRegression;
  toy.data.name = "toy";
  toy.data.examples.reserve(kN);
  for (int i = 0; i < kN; ++i) {
    SparseExample ex;
    double y = 0.0;
    for (int j = 0; j < kD; ++j) {
      const double p = j < kFrequent ? 0.9 : 0.01;
      if (rng.uniform() < p) {
        ex.indices.push_back(static_cast<std::uint32_t>(j));
        ex.values.push_back(1.0);
        y += toy.true_w[j];
      }
    }
    ex.y = y + 0.1 * rng.normal();  // N(0, 0.01) label noise
    toy.data.examples.push_back(std::move(ex));
  }
  return toy;
}

Dataset gen_sparse_classification(std::uint64_t seed, int d, int n, int K,
                                  const FrequencyProfile& profile) {
  if (d < 2 || n < 1 || K < 2) {
    throw std::invalid_argument("gen_sparse_classification: invalid sizes");
  }
  RngStream rng(seed, streams::kData);
  const int n_frequent = std::max(1, static_cast<int>(d * profile.frac_frequent));
  Dataset ds;
  ds.d_in = d;
  ds.task = K == 2 ? Task::kBinary : Task::kMulticlass;
  ds.K = K;
  ds.name = "sparse_classification";
  ds.examples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int cls = static_cast<int>(rng.uniform_int(K));
    SparseExample ex;
    for (int j = 0; j < d; ++j) {
      double p;
      if (j < n_frequent) {
        p = profile.p_frequent;
      } else {
        // Rare features are class-keyed round-robin; a feature fires mostly
        // for its own class, which makes the rare block informative.
        const int owner = (j - n_frequent) % K;
        p = owner == cls ? profile.p_rare_active : profile.p_rare_inactive;
      }
      if (rng.uniform() < p) {
        ex.indices.push_back(static_cast<std::uint32_t>(j));
        ex.values.push_back(1.0);
      }
    }
    int label = cls;
    if (profile.label_noise > 0.0 && rng.uniform() < profile.label_noise) {
      label = static_cast<int>(rng.uniform_int(K));
    }
    if (ds.task == Task::kBinary) {
      ex.y = static_cast<double>(label);
    } else {
      ex.cls = label;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::vector<Dataset> gen_heterogeneous_devices(std::uint64_t seed,
                                               int n_devices,
                                               int examples_per_device, int d,
                                               int K,
                                               const FrequencyProfile& profile) {
  if (n_devices < 1 || examples_per_device < 1) {
    throw std::invalid_argument("gen_heterogeneous_devices: invalid sizes");
  }
  std::vector<Dataset> devices;
  devices.reserve(n_devices);
  RngStream master(seed, streams::kData);
  for (int i = 0; i < n_devices; ++i) {
    // 80% of a device's data comes from its home class; the remainder is
    // drawn uniformly, so devices are heterogeneous but not disjoint.
    const int home = i % K;
    RngStream rng = master.split(static_cast<std::uint64_t>(i));
    Dataset pool = gen_sparse_classification(rng.next_u64(), d,
                                             4 * examples_per_device, K, profile);
    Dataset dev;
    dev.d_in = d;
    dev.task = pool.task;
    dev.K = K;
    dev.name = "device_" + std::to_string(i);
    for (const SparseExample& ex : pool.examples) {
      const int cls = pool.task == Task::kBinary ? static_cast<int>(ex.y) : ex.cls;
      const bool keep = cls == home ? true : rng.uniform() < 0.25;
      if (keep) dev.examples.push_back(ex);
      if (static_cast<int>(dev.examples.size()) == examples_per_device) break;
    }
    if (dev.examples.empty()) dev.examples.push_back(pool.examples.front());
    devices.push_back(std::move(dev));
  }
  return devices;
}

namespace {

Task parse_task(const std::string& s) {
  if (s == "regression") return Task::kRegression;
  if (s == "binary") return Task::kBinary;
  if (s == "multiclass") return Task::kMulticlass;
  if (s == "autoencode") return Task::kAutoencode;
  throw std::runtime_error("load_sparse: unknown task '" + s + "'");
}

Vec densify(const SparseExample& ex, int d) {
  Vec out(d, 0.0);
  for (std::size_t i = 0; i < ex.indices.size(); ++i) {
    out[ex.indices[i]] = ex.values[i];
  }
  return out;
}

}  // namespace

Dataset load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sparse: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_sparse: empty file " + path);
  }
  Dataset ds;
  {
    std::istringstream hs(line);
    std::string tok;
    bool have_d = false, have_task = false;
    while (hs >> tok) {
      if (tok.rfind("#d_in=", 0) == 0) {
        ds.d_in = std::stoi(tok.substr(6));
        have_d = true;
      } else if (tok.rfind("task=", 0) == 0) {
        ds.task = parse_task(tok.substr(5));
        have_task = true;
      } else if (tok.rfind("K=", 0) == 0) {
        ds.K = std::stoi(tok.substr(2));
      } else {
        throw std::runtime_error("load_sparse: unexpected header token '" + tok + "'");
      }
    }
    if (!have_d || !have_task) {
      throw std::runtime_error("load_sparse: header must carry #d_in= and task=");
    }
  }
  if (ds.task == Task::kAutoencode) ds.K = ds.d_in;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    SparseExample ex;
    std::string label_tok;
    if (!(ls >> label_tok)) {
      throw std::runtime_error("load_sparse: malformed line " + std::to_string(line_no));
    }
    try {
      if (ds.task == Task::kMulticlass) {
        ex.cls = std::stoi(label_tok);
      } else {
        ex.y = std::stod(label_tok);
      }
    } catch (const std::exception&) {
      throw std::runtime_error("load_sparse: bad label on line " + std::to_string(line_no));
    }
    std::string pair;
    while (ls >> pair) {
      const std::size_t colon = pair.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("load_sparse: malformed feature on line " +
                                 std::to_string(line_no));
      }
      try {
        ex.indices.push_back(static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon))));
        ex.values.push_back(std::stod(pair.substr(colon + 1)));
      } catch (const std::exception&) {
        throw std::runtime_error("load_sparse: malformed feature on line " +
                                 std::to_string(line_no));
      }
    }
    try {
      ex.validate(static_cast<std::uint32_t>(ds.d_in));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_sparse: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    if (ds.task == Task::kAutoencode) ex.target = densify(ex, ds.d_in);
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) {
    throw std::runtime_error("load_sparse: no examples in " + path);
  }
  ds.validate();
  return ds;
}

void save_sparse(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sparse: cannot open " + path);
  out.precision(17);
  out << "#d_in=" << dataset.d_in << " task=" << task_name(dataset.task);
  if (dataset.task == Task::kMulticlass) out << " K=" << dataset.K;
  out << "\n";
  for (const SparseExample& ex : dataset.examples) {
    if (dataset.task == Task::kMulticlass) {
      out << ex.cls;
    } else {
      out << ex.y;
    }
    for (std::size_t i = 0; i < ex.indices.size(); ++i) {
      out << " " << ex.indices[i] << ":" << ex.values[i];
    }
    out << "\n";
  }
}

SplitResult split(const Dataset& dataset, const SplitSpec& spec) {
  if (spec.public_fraction < 0.0 || spec.test_fraction < 0.0 ||
      spec.public_fraction + spec.test_fraction >= 1.0) {
    throw std::invalid_argument("split: fractions must be in [0,1) and sum < 1");
  }
  const std::size_t n = dataset.examples.size();
  SplitResult r;
  for (Dataset* part : {&r.train, &r.public_pool, &r.test}) {
    part->d_in = dataset.d_in;
    part->task = dataset.task;
    part->K = dataset.K;
    part->name = dataset.name;
  }
  r.train.name += "/train";
  r.public_pool.name += "/public";
  r.test.name += "/test";

  RngStream rng(spec.seed, streams::kData);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with our own stream for cross-platform determinism.
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }

  const std::size_t n_test = static_cast<std::size_t>(spec.test_fraction * n);
  std::size_t n_public = static_cast<std::size_t>(spec.public_fraction * n);

  if (spec.mode == SplitSpec::Mode::kHeldOutUnits && !dataset.units.empty()) {
    // Whole unit groups move to the public pool: hold out the lowest unit
    // ids until the public budget is met, then split the rest by example.
    std::vector<int> unit_ids(dataset.units);
    std::sort(unit_ids.begin(), unit_ids.end());
    unit_ids.erase(std::unique(unit_ids.begin(), unit_ids.end()), unit_ids.end());
    std::size_t held = 0;
    std::size_t k = 0;
    std::vector<bool> is_public_unit_example(n, false);
    while (held < n_public && k < unit_ids.size()) {
      const int u = unit_ids[k++];
      for (std::size_t i = 0; i < n; ++i) {
        if (dataset.units[i] == u) {
          is_public_unit_example[i] = true;
          ++held;
        }
      }
    }
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t i = order[pos];
      if (is_public_unit_example[i]) {
        r.public_pool.examples.push_back(dataset.examples[i]);
      } else if (r.test.examples.size() < n_test) {
        r.test.examples.push_back(dataset.examples[i]);
      } else {
        r.train.examples.push_back(dataset.examples[i]);
      }
    }
    return r;
  }

  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t i = order[pos];
    if (pos < n_public) {
      r.public_pool.examples.push_back(dataset.examples[i]);
    } else if (pos < n_public + n_test) {
      r.test.examples.push_back(dataset.examples[i]);
    } else {
      r.train.examples.push_back(dataset.examples[i]);
    }
  }
  return r;
}

Dataset featurize(const std::vector<std::string>& corpus_lines,
                  FeaturizeMode mode, int vocab_size) {
  if (corpus_lines.empty()) throw std::invalid_argument("featurize: empty corpus");
  if (vocab_size < 1) throw std::invalid_argument("featurize: vocab_size must be >= 1");

  // Tokenize, count corpus frequencies, remember first-appearance order.
  std::vector<std::vector<std::string>> docs;
  std::unordered_map<std::string, long> freq;
  std::vector<std::string> first_seen;
  for (const std::string& line : corpus_lines) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) {
      if (freq.find(tok) == freq.end()) first_seen.push_back(tok);
      ++freq[tok];
      toks.push_back(std::move(tok));
    }
    docs.push_back(std::move(toks));
  }
  if (freq.empty()) throw std::invalid_argument("featurize: corpus has no tokens");

  std::stable_sort(first_seen.begin(), first_seen.end(),
                   [&](const std::string& a, const std::string& b) {
                     return freq[a] > freq[b];
                   });
  const int vocab = std::min<int>(vocab_size, static_cast<int>(first_seen.size()));
  std::unordered_map<std::string, std::uint32_t> token_id;
  for (int j = 0; j < vocab; ++j) token_id[first_seen[j]] = static_cast<std::uint32_t>(j);

  Dataset ds;
  ds.d_in = vocab;
  ds.task = Task::kBinary;
  ds.K = 2;
  ds.name = mode == FeaturizeMode::kBow ? "bow" : "tfidf";

  // Raw in-vocabulary counts per document.
  std::vector<std::map<std::uint32_t, double>> counts(docs.size());
  std::vector<double> doc_freq(vocab, 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const std::string& tok : docs[i]) {
      auto it = token_id.find(tok);
      if (it != token_id.end()) counts[i][it->second] += 1.0;
    }
    for (const auto& [j, c] : counts[i]) {
      (void)c;
      doc_freq[j] += 1.0;
    }
  }

  for (std::size_t i = 0; i < docs.size(); ++i) {
    SparseExample ex;
    double doc_len = 0.0;
    for (const auto& [j, c] : counts[i]) doc_len += c;
    for (const auto& [j, c] : counts[i]) {
      double v = c;
      if (mode == FeaturizeMode::kTfidf) {
        v = (c / doc_len) *
            std::log(static_cast<double>(docs.size()) / (1.0 + doc_freq[j]));
      }
      ex.indices.push_back(j);
      ex.values.push_back(v);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::string task_name(Task task) {
  switch (task) {
    case Task::kRegression:
      return "regression";
    case Task::kBinary:
      return "binary";
    case Task::kMulticlass:
      return "multiclass";
    case Task::kAutoencode:
      return "autoencode";
  }
  return "unknown";
}

}  // namespace adadps
