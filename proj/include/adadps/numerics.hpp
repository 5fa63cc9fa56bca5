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
#include <random>
#include <vector>

namespace adadps {

// Dense 64-bit float vector; all model-sized quantities (parameters,
// gradients, preconditioners, noise) live in this type.
using Vec = std::vector<double>;

// Deterministic, domain-separated random stream. Identical (seed, stream_id)
// reproduces the identical sample sequence on any platform: the engine is
// std::mt19937_64 (fully specified by the standard) and all derived draws
// (uniform doubles, normals, integer ranges) are implemented here rather
// than via implementation-defined <random> distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  // Uniform integer in [0, n), n >= 1. Rejection-sampled, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (pairs cached).
  double normal();

  // Derives an independent stream keyed by child_id without consuming
  // this one; used for per-(device, round) and per-seed sub-streams.
  RngStream split(std::uint64_t child_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fixed stream ids so that toggling one consumer (e.g. noise) never
// perturbs the draws seen by another (e.g. batch sampling).
namespace streams {
inline constexpr std::uint64_t kData = 0;
inline constexpr std::uint64_t kBatchSampling = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kPublicSampling = 3;
}  // namespace streams

// Elementwise u / v. Throws std::invalid_argument on length mismatch and
// std::domain_error when any v_j == 0.
Vec elementwise_div(const Vec& u, const Vec& v);

// v + a in every coordinate.
Vec add_scalar(const Vec& v, double a);

double l2_norm(const Vec& v);

// sqrt(sum_j m_j * v_j^2); diagonal weighted norm, m_j >= 0 required.
double weighted_norm(const Vec& v, const Vec& m);

// d i.i.d. standard normal draws from the stream.
Vec sample_std_normal(RngStream& rng, std::size_t d);

// Throws std::invalid_argument unless every entry is finite.
void check_finite(const Vec& v, const char* what);

void check_same_length(const Vec& u, const Vec& v, const char* what);

}  // namespace adadps
