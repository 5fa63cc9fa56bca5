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

#include "adadps/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adadps {

namespace {

// splitmix64; mixes (seed, stream_id) into a well-distributed engine seed.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(mix64(mix64(seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be >= 1");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0,1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

RngStream RngStream::split(std::uint64_t child_id) const {
  return RngStream(mix64(seed_) ^ mix64(child_id + 0x9e6c63d0876a9a47ULL),
                   stream_id_);
}

void check_finite(const Vec& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

void check_same_length(const Vec& u, const Vec& v, const char* what) {
  if (u.size() != v.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
  }
}

Vec elementwise_div(const Vec& u, const Vec& v) {
  check_same_length(u, v, "elementwise_div");
  Vec out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (v[j] == 0.0) throw std::domain_error("elementwise_div: zero divisor");
    out[j] = u[j] / v[j];
  }
  return out;
}

Vec add_scalar(const Vec& v, double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("add_scalar: scalar must be finite");
  }
  Vec out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] + a;
  return out;
}

double l2_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double weighted_norm(const Vec& v, const Vec& m) {
  check_same_length(v, m, "weighted_norm");
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (m[j] < 0.0) throw std::domain_error("weighted_norm: negative weight");
    s += m[j] * v[j] * v[j];
  }
  return std::sqrt(s);
}

Vec sample_std_normal(RngStream& rng, std::size_t d) {
  if (d < 1) throw std::invalid_argument("sample_std_normal: d must be >= 1");
  Vec out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = rng.normal();
  return out;
}

}  // namespace adadps
