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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "adadps/numerics.hpp"

using namespace adadps;

TEST_CASE("l2_norm basics") {
  CHECK(l2_norm({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(l2_norm({}) == 0.0);
  CHECK(l2_norm({0.0, 0.0}) == 0.0);
}

TEST_CASE("weighted_norm") {
  const Vec v = {1.5, -2.0, 0.25};
  CHECK(weighted_norm(v, {1.0, 1.0, 1.0}) == doctest::Approx(l2_norm(v)));
  CHECK(weighted_norm({1.0, 1.0}, {4.0, 9.0}) == doctest::Approx(std::sqrt(13.0)));
  CHECK_THROWS_AS(weighted_norm({1.0}, {-1.0}), std::domain_error);
  CHECK_THROWS_AS(weighted_norm({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("elementwise_div") {
  const Vec out = elementwise_div({4.0, 9.0}, {2.0, 3.0});
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 3.0);
  CHECK_THROWS_AS(elementwise_div({1.0}, {0.0}), std::domain_error);
  CHECK_THROWS_AS(elementwise_div({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("add_scalar") {
  const Vec out = add_scalar({1.0, -1.0}, 0.5);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == -0.5);
}

TEST_CASE("rng determinism: same seed and stream reproduce the sequence") {
  RngStream a(1234, streams::kNoise);
  RngStream b(1234, streams::kNoise);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(1234, streams::kNoise);
  RngStream d(1234, streams::kNoise);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.uniform() == d.uniform());
  }
}

TEST_CASE("rng stream separation: different stream ids differ") {
  RngStream a(1234, streams::kNoise);
  RngStream b(1234, streams::kBatchSampling);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("rng split is independent of parent consumption") {
  RngStream a(77, streams::kData);
  RngStream child1 = a.split(5);
  a.next_u64();
  a.next_u64();
  RngStream child2 = a.split(5);
  CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("uniform lies in [0,1)") {
  RngStream rng(9, streams::kData);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_int range and rough uniformity") {
  RngStream rng(10, streams::kData);
  int counts[7] = {0};
  const int trials = 70000;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t k = rng.uniform_int(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  // ~3.8 sigma binomial band around trials/7 = 10000
  for (int c : counts) {
    CHECK(c > 9600);
    CHECK(c < 10400);
  }
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("normal samples: mean and variance statistical oracle") {
  RngStream rng(42, streams::kNoise);
  const std::size_t n = 1000000;
  const Vec xs = sample_std_normal(rng, n);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1);
  // CLT 3-sigma bounds: mean within 3/sqrt(n) = 0.003, padded to 0.005;
  // variance within ~0.01.
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("check_finite rejects nan and inf") {
  CHECK_NOTHROW(check_finite({0.0, -1e300}, "t"));
  CHECK_THROWS_AS(check_finite({std::nan("")}, "t"), std::invalid_argument);
  CHECK_THROWS_AS(check_finite({INFINITY}, "t"), std::invalid_argument);
}
