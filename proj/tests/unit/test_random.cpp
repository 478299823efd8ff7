// Copyright 2026 The negrec Authors
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


#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "negrec/errors.hpp"
#include "negrec/parallel.hpp"
#include "negrec/random.hpp"

namespace negrec {
namespace {

TEST_CASE("rng is deterministic in its seed") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.Next();
    CHECK(x == b.Next());
    differs = differs || x != c.Next();
  }
  CHECK(differs);
}

TEST_CASE("uniform draws stay in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.UniformInt(7) < 7);
  }
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(3);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.Shuffle(v);
  CHECK(std::set<int>(v.begin(), v.end()).size() == 50);
}

TEST_CASE("derived seeds depend on every tag") {
  CHECK(DeriveSeed(1, {2, 3}) == DeriveSeed(1, {2, 3}));
  CHECK(DeriveSeed(1, {2, 3}) != DeriveSeed(1, {3, 2}));
  CHECK(DeriveSeed(1, {2}) != DeriveSeed(2, {2}));
  CHECK(HashHex(0xabc).size() == 16);
  CHECK(HashHex(0xabc) == "0000000000000abc");
  // Published FNV-1a 64 test vector.
  CHECK(Fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("parallel_for fills every slot and rethrows the lowest failure") {
  std::vector<int> out(1000, 0);
  ParallelFor(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (int i = 0; i < 1000; ++i) CHECK(out[i] == 2 * i);
  try {
    ParallelFor(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
  CHECK(ThreadCount() >= 1);
}

TEST_CASE("thread count override") {
  ::setenv("NEGREC_THREADS", "3", 1);
  CHECK(ThreadCount() == 3);
  for (const char* bad : {"0", "-2", "abc", "4x", ""}) {
    ::setenv("NEGREC_THREADS", bad, 1);
    CHECK_THROWS_AS(ThreadCount(), ConfigError);
  }
  ::unsetenv("NEGREC_THREADS");
  CHECK(ThreadCount() >= 1);
}

}  // namespace
}  // namespace negrec
