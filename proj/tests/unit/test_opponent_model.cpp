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


#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "negrec/errors.hpp"
#include "negrec/opponent_model.hpp"
#include "negrec/random.hpp"

namespace negrec {
namespace {

using testing::SmallDomain;

// Re-counts the raw offer list and evaluates the frequency formula directly.
double SfmOracle(const std::vector<Bid>& offers, const Bid& bid,
                 std::size_t n_issues) {
  if (offers.empty()) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n_issues; ++i) {
    std::map<int, int> counts;
    for (const Bid& o : offers) ++counts[o[i]];
    int c_max = 0, c_sum = 0;
    for (const auto& [v, c] : counts) {
      c_max = std::max(c_max, c);
      c_sum += c;
    }
    const double w = static_cast<double>(c_max) / c_sum;
    const auto it = counts.find(bid[i]);
    const double e = it == counts.end() ? 0.0 : static_cast<double>(it->second) / c_max;
    num += w * e;
    den += w;
  }
  return num / den;
}

TEST_CASE("update counts") {
  const Domain d = SmallDomain({2, 2});
  FrequencyModel m(d);
  m.Update({0, 0});
  CHECK(m.count(0, 0) == 1);
  CHECK(m.count(1, 0) == 1);
  CHECK(m.count(0, 1) == 0);
  CHECK(m.count(1, 1) == 0);
  m.Update({0, 0});
  CHECK(m.count(0, 0) == 2);
  CHECK(m.count(1, 0) == 2);
  CHECK(m.observed() == 2);
  CHECK_THROWS_AS(m.Update({0}), StructuralError);
  CHECK_THROWS_AS(m.Update({0, 2}), StructuralError);
}

TEST_CASE("update order does not matter") {
  const Domain d = SmallDomain({2, 2});
  FrequencyModel a(d), b(d);
  a.Update({0, 0});
  a.Update({1, 1});
  b.Update({1, 1});
  b.Update({0, 0});
  CHECK(a == b);
}

TEST_CASE("estimate_utility hand examples") {
  const Domain d = SmallDomain({2, 2});
  FrequencyModel m(d);
  CHECK(m.EstimateUtility({0, 0}) == 0.0);
  m.Update({1, 0});
  CHECK(m.EstimateUtility({1, 0}) == 1.0);

  FrequencyModel h(d);
  // a = 0, b = 1 on issue one; x = 0, y = 1 on issue two.
  h.Update({0, 0});
  h.Update({0, 1});
  h.Update({1, 0});
  CHECK(h.EstimateUtility({0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.EstimateUtility({1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("estimate_utility matches the brute-force oracle") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(1000 + s);
    const int n = 1 + static_cast<int>(rng.UniformInt(6));
    std::vector<int> counts;
    for (int i = 0; i < n; ++i) counts.push_back(2 + static_cast<int>(rng.UniformInt(6)));
    const Domain d = GenerateDomain(n, counts, s);
    for (int seq = 0; seq < 10; ++seq) {
      FrequencyModel m(d);
      std::vector<Bid> offers;
      const int len = 1 + static_cast<int>(rng.UniformInt(100));
      for (int k = 0; k < len; ++k) {
        offers.push_back(d.RandomBid(rng));
        m.Update(offers.back());
      }
      for (int q = 0; q < 20; ++q) {
        const Bid bid = d.RandomBid(rng);
        const double got = m.EstimateUtility(bid);
        CHECK(std::abs(got - SfmOracle(offers, bid, d.num_issues())) < 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
      }
    }
  }
}

TEST_CASE("utility is one exactly on argmax-count bids") {
  const Domain d = SmallDomain({3, 3});
  FrequencyModel m(d);
  for (const Bid& b : std::vector<Bid>{{0, 1}, {0, 2}, {1, 1}, {2, 2}}) m.Update(b);
  // Issue one argmax {0}; issue two argmax {1, 2}.
  CHECK(m.EstimateUtility({0, 1}) == 1.0);
  CHECK(m.EstimateUtility({0, 2}) == 1.0);
  CHECK(m.EstimateUtility({1, 1}) < 1.0);
  CHECK(m.EstimateUtility({0, 0}) < 1.0);
}

TEST_CASE("a more frequent value never lowers the estimate") {
  Rng rng(5);
  const std::vector<int> counts = {4, 4, 4};
  const Domain d = GenerateDomain(3, counts, 0);
  FrequencyModel m(d);
  for (int k = 0; k < 40; ++k) m.Update(d.RandomBid(rng));
  for (int q = 0; q < 200; ++q) {
    Bid bid = d.RandomBid(rng);
    const std::size_t i = rng.UniformInt(3);
    for (int v = 0; v < 4; ++v) {
      if (m.count(i, v) <= m.count(i, bid[i])) continue;
      Bid better = bid;
      better[i] = v;
      CHECK(m.EstimateUtility(better) >= m.EstimateUtility(bid));
    }
  }
}

}  // namespace
}  // namespace negrec
