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

// Multi-issue negotiation domains and linear-additive preference profiles.

#ifndef NEGREC_DOMAIN_HPP_
#define NEGREC_DOMAIN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "negrec/random.hpp"

namespace negrec {

// One value index per issue, in domain issue order.
using Bid = std::vector<int>;

struct Issue {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const Issue&) const = default;
};

// An ordered list of discrete issues. Immutable after construction.
class Domain {
 public:
  // Throws ArgumentError unless there is at least one issue, every issue has
  // at least two values, and value labels are unique within each issue.
  Domain(std::string id, std::vector<Issue> issues);

  const std::string& id() const { return id_; }
  const std::vector<Issue>& issues() const { return issues_; }
  std::size_t num_issues() const { return issues_.size(); }
  int num_values(std::size_t issue) const {
    return static_cast<int>(issues_[issue].values.size());
  }
  std::vector<int> values_per_issue() const;

  // Product of the per-issue value counts, saturating at UINT64_MAX.
  std::uint64_t OutcomeSpaceSize() const;

  bool IsValid(const Bid& bid) const;
  // Throws StructuralError if `bid` is not an outcome of this domain.
  void CheckBid(const Bid& bid) const;

  // Mixed-radix indexing of the outcome space; the last issue varies fastest.
  Bid BidAt(std::uint64_t index) const;
  std::uint64_t IndexOf(const Bid& bid) const;

  // Uniform over the outcome space.
  Bid RandomBid(Rng& rng) const;

  bool operator==(const Domain&) const = default;

 private:
  std::string id_;
  std::vector<Issue> issues_;
};

// U(w) = sum_i w_i * e_i(w_i). Weights are non-negative and sum to one; each
// evaluation table lies in [0, 1] and attains 1 somewhere.
class PreferenceProfile {
 public:
  // Throws ArgumentError when the invariants above do not hold.
  PreferenceProfile(std::string id, std::vector<double> weights,
                    std::vector<std::vector<double>> evaluations);

  const std::string& id() const { return id_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& evaluations() const {
    return evaluations_;
  }
  std::size_t num_issues() const { return weights_.size(); }

  // Throws StructuralError when the profile's shape differs from `domain`.
  void CheckCompatible(const Domain& domain) const;

  // Throws StructuralError if the bid does not fit the profile's shape.
  double Utility(const Bid& bid) const;

  // Picks the first value with evaluation 1 in every issue.
  Bid BestBid() const;

  bool operator==(const PreferenceProfile&) const = default;

 private:
  std::string id_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> evaluations_;
};

inline double EvaluateUtility(const PreferenceProfile& profile,
                              const Bid& bid) {
  return profile.Utility(bid);
}

inline constexpr std::uint64_t kEnumerationCap = 1'000'000;
inline constexpr std::uint64_t kOppositionSamples = 100'000;

// Minimum Euclidean distance from (U_M(w), U_O(w)) to (1, 1) over the full
// outcome space. Throws EnumerationLimitError above kEnumerationCap outcomes;
// use EstimateOpposition for those.
double Opposition(const Domain& domain, const PreferenceProfile& mine,
                  const PreferenceProfile& theirs);

struct OppositionEstimate {
  double value = 0.0;
  bool approximate = false;
};

// Exact below the enumeration cap, otherwise the minimum over
// kOppositionSamples uniformly drawn outcomes.
OppositionEstimate EstimateOpposition(const Domain& domain,
                                      const PreferenceProfile& mine,
                                      const PreferenceProfile& theirs,
                                      std::uint64_t seed);

// Synthetic domain; value labels are "i{k}v{j}". The seed only names the
// domain when `id` is empty.
Domain GenerateDomain(int n_issues, std::span<const int> values_per_issue,
                      std::uint64_t seed, std::string id = "");

// Random profile: weights uniform in [0.1, 1] then normalized; each issue's
// evaluations are a permutation of {1/n, 2/n, ..., 1}.
PreferenceProfile GenerateProfile(const Domain& domain, std::uint64_t seed,
                                  std::string id = "");

// Stand-ins sized like the four evaluation domains: "bank" <3,18>,
// "car" <4,240>, "uni" <5,11250>, "tram" <7,972>.
std::vector<int> PresetValueCounts(std::string_view name);
Domain PresetDomain(std::string_view name, std::uint64_t seed = 0);
const std::vector<std::string>& PresetNames();

nlohmann::json ToJson(const Domain& domain);
Domain DomainFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const PreferenceProfile& profile);
PreferenceProfile ProfileFromJson(const nlohmann::json& j);

}  // namespace negrec

#endif  // NEGREC_DOMAIN_HPP_
