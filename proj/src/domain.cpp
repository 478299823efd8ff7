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

#include "negrec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>

#include "negrec/errors.hpp"

namespace negrec {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw StructuralError("not a decimal number: '" + s + "'");
  }
  return v;
}

// Distance of the joint utility point to (1, 1).
inline double DistanceToIdeal(double um, double uo) {
  const double a = 1.0 - um;
  const double b = 1.0 - uo;
  return std::sqrt(a * a + b * b);
}

}  // namespace

Domain::Domain(std::string id, std::vector<Issue> issues)
    : id_(std::move(id)), issues_(std::move(issues)) {
  if (issues_.empty()) throw ArgumentError("domain needs at least one issue");
  for (const Issue& issue : issues_) {
    if (issue.values.size() < 2) {
      throw ArgumentError("issue '" + issue.name +
                          "' needs at least two values");
    }
    std::set<std::string> seen(issue.values.begin(), issue.values.end());
    if (seen.size() != issue.values.size()) {
      throw ArgumentError("duplicate value label in issue '" + issue.name +
                          "'");
    }
  }
}

std::vector<int> Domain::values_per_issue() const {
  std::vector<int> out;
  out.reserve(issues_.size());
  for (std::size_t i = 0; i < issues_.size(); ++i) out.push_back(num_values(i));
  return out;
}

std::uint64_t Domain::OutcomeSpaceSize() const {
  std::uint64_t size = 1;
  for (const Issue& issue : issues_) {
    const std::uint64_t n = issue.values.size();
    if (size > std::numeric_limits<std::uint64_t>::max() / n) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    size *= n;
  }
  return size;
}

bool Domain::IsValid(const Bid& bid) const {
  if (bid.size() != issues_.size()) return false;
  for (std::size_t i = 0; i < bid.size(); ++i) {
    if (bid[i] < 0 || bid[i] >= num_values(i)) return false;
  }
  return true;
}

void Domain::CheckBid(const Bid& bid) const {
  if (!IsValid(bid)) {
    throw StructuralError("bid is not an outcome of domain '" + id_ + "'");
  }
}

Bid Domain::BidAt(std::uint64_t index) const {
  Bid bid(issues_.size());
  for (std::size_t i = issues_.size(); i-- > 0;) {
    const auto n = static_cast<std::uint64_t>(num_values(i));
    bid[i] = static_cast<int>(index % n);
    index /= n;
  }
  return bid;
}

std::uint64_t Domain::IndexOf(const Bid& bid) const {
  CheckBid(bid);
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < issues_.size(); ++i) {
    index = index * static_cast<std::uint64_t>(num_values(i)) +
            static_cast<std::uint64_t>(bid[i]);
  }
  return index;
}

Bid Domain::RandomBid(Rng& rng) const {
  Bid bid(issues_.size());
  for (std::size_t i = 0; i < issues_.size(); ++i) {
    bid[i] = static_cast<int>(rng.UniformInt(num_values(i)));
  }
  return bid;
}

PreferenceProfile::PreferenceProfile(
    std::string id, std::vector<double> weights,
    std::vector<std::vector<double>> evaluations)
    : id_(std::move(id)),
      weights_(std::move(weights)),
      evaluations_(std::move(evaluations)) {
  if (weights_.empty() || weights_.size() != evaluations_.size()) {
    throw ArgumentError("profile needs one weight and one table per issue");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ArgumentError("issue weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ArgumentError("issue weights must sum to 1");
  }
  for (const auto& table : evaluations_) {
    if (table.size() < 2) {
      throw ArgumentError("evaluation table needs at least two values");
    }
    bool has_one = false;
    for (double e : table) {
      if (!(e >= 0.0 && e <= 1.0)) {
        throw ArgumentError("evaluations must lie in [0, 1]");
      }
      has_one = has_one || e == 1.0;
    }
    if (!has_one) {
      throw ArgumentError("every issue needs a value with evaluation 1");
    }
  }
}

void PreferenceProfile::CheckCompatible(const Domain& domain) const {
  if (domain.num_issues() != num_issues()) {
    throw StructuralError("profile '" + id_ + "' has " +
                          std::to_string(num_issues()) + " issues, domain '" +
                          domain.id() + "' has " +
                          std::to_string(domain.num_issues()));
  }
  for (std::size_t i = 0; i < num_issues(); ++i) {
    if (static_cast<int>(evaluations_[i].size()) != domain.num_values(i)) {
      throw StructuralError("profile '" + id_ +
                            "' value count mismatch on issue " +
                            std::to_string(i));
    }
  }
}

double PreferenceProfile::Utility(const Bid& bid) const {
  if (bid.size() != weights_.size()) {
    throw StructuralError("bid has " + std::to_string(bid.size()) +
                          " issues, profile '" + id_ + "' expects " +
                          std::to_string(weights_.size()));
  }
  double u = 0.0;
  for (std::size_t i = 0; i < bid.size(); ++i) {
    const auto& table = evaluations_[i];
    if (bid[i] < 0 || bid[i] >= static_cast<int>(table.size())) {
      throw StructuralError("bid value index out of range on issue " +
                            std::to_string(i));
    }
    u += weights_[i] * table[bid[i]];
  }
  return u;
}

Bid PreferenceProfile::BestBid() const {
  Bid bid(num_issues());
  for (std::size_t i = 0; i < num_issues(); ++i) {
    const auto& t = evaluations_[i];
    bid[i] = static_cast<int>(std::find(t.begin(), t.end(), 1.0) - t.begin());
  }
  return bid;
}

double Opposition(const Domain& domain, const PreferenceProfile& mine,
                  const PreferenceProfile& theirs) {
  mine.CheckCompatible(domain);
  theirs.CheckCompatible(domain);
  const std::uint64_t size = domain.OutcomeSpaceSize();
  if (size > kEnumerationCap) {
    throw EnumerationLimitError(
        "outcome space of '" + domain.id() + "' has more than " +
        std::to_string(kEnumerationCap) +
        " outcomes; use EstimateOpposition (sampling mode)");
  }
  // Odometer walk over the outcome space.
  const std::size_t n = domain.num_issues();
  Bid bid(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < size; ++k) {
    best = std::min(best, DistanceToIdeal(mine.Utility(bid),
                                          theirs.Utility(bid)));
    for (std::size_t i = n; i-- > 0;) {
      if (++bid[i] < domain.num_values(i)) break;
      bid[i] = 0;
    }
  }
  return best;
}

OppositionEstimate EstimateOpposition(const Domain& domain,
                                      const PreferenceProfile& mine,
                                      const PreferenceProfile& theirs,
                                      std::uint64_t seed) {
  if (domain.OutcomeSpaceSize() <= kEnumerationCap) {
    return {Opposition(domain, mine, theirs), false};
  }
  mine.CheckCompatible(domain);
  theirs.CheckCompatible(domain);
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < kOppositionSamples; ++k) {
    const Bid bid = domain.RandomBid(rng);
    best = std::min(best,
                    DistanceToIdeal(mine.Utility(bid), theirs.Utility(bid)));
  }
  return {best, true};
}

Domain GenerateDomain(int n_issues, std::span<const int> values_per_issue,
                      std::uint64_t seed, std::string id) {
  if (n_issues < 1) throw ArgumentError("n_issues must be at least 1");
  if (values_per_issue.size() != static_cast<std::size_t>(n_issues)) {
    throw ArgumentError("values_per_issue must have n_issues entries");
  }
  std::vector<Issue> issues;
  issues.reserve(n_issues);
  for (int k = 0; k < n_issues; ++k) {
    const int count = values_per_issue[k];
    if (count < 2) throw ArgumentError("every issue needs at least 2 values");
    Issue issue;
    issue.name = "issue" + std::to_string(k);
    for (int j = 0; j < count; ++j) {
      issue.values.push_back("i" + std::to_string(k) + "v" + std::to_string(j));
    }
    issues.push_back(std::move(issue));
  }
  if (id.empty()) id = "synthetic-" + HashHex(DeriveSeed(seed, {1}));
  return Domain(std::move(id), std::move(issues));
}

PreferenceProfile GenerateProfile(const Domain& domain, std::uint64_t seed,
                                  std::string id) {
  Rng rng(DeriveSeed(seed, {HashTag("profile")}));
  const std::size_t n = domain.num_issues();
  std::vector<double> weights(n);
  double sum = 0.0;
  for (double& w : weights) {
    w = rng.Uniform(0.1, 1.0);
    sum += w;
  }
  for (double& w : weights) w /= sum;

  std::vector<std::vector<double>> evaluations(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int count = domain.num_values(i);
    std::vector<double> levels(count);
    for (int j = 0; j < count; ++j) {
      levels[j] = static_cast<double>(j + 1) / count;
    }
    levels.back() = 1.0;
    rng.Shuffle(levels);
    evaluations[i] = std::move(levels);
  }
  if (id.empty()) id = "profile-" + HashHex(DeriveSeed(seed, {2}));
  return PreferenceProfile(std::move(id), std::move(weights),
                           std::move(evaluations));
}

std::vector<int> PresetValueCounts(std::string_view name) {
  if (name == "bank") return {3, 3, 2};
  if (name == "car") return {4, 4, 5, 3};
  if (name == "uni") return {5, 5, 5, 9, 10};
  if (name == "tram") return {3, 3, 3, 3, 3, 2, 2};
  throw ArgumentError("unknown preset domain '" + std::string(name) + "'");
}

Domain PresetDomain(std::string_view name, std::uint64_t seed) {
  const std::vector<int> counts = PresetValueCounts(name);
  return GenerateDomain(static_cast<int>(counts.size()), counts, seed,
                        std::string(name));
}

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> kNames = {"bank", "car", "uni",
                                                  "tram"};
  return kNames;
}

nlohmann::json ToJson(const Domain& domain) {
  nlohmann::json issues = nlohmann::json::array();
  for (const Issue& issue : domain.issues()) {
    issues.push_back({{"name", issue.name}, {"values", issue.values}});
  }
  return {{"id", domain.id()}, {"issues", std::move(issues)}};
}

Domain DomainFromJson(const nlohmann::json& j) {
  try {
    std::vector<Issue> issues;
    for (const auto& ji : j.at("issues")) {
      issues.push_back({ji.at("name").get<std::string>(),
                        ji.at("values").get<std::vector<std::string>>()});
    }
    return Domain(j.at("id").get<std::string>(), std::move(issues));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed domain JSON: ") + e.what());
  }
}

nlohmann::json ToJson(const PreferenceProfile& profile) {
  nlohmann::json weights = nlohmann::json::array();
  for (double w : profile.weights()) weights.push_back(FormatDouble(w));
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : profile.evaluations()) {
    nlohmann::json row = nlohmann::json::array();
    for (double e : table) row.push_back(FormatDouble(e));
    tables.push_back(std::move(row));
  }
  return {{"id", profile.id()},
          {"weights", std::move(weights)},
          {"evaluations", std::move(tables)}};
}

PreferenceProfile ProfileFromJson(const nlohmann::json& j) {
  try {
    std::vector<double> weights;
    for (const auto& w : j.at("weights")) weights.push_back(ParseDouble(w));
    std::vector<std::vector<double>> tables;
    for (const auto& row : j.at("evaluations")) {
      std::vector<double>& table = tables.emplace_back();
      for (const auto& e : row) table.push_back(ParseDouble(e));
    }
    return PreferenceProfile(j.at("id").get<std::string>(), std::move(weights),
                             std::move(tables));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed profile JSON: ") + e.what());
  }
}

}  // namespace negrec
