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

#ifndef NEGREC_TESTS_UNIT_HELPERS_HPP_
#define NEGREC_TESTS_UNIT_HELPERS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "negrec/domain.hpp"
#include "negrec/protocol.hpp"

namespace negrec::testing {

// Domain with issues named "a", "b", ... and values "0", "1", ...
inline Domain SmallDomain(std::vector<int> counts, std::string id = "small") {
  std::vector<Issue> issues;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    Issue issue{std::string(1, static_cast<char>('a' + i)), {}};
    for (int v = 0; v < counts[i]; ++v) issue.values.push_back(std::to_string(v));
    issues.push_back(std::move(issue));
  }
  return Domain(std::move(id), std::move(issues));
}

// Offers a fixed sequence (the last bid repeats); optionally accepts at a
// given round.
class Scripted : public Strategy {
 public:
  explicit Scripted(std::vector<Bid> bids, int accept_round = 0,
                    std::string id = "scripted")
      : id_(std::move(id)), bids_(std::move(bids)), accept_round_(accept_round) {}

  const std::string& id() const override { return id_; }
  void Begin(const Domain&, const PreferenceProfile&, int) override {}
  Action Decide(const Observation& obs, Rng&) override {
    if (obs.round == accept_round_) return Action::Accept();
    const std::size_t k =
        std::min<std::size_t>(obs.round - 1, bids_.size() - 1);
    return Action::Offer(bids_[k]);
  }

 private:
  std::string id_;
  std::vector<Bid> bids_;
  int accept_round_;
};

// Accepts whenever there is something to accept.
class AcceptAll : public Strategy {
 public:
  const std::string& id() const override { return id_; }
  void Begin(const Domain&, const PreferenceProfile&, int) override {}
  Action Decide(const Observation& obs, Rng&) override {
    if (obs.opponent_bids.empty()) return Action::Offer(Bid{});
    return Action::Accept();
  }

 private:
  std::string id_ = "accept_all";
};

// Draws a fresh random offer every turn and never accepts.
class RandomNever : public Strategy {
 public:
  const std::string& id() const override { return id_; }
  void Begin(const Domain& domain, const PreferenceProfile&, int) override {
    domain_ = &domain;
  }
  Action Decide(const Observation&, Rng& rng) override {
    return Action::Offer(domain_->RandomBid(rng));
  }

 private:
  std::string id_ = "random_never";
  const Domain* domain_ = nullptr;
};

}  // namespace negrec::testing

#endif  // NEGREC_TESTS_UNIT_HELPERS_HPP_
