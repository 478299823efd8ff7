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

// The detector strategy and the labeled opponent pool.

#ifndef NEGREC_STRATEGIES_HPP_
#define NEGREC_STRATEGIES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "negrec/domain.hpp"
#include "negrec/opponent_model.hpp"
#include "negrec/protocol.hpp"

namespace negrec {

// u_min + (u_max - u_min) * (1 - t^(1/e)). e < 1 concedes late (Boulware),
// e > 1 concedes early (Conceder). Throws ArgumentError for e <= 0, t outside
// [0, 1], or bounds outside 0 <= u_min <= u_max <= 1.
double TimeDependentTarget(double t, double u_min, double u_max, double e);

// All outcomes of a domain ordered by one profile's utility (ties by outcome
// index). Domains above kEnumerationCap are represented by a fixed uniform
// sample of kOppositionSamples outcomes plus the best bid.
class UtilityLadder {
 public:
  struct Entry {
    double utility;
    Bid bid;
  };

  UtilityLadder(const Domain& domain, const PreferenceProfile& profile);

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& best() const { return entries_.back(); }
  const Entry& worst() const { return entries_.front(); }

  // Index range [first, last) of entries with lo <= utility <= hi.
  std::pair<std::size_t, std::size_t> Range(double lo, double hi) const;

  // Uniformly random bid with utility in [target, target + width]. Falls
  // back to the least-utility bid above target, then to the best bid.
  const Bid& NearTarget(double target, double width, Rng& rng) const;

  // Bid whose utility is closest to target; ties towards higher utility.
  const Entry& Closest(double target) const;

 private:
  std::vector<Entry> entries_;
};

using StrategyParams = std::map<std::string, double>;

// Pure description of a strategy; MakeStrategy builds per-session instances.
struct StrategySpec {
  std::string id;
  std::string kind;
  StrategyParams params;

  bool operator==(const StrategySpec&) const = default;
};

// The ten opponent strategies, in label order. Parameters are fixed:
//   random_counter        uniform random offers
//   boulware              time-dependent, e = 0.2
//   conceder              time-dependent, e = 2
//   hardliner             always its best bid
//   linear                time-dependent, e = 1
//   tit_for_tat_relative  reciprocates total concession, kappa = 0.6,
//                         opening concession 0.05
//   behavior_mirror       mirrors each detector step, gain 1.5; probes
//                         0.01 per round until the detector moves
//   boulware_jittered     boulware with +-0.08 target noise
//   stepped_concession    drops 0.1 every 20 rounds
//   meta_switcher         boulware / conceder, switching every 20 rounds
// Every pool member accepts iff the incoming offer is worth at least as much
// as the offer it would make next.
std::vector<StrategySpec> DefaultPool();

// Specs from DefaultPool() with the given ids, in the order given. Throws
// ArgumentError on unknown or duplicate ids.
std::vector<StrategySpec> PoolSubset(std::span<const std::string> ids);

std::vector<std::string> PoolLabels(std::span<const StrategySpec> pool);

// Throws ArgumentError for an unknown kind.
std::unique_ptr<Strategy> MakeStrategy(const StrategySpec& spec);

nlohmann::json PoolManifest(std::span<const StrategySpec> pool);
std::vector<StrategySpec> PoolFromManifest(const nlohmann::json& j);
std::string ManifestHash(std::span<const StrategySpec> pool);

// The detector: nice tit-for-tat with frequency-model bid targeting.
//
// Round 1 offers the detector's best bid. Later rounds aim at own utility
// 1 - kappa * max(0, U_M(latest O bid) - U_M(first O bid)) and offer, among
// bids within +-window of that target, the one the opponent model rates
// highest. Accepts iff the incoming offer is worth at least the planned
// offer and at least the current target.
class NiceTitForTat : public Strategy {
 public:
  static constexpr double kDefaultKappa = 1.0;
  static constexpr double kDefaultWindow = 0.025;

  explicit NiceTitForTat(double kappa = kDefaultKappa,
                         double window = kDefaultWindow);

  const std::string& id() const override { return id_; }
  void Begin(const Domain& domain, const PreferenceProfile& profile,
             int deadline) override;
  Action Decide(const Observation& obs, Rng& rng) override;

  double last_target() const { return target_; }
  const FrequencyModel& opponent_model() const { return *model_; }

 private:
  std::string id_ = "nice_tit_for_tat";
  double kappa_;
  double window_;
  double target_ = 1.0;
  const PreferenceProfile* profile_ = nullptr;
  std::unique_ptr<UtilityLadder> ladder_;
  std::unique_ptr<FrequencyModel> model_;
  std::size_t seen_ = 0;
};

}  // namespace negrec

#endif  // NEGREC_STRATEGIES_HPP_
