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

#include "negrec/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "negrec/errors.hpp"

namespace negrec {

double TimeDependentTarget(double t, double u_min, double u_max, double e) {
  if (!(e > 0.0)) throw ArgumentError("concession exponent e must be > 0");
  if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("t must lie in [0, 1]");
  if (!(u_min >= 0.0 && u_min <= u_max && u_max <= 1.0)) {
    throw ArgumentError("need 0 <= u_min <= u_max <= 1");
  }
  return u_min + (u_max - u_min) * (1.0 - std::pow(t, 1.0 / e));
}

UtilityLadder::UtilityLadder(const Domain& domain,
                             const PreferenceProfile& profile) {
  profile.CheckCompatible(domain);
  const std::uint64_t size = domain.OutcomeSpaceSize();
  if (size <= kEnumerationCap) {
    entries_.reserve(size);
    for (std::uint64_t k = 0; k < size; ++k) {
      Bid bid = domain.BidAt(k);
      const double u = profile.Utility(bid);
      entries_.push_back({u, std::move(bid)});
    }
  } else {
    Rng rng(DeriveSeed(Fnv1a(domain.id()), {Fnv1a(profile.id())}));
    entries_.reserve(kOppositionSamples + 1);
    for (std::uint64_t k = 0; k < kOppositionSamples; ++k) {
      Bid bid = domain.RandomBid(rng);
      const double u = profile.Utility(bid);
      entries_.push_back({u, std::move(bid)});
    }
    Bid best = profile.BestBid();
    entries_.push_back({profile.Utility(best), std::move(best)});
  }
  // Stable sort keeps outcome-index order among equal utilities.
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.utility < b.utility;
                   });
}

std::pair<std::size_t, std::size_t> UtilityLadder::Range(double lo,
                                                         double hi) const {
  auto first = std::lower_bound(
      entries_.begin(), entries_.end(), lo,
      [](const Entry& e, double v) { return e.utility < v; });
  auto last = std::upper_bound(
      first, entries_.end(), hi,
      [](double v, const Entry& e) { return v < e.utility; });
  return {static_cast<std::size_t>(first - entries_.begin()),
          static_cast<std::size_t>(last - entries_.begin())};
}

const Bid& UtilityLadder::NearTarget(double target, double width,
                                     Rng& rng) const {
  const auto [first, last] = Range(target, target + width);
  if (first < last) return entries_[first + rng.UniformInt(last - first)].bid;
  if (first < entries_.size()) return entries_[first].bid;
  return best().bid;
}

const UtilityLadder::Entry& UtilityLadder::Closest(double target) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), target,
      [](const Entry& e, double v) { return e.utility < v; });
  if (it == entries_.end()) return entries_.back();
  if (it == entries_.begin()) return *it;
  const auto below = std::prev(it);
  return (target - below->utility) < (it->utility - target) ? *below : *it;
}

namespace {

double Param(const StrategySpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw ArgumentError("strategy '" + spec.id + "' lacks parameter '" + key +
                        "'");
  }
  return it->second;
}

// Shared plumbing: a plan for the next offer and accept-if-at-least-as-good.
class PoolStrategy : public Strategy {
 public:
  explicit PoolStrategy(const StrategySpec& spec) : id_(spec.id) {}

  const std::string& id() const override { return id_; }

  void Begin(const Domain& domain, const PreferenceProfile& profile,
             int deadline) override {
    domain_ = &domain;
    profile_ = &profile;
    deadline_ = deadline;
    ladder_ = std::make_unique<UtilityLadder>(domain, profile);
    OnBegin();
  }

  Action Decide(const Observation& obs, Rng& rng) override {
    Bid plan = Plan(obs, rng);
    if (const Bid* incoming = obs.last_opponent_bid()) {
      if (profile_->Utility(*incoming) >= profile_->Utility(plan)) {
        return Action::Accept();
      }
    }
    return Action::Offer(std::move(plan));
  }

 protected:
  virtual void OnBegin() {}
  virtual Bid Plan(const Observation& obs, Rng& rng) = 0;

  double Own(const Bid& bid) const { return profile_->Utility(bid); }

  const Domain* domain_ = nullptr;
  const PreferenceProfile* profile_ = nullptr;
  int deadline_ = 1;
  std::unique_ptr<UtilityLadder> ladder_;

 private:
  std::string id_;
};

class RandomCounter : public PoolStrategy {
 public:
  using PoolStrategy::PoolStrategy;

 protected:
  Bid Plan(const Observation&, Rng& rng) override {
    return domain_->RandomBid(rng);
  }
};

class Hardliner : public PoolStrategy {
 public:
  using PoolStrategy::PoolStrategy;

 protected:
  Bid Plan(const Observation&, Rng&) override { return ladder_->best().bid; }
};

class TimeDependent : public PoolStrategy {
 public:
  explicit TimeDependent(const StrategySpec& spec)
      : PoolStrategy(spec),
        e_(Param(spec, "e")),
        u_min_(Param(spec, "u_min")),
        window_(Param(spec, "window")),
        jitter_(spec.params.contains("jitter") ? Param(spec, "jitter") : 0.0) {
  }

 protected:
  Bid Plan(const Observation& obs, Rng& rng) override {
    double target = TimeDependentTarget(obs.time(), u_min_, 1.0, e_);
    if (jitter_ > 0.0) {
      target = std::clamp(target + rng.Uniform(-jitter_, jitter_), 0.0, 1.0);
    }
    return ladder_->NearTarget(target, window_, rng);
  }

 private:
  double e_;
  double u_min_;
  double window_;
  double jitter_;
};

// Reciprocates the detector's total concession, measured in own utility.
class TitForTatRelative : public PoolStrategy {
 public:
  explicit TitForTatRelative(const StrategySpec& spec)
      : PoolStrategy(spec),
        kappa_(Param(spec, "kappa")),
        opening_(Param(spec, "opening")),
        u_min_(Param(spec, "u_min")),
        window_(Param(spec, "window")) {}

 protected:
  Bid Plan(const Observation& obs, Rng& rng) override {
    double conceded = 0.0;
    if (!obs.opponent_bids.empty()) {
      conceded = Own(obs.opponent_bids.back()) - Own(obs.opponent_bids.front());
    }
    const double target =
        std::max(u_min_, 1.0 - opening_ - kappa_ * std::max(0.0, conceded));
    return ladder_->NearTarget(target, window_, rng);
  }

 private:
  double kappa_;
  double opening_;
  double u_min_;
  double window_;
};

// Mirrors every detector step (in own utility) with a gain, including
// retractions, and offers the bid closest to the running target. Until the
// detector first moves it probes with a small concession each round.
class BehaviorMirror : public PoolStrategy {
 public:
  explicit BehaviorMirror(const StrategySpec& spec)
      : PoolStrategy(spec),
        gain_(Param(spec, "gain")),
        probe_(Param(spec, "probe")),
        u_min_(Param(spec, "u_min")) {}

 protected:
  void OnBegin() override {
    target_ = 1.0;
    seen_ = 0;
    moved_ = false;
  }

  Bid Plan(const Observation& obs, Rng&) override {
    const auto& theirs = obs.opponent_bids;
    for (; seen_ < theirs.size(); ++seen_) {
      if (seen_ == 0) continue;
      const double step = Own(theirs[seen_]) - Own(theirs[seen_ - 1]);
      if (step != 0.0) moved_ = true;
      target_ = std::clamp(target_ - gain_ * step, u_min_, 1.0);
    }
    if (!moved_ && obs.round > 1) {
      target_ = std::clamp(target_ - probe_, u_min_, 1.0);
    }
    return ladder_->Closest(target_).bid;
  }

 private:
  double gain_;
  double probe_;
  double u_min_;
  double target_ = 1.0;
  std::size_t seen_ = 0;
  bool moved_ = false;
};

class SteppedConcession : public PoolStrategy {
 public:
  explicit SteppedConcession(const StrategySpec& spec)
      : PoolStrategy(spec),
        step_(Param(spec, "step")),
        every_(static_cast<int>(Param(spec, "every"))),
        u_min_(Param(spec, "u_min")),
        window_(Param(spec, "window")) {
    if (every_ < 1) throw ArgumentError("stepped_concession: every < 1");
  }

 protected:
  Bid Plan(const Observation& obs, Rng& rng) override {
    const int steps = (obs.round - 1) / every_;
    const double target = std::max(u_min_, 1.0 - step_ * steps);
    return ladder_->NearTarget(target, window_, rng);
  }

 private:
  double step_;
  int every_;
  double u_min_;
  double window_;
};

// Alternates between two time-dependent curves every `period` rounds.
class MetaSwitcher : public PoolStrategy {
 public:
  explicit MetaSwitcher(const StrategySpec& spec)
      : PoolStrategy(spec),
        e_first_(Param(spec, "e_first")),
        e_second_(Param(spec, "e_second")),
        period_(static_cast<int>(Param(spec, "period"))),
        u_min_(Param(spec, "u_min")),
        window_(Param(spec, "window")) {
    if (period_ < 1) throw ArgumentError("meta_switcher: period < 1");
  }

 protected:
  Bid Plan(const Observation& obs, Rng& rng) override {
    const bool first = ((obs.round - 1) / period_) % 2 == 0;
    const double target =
        TimeDependentTarget(obs.time(), u_min_, 1.0, first ? e_first_ : e_second_);
    return ladder_->NearTarget(target, window_, rng);
  }

 private:
  double e_first_;
  double e_second_;
  int period_;
  double u_min_;
  double window_;
};

}  // namespace

std::vector<StrategySpec> DefaultPool() {
  constexpr double kReserve = 0.4;
  constexpr double kWindow = 0.03;
  return {
      {"random_counter", "random", {}},
      {"boulware",
       "time_dependent",
       {{"e", 0.2}, {"u_min", kReserve}, {"window", kWindow}}},
      {"conceder",
       "time_dependent",
       {{"e", 2.0}, {"u_min", kReserve}, {"window", kWindow}}},
      {"hardliner", "hardliner", {}},
      {"linear",
       "time_dependent",
       {{"e", 1.0}, {"u_min", kReserve}, {"window", kWindow}}},
      {"tit_for_tat_relative",
       "tit_for_tat",
       {{"kappa", 0.6},
        {"opening", 0.05},
        {"u_min", kReserve},
        {"window", kWindow}}},
      {"behavior_mirror",
       "mirror",
       {{"gain", 1.5}, {"probe", 0.01}, {"u_min", kReserve}}},
      {"boulware_jittered",
       "time_dependent",
       {{"e", 0.2},
        {"u_min", kReserve},
        {"window", kWindow},
        {"jitter", 0.08}}},
      {"stepped_concession",
       "stepped",
       {{"step", 0.1},
        {"every", 20.0},
        {"u_min", kReserve},
        {"window", kWindow}}},
      {"meta_switcher",
       "meta_switcher",
       {{"e_first", 0.2},
        {"e_second", 2.0},
        {"period", 20.0},
        {"u_min", kReserve},
        {"window", kWindow}}},
  };
}

std::vector<StrategySpec> PoolSubset(std::span<const std::string> ids) {
  const std::vector<StrategySpec> all = DefaultPool();
  std::vector<StrategySpec> out;
  std::set<std::string> seen;
  for (const std::string& id : ids) {
    if (!seen.insert(id).second) {
      throw ArgumentError("duplicate strategy id '" + id + "'");
    }
    auto it = std::find_if(all.begin(), all.end(),
                           [&](const StrategySpec& s) { return s.id == id; });
    if (it == all.end()) throw ArgumentError("unknown strategy id '" + id + "'");
    out.push_back(*it);
  }
  return out;
}

std::vector<std::string> PoolLabels(std::span<const StrategySpec> pool) {
  std::vector<std::string> labels;
  for (const auto& s : pool) labels.push_back(s.id);
  return labels;
}

std::unique_ptr<Strategy> MakeStrategy(const StrategySpec& spec) {
  if (spec.kind == "random") return std::make_unique<RandomCounter>(spec);
  if (spec.kind == "hardliner") return std::make_unique<Hardliner>(spec);
  if (spec.kind == "time_dependent") {
    return std::make_unique<TimeDependent>(spec);
  }
  if (spec.kind == "tit_for_tat") {
    return std::make_unique<TitForTatRelative>(spec);
  }
  if (spec.kind == "mirror") return std::make_unique<BehaviorMirror>(spec);
  if (spec.kind == "stepped") return std::make_unique<SteppedConcession>(spec);
  if (spec.kind == "meta_switcher") return std::make_unique<MetaSwitcher>(spec);
  throw ArgumentError("unknown strategy kind '" + spec.kind + "'");
}

nlohmann::json PoolManifest(std::span<const StrategySpec> pool) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : pool) {
    list.push_back({{"id", s.id}, {"kind", s.kind}, {"params", s.params}});
  }
  return {{"strategies", std::move(list)}};
}

std::vector<StrategySpec> PoolFromManifest(const nlohmann::json& j) {
  std::vector<StrategySpec> pool;
  std::set<std::string> seen;
  try {
    for (const auto& js : j.at("strategies")) {
      StrategySpec s{js.at("id").get<std::string>(),
                     js.at("kind").get<std::string>(),
                     js.at("params").get<StrategyParams>()};
      if (!seen.insert(s.id).second) {
        throw ArgumentError("duplicate strategy id '" + s.id + "'");
      }
      pool.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed pool manifest: ") + e.what());
  }
  return pool;
}

std::string ManifestHash(std::span<const StrategySpec> pool) {
  return HashHex(Fnv1a(PoolManifest(pool).dump()));
}

NiceTitForTat::NiceTitForTat(double kappa, double window)
    : kappa_(kappa), window_(window) {
  if (!(kappa >= 0.0)) throw ArgumentError("kappa must be >= 0");
  if (!(window >= 0.0)) throw ArgumentError("window must be >= 0");
}

void NiceTitForTat::Begin(const Domain& domain,
                          const PreferenceProfile& profile, int) {
  profile_ = &profile;
  ladder_ = std::make_unique<UtilityLadder>(domain, profile);
  model_ = std::make_unique<FrequencyModel>(domain);
  seen_ = 0;
  target_ = 1.0;
}

Action NiceTitForTat::Decide(const Observation& obs, Rng&) {
  const auto& theirs = obs.opponent_bids;
  if (theirs.empty()) {
    target_ = 1.0;
    return Action::Offer(ladder_->best().bid);
  }
  for (; seen_ < theirs.size(); ++seen_) model_->Update(theirs[seen_]);

  const double incoming = profile_->Utility(theirs.back());
  const double conceded = incoming - profile_->Utility(theirs.front());
  target_ = std::clamp(1.0 - kappa_ * std::max(0.0, conceded), 0.0, 1.0);

  const auto& entries = ladder_->entries();
  const auto [first, last] = ladder_->Range(target_ - window_,
                                            target_ + window_);
  std::size_t pick = entries.size();
  if (first == last) {
    pick = static_cast<std::size_t>(&ladder_->Closest(target_) -
                                    entries.data());
  } else {
    double best_score = -1.0;
    double best_gap = 0.0;
    for (std::size_t k = first; k < last; ++k) {
      const double score = model_->EstimateUtility(entries[k].bid);
      const double gap = std::abs(entries[k].utility - target_);
      // Ties favour the bid nearer the target, then the later (higher) one.
      if (score > best_score ||
          (score == best_score && gap <= best_gap)) {
        best_score = score;
        best_gap = gap;
        pick = k;
      }
    }
  }
  const UtilityLadder::Entry& plan = entries[pick];
  if (incoming >= plan.utility && incoming >= target_) return Action::Accept();
  return Action::Offer(plan.bid);
}

}  // namespace negrec
