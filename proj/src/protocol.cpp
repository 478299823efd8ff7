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

#include "negrec/protocol.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "negrec/errors.hpp"

namespace negrec {

namespace {

constexpr std::uint64_t kDetectorStream = 0x4d;  // 'M'
constexpr std::uint64_t kOpponentStream = 0x4f;  // 'O'

void CheckOffer(const Action& action, const Domain& domain, Role who,
                int round) {
  if (!domain.IsValid(action.bid)) {
    throw ProtocolError(ToString(who) + " offered an invalid bid in round " +
                        std::to_string(round));
  }
}

}  // namespace

std::string ToString(Termination t) {
  switch (t) {
    case Termination::kAgreement:
      return "agreement";
    case Termination::kDeadline:
      return "deadline";
    case Termination::kWalkAway:
      return "walk_away";
  }
  return "unknown";
}

std::string ToString(Role r) { return r == Role::kDetector ? "M" : "O"; }

Trace RunSession(Strategy& detector, Strategy& opponent, const Domain& domain,
                 const PreferenceProfile& profile_m,
                 const PreferenceProfile& profile_o, int deadline,
                 std::uint64_t seed) {
  if (deadline < 1) throw ArgumentError("deadline must be at least 1");
  profile_m.CheckCompatible(domain);
  profile_o.CheckCompatible(domain);

  Rng rng_m(DeriveSeed(seed, {kDetectorStream}));
  Rng rng_o(DeriveSeed(seed, {kOpponentStream}));
  detector.Begin(domain, profile_m, deadline);
  opponent.Begin(domain, profile_o, deadline);

  Trace trace;
  trace.domain_id = domain.id();
  trace.profile_m = profile_m.id();
  trace.profile_o = profile_o.id();
  trace.deadline = deadline;
  trace.opponent_label = opponent.id();
  trace.seed = seed;
  trace.rounds.reserve(deadline);

  std::vector<Bid> bids_m;
  std::vector<Bid> bids_o;
  bids_m.reserve(deadline);
  bids_o.reserve(deadline);

  for (int round = 1; round <= deadline; ++round) {
    const Observation obs_m{round,     deadline, &domain,
                            &profile_m, bids_m,  bids_o};
    Action act = detector.Decide(obs_m, rng_m);
    if (act.is_accept()) {
      if (bids_o.empty()) {
        throw ProtocolError("detector accepted before any offer was made");
      }
      trace.end_round = round - 1;
      trace.ended_by = Termination::kAgreement;
      trace.accepted_by = Role::kDetector;
      trace.agreed_bid = bids_o.back();
      return trace;
    }
    CheckOffer(act, domain, Role::kDetector, round);
    bids_m.push_back(act.bid);
    trace.rounds.push_back({std::move(act.bid), std::nullopt});

    const Observation obs_o{round,     deadline, &domain,
                            &profile_o, bids_o,  bids_m};
    act = opponent.Decide(obs_o, rng_o);
    if (act.is_accept()) {
      trace.end_round = round;
      trace.ended_by = Termination::kAgreement;
      trace.accepted_by = Role::kOpponent;
      trace.agreed_bid = bids_m.back();
      return trace;
    }
    CheckOffer(act, domain, Role::kOpponent, round);
    bids_o.push_back(act.bid);
    trace.rounds.back().bid_o = std::move(act.bid);
  }
  trace.end_round = deadline;
  trace.ended_by = Termination::kDeadline;
  return trace;
}

Trace TruncateTrace(const Trace& trace, int n_rounds) {
  if (n_rounds < 1) throw ArgumentError("n_rounds must be at least 1");
  if (n_rounds >= trace.end_round) return trace;
  Trace out = trace;
  out.rounds.resize(n_rounds);
  out.end_round = n_rounds;
  out.ended_by.reset();
  out.accepted_by.reset();
  out.agreed_bid.reset();
  return out;
}

std::vector<std::string> ValidateTrace(const Trace& trace,
                                       const Domain& domain) {
  std::vector<std::string> errors;
  auto fail = [&](std::string msg) {
    errors.push_back(trace.id + ": " + std::move(msg));
  };
  const int n = static_cast<int>(trace.rounds.size());
  if (trace.end_round != n) fail("end_round differs from recorded rounds");
  if (trace.end_round < 1) fail("end_round below 1");
  if (trace.deadline >= 1 && trace.end_round > trace.deadline) {
    fail("end_round beyond deadline");
  }
  for (int r = 0; r < n; ++r) {
    const Round& round = trace.rounds[r];
    if (!domain.IsValid(round.bid_m)) {
      fail("invalid M bid in round " + std::to_string(r + 1));
    }
    if (round.bid_o && !domain.IsValid(*round.bid_o)) {
      fail("invalid O bid in round " + std::to_string(r + 1));
    }
    if (!round.bid_o && r + 1 < n) {
      fail("non-final round " + std::to_string(r + 1) + " lacks O bid");
    }
  }
  if (n == 0) return errors;

  const bool last_complete = trace.rounds.back().bid_o.has_value();
  if (!trace.ended_by) {
    if (!last_complete) fail("ongoing trace ends with a half round");
    if (trace.agreed_bid) fail("ongoing trace carries an agreement");
    return errors;
  }
  switch (*trace.ended_by) {
    case Termination::kAgreement:
      if (!trace.accepted_by || !trace.agreed_bid) {
        fail("agreement without acceptor or agreed bid");
        break;
      }
      if (*trace.accepted_by == Role::kOpponent) {
        // O accepted M's offer of the final round.
        if (last_complete) fail("O accepted but also countered");
        if (*trace.agreed_bid != trace.rounds.back().bid_m) {
          fail("agreed bid differs from M's final offer");
        }
      } else {
        // M accepted O's previous offer at the start of the next round.
        if (!last_complete) fail("M accepted with no O offer on the table");
        else if (*trace.agreed_bid != *trace.rounds.back().bid_o) {
          fail("agreed bid differs from O's final offer");
        }
        if (trace.deadline >= 1 && trace.end_round >= trace.deadline) {
          fail("M accepted after the deadline");
        }
      }
      break;
    case Termination::kDeadline:
      if (trace.end_round != trace.deadline) fail("deadline end before deadline");
      if (!last_complete) fail("deadline reached with a half round");
      if (trace.agreed_bid) fail("deadline end carries an agreement");
      break;
    case Termination::kWalkAway:
      if (trace.agreed_bid) fail("walk-away carries an agreement");
      break;
  }
  return errors;
}

namespace {

nlohmann::json BidJson(const std::optional<Bid>& bid) {
  return bid ? nlohmann::json(*bid) : nlohmann::json(nullptr);
}

std::optional<Bid> BidFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<Bid>();
}

Termination TerminationFromString(const std::string& s) {
  if (s == "agreement") return Termination::kAgreement;
  if (s == "deadline") return Termination::kDeadline;
  if (s == "walk_away") return Termination::kWalkAway;
  throw StructuralError("unknown termination '" + s + "'");
}

}  // namespace

nlohmann::json ToJson(const Trace& trace) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const Round& r : trace.rounds) {
    rounds.push_back(nlohmann::json::array({r.bid_m, BidJson(r.bid_o)}));
  }
  nlohmann::json j;
  j["id"] = trace.id;
  j["domain_id"] = trace.domain_id;
  j["profile_m"] = trace.profile_m;
  j["profile_o"] = trace.profile_o;
  j["opponent_label"] = trace.opponent_label;
  j["seed"] = trace.seed;
  j["deadline"] = trace.deadline;
  j["end_round"] = trace.end_round;
  j["ended_by"] = trace.ended_by ? nlohmann::json(ToString(*trace.ended_by))
                                 : nlohmann::json(nullptr);
  j["accepted_by"] = trace.accepted_by
                         ? nlohmann::json(ToString(*trace.accepted_by))
                         : nlohmann::json(nullptr);
  j["agreed_bid"] = BidJson(trace.agreed_bid);
  j["rounds"] = std::move(rounds);
  return j;
}

Trace TraceFromJson(const nlohmann::json& j) {
  try {
    Trace t;
    t.id = j.at("id").get<std::string>();
    t.domain_id = j.at("domain_id").get<std::string>();
    t.profile_m = j.at("profile_m").get<std::string>();
    t.profile_o = j.at("profile_o").get<std::string>();
    t.opponent_label = j.at("opponent_label").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.deadline = j.at("deadline").get<int>();
    t.end_round = j.at("end_round").get<int>();
    if (!j.at("ended_by").is_null()) {
      t.ended_by = TerminationFromString(j["ended_by"].get<std::string>());
    }
    if (!j.at("accepted_by").is_null()) {
      const auto who = j["accepted_by"].get<std::string>();
      if (who != "M" && who != "O") {
        throw StructuralError("unknown acceptor '" + who + "'");
      }
      t.accepted_by = who == "M" ? Role::kDetector : Role::kOpponent;
    }
    t.agreed_bid = BidFromJson(j.at("agreed_bid"));
    for (const auto& jr : j.at("rounds")) {
      if (!jr.is_array() || jr.size() != 2) {
        throw StructuralError("round must be a [bid_m, bid_o] pair");
      }
      t.rounds.push_back({jr[0].get<Bid>(), BidFromJson(jr[1])});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed trace JSON: ") + e.what());
  }
}

void WriteTracesJsonl(std::ostream& out, std::span<const Trace> traces) {
  for (const Trace& t : traces) out << ToJson(t).dump() << '\n';
}

std::vector<Trace> ReadTracesJsonl(std::istream& in) {
  std::vector<Trace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    traces.push_back(TraceFromJson(nlohmann::json::parse(line)));
  }
  return traces;
}

}  // namespace negrec
