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

// Bilateral alternating offers with a round deadline. The detector ("M")
// always opens; a round is the detector's offer followed by the opponent's
// ("O") reply.

#ifndef NEGREC_PROTOCOL_HPP_
#define NEGREC_PROTOCOL_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "negrec/domain.hpp"
#include "negrec/random.hpp"

namespace negrec {

enum class Role { kDetector, kOpponent };

struct Action {
  enum class Kind { kAccept, kOffer };

  Kind kind = Kind::kOffer;
  Bid bid;  // empty for kAccept

  static Action Accept() { return {Kind::kAccept, {}}; }
  static Action Offer(Bid bid) { return {Kind::kOffer, std::move(bid)}; }
  bool is_accept() const { return kind == Kind::kAccept; }

  bool operator==(const Action&) const = default;
};

// What a strategy sees when it is asked to act.
struct Observation {
  int round = 1;  // 1-based
  int deadline = 1;
  const Domain* domain = nullptr;
  const PreferenceProfile* profile = nullptr;  // the acting agent's own
  std::span<const Bid> own_bids;
  std::span<const Bid> opponent_bids;

  int remaining_rounds() const { return deadline - round; }
  double time() const { return static_cast<double>(round) / deadline; }
  const Bid* last_opponent_bid() const {
    return opponent_bids.empty() ? nullptr : &opponent_bids.back();
  }
};

// A negotiation strategy. Instances are per session and single threaded.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual const std::string& id() const = 0;

  // Called once before the first Decide of a session.
  virtual void Begin(const Domain& domain, const PreferenceProfile& profile,
                     int deadline) = 0;

  // `rng` is this agent's private stream for the session.
  virtual Action Decide(const Observation& obs, Rng& rng) = 0;
};

enum class Termination { kAgreement, kDeadline, kWalkAway };

struct Round {
  Bid bid_m;
  std::optional<Bid> bid_o;  // absent only in a final round ended by O

  bool operator==(const Round&) const = default;
};

struct Trace {
  std::string id;
  std::string domain_id;
  std::string profile_m;
  std::string profile_o;
  std::vector<Round> rounds;
  int end_round = 0;
  int deadline = 0;
  std::optional<Termination> ended_by;  // absent: ongoing (truncated prefix)
  std::optional<Role> accepted_by;
  std::optional<Bid> agreed_bid;
  std::string opponent_label;
  std::uint64_t seed = 0;

  bool operator==(const Trace&) const = default;
};

// Runs one session. Both agents draw from independent streams derived from
// (seed, role). Throws ProtocolError when a strategy accepts with nothing on
// the table or offers a bid outside the domain.
Trace RunSession(Strategy& detector, Strategy& opponent, const Domain& domain,
                 const PreferenceProfile& profile_m,
                 const PreferenceProfile& profile_o, int deadline,
                 std::uint64_t seed);

// First min(n_rounds, end_round) rounds. A prefix that stops before the
// session ended is marked ongoing.
Trace TruncateTrace(const Trace& trace, int n_rounds);

// Replays the trace and lists every protocol violation found: alternation,
// deadline, round completeness, agreement consistency, bid validity.
std::vector<std::string> ValidateTrace(const Trace& trace,
                                       const Domain& domain);

std::string ToString(Termination t);
std::string ToString(Role r);

nlohmann::json ToJson(const Trace& trace);
Trace TraceFromJson(const nlohmann::json& j);

// One JSON object per line.
void WriteTracesJsonl(std::ostream& out, std::span<const Trace> traces);
std::vector<Trace> ReadTracesJsonl(std::istream& in);

}  // namespace negrec

#endif  // NEGREC_PROTOCOL_HPP_
