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

// Turns negotiation traces into domain-independent time series.
//
// Per round the pipeline computes the basic utilities of both bids under the
// actual and frequency-estimated utility functions of both agents:
//
//   U_m(b_m)  U_m(b_o)  U_o(b_m)  U_o(b_o)
//   Û_m(b_m)  Û_m(b_o)  Û_o(b_m)  Û_o(b_o)
//
// followed by their round-over-round changes and a one-hot DANS category of
// the opponent's move. U_o columns exist only when the opponent's profile is
// known (scenario P1). Frequency models are cumulative: round r uses every bid
// sent up to and including round r.

#ifndef NEGREC_FEATURES_HPP_
#define NEGREC_FEATURES_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "negrec/domain.hpp"
#include "negrec/protocol.hpp"

namespace negrec {

// P1 knows the opponent's profile; P2-P4 do not.
enum class Scenario { kP1, kP2, kP3, kP4 };

std::string ToString(Scenario s);
// Accepts "P1".."P4" in either case.
Scenario ScenarioFromString(std::string_view s);
inline bool KnowsOpponentProfile(Scenario s) { return s == Scenario::kP1; }

enum class DansCategory {
  kFortunate,
  kSelfish,
  kConcession,
  kUnfortunate,
  kNice,
  kSilent,
};
inline constexpr int kNumDansCategories = 6;
inline constexpr double kDefaultGamma = 0.002;

std::string ToString(DansCategory c);

// Classifies the opponent's move from the change of its own utility
// (delta_o) and of the detector's utility (delta_m) against the band
// [-gamma, gamma]. The three band combinations outside the six named
// conditions map to their nearest named neighbour:
//   delta_o > gamma,  delta_m in band  -> Selfish
//   delta_o < -gamma, delta_m in band  -> Concession
//   delta_o in band,  delta_m < -gamma -> Unfortunate
DansCategory DansClassify(double delta_o, double delta_m, double gamma);

int BasicWidth(Scenario s);     // 8 or 6
int TimestepWidth(Scenario s);  // 22 or 18
int OverallWidth(Scenario s);   // 23 or 19

std::vector<std::string> TimestepColumns(Scenario s);
std::vector<std::string> OverallColumns(Scenario s);
// Column names in order; persisted next to feature files.
nlohmann::json FeatureSchema(Scenario s);
std::string SchemaHash(Scenario s);

// What the detector knows when featurizing. `opponent` may be null unless
// the scenario is P1.
struct FeatureContext {
  const Domain* domain = nullptr;
  const PreferenceProfile* mine = nullptr;
  const PreferenceProfile* opponent = nullptr;
  int deadline = 100;
  double gamma = kDefaultGamma;
};

struct StepMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::uint8_t> mask;

  double at(int r, int c) const { return values[r * cols + c]; }
};

struct FeatureSeries {
  std::string trace_id;
  std::string label;
  Scenario scenario = Scenario::kP1;
  int checkpoint = 0;
  StepMatrix steps;
  std::vector<double> overall;

  int valid_rounds() const;
  bool operator==(const FeatureSeries&) const;
};

// Rows are padded to `checkpoint_round`; rows past the trace end are zero
// with mask 0. Throws ArgumentError on an empty trace or checkpoint < 1 and
// StructuralError when P1 lacks the opponent profile.
StepMatrix TimestepFeatures(const Trace& trace, Scenario scenario,
                            const FeatureContext& ctx, int checkpoint_round);

// Last valid round's basic utilities, first-to-last changes, per-category
// DANS counts, and min(end_round, checkpoint) / deadline.
std::vector<double> OverallFeatures(const Trace& trace, Scenario scenario,
                                    const FeatureContext& ctx,
                                    int checkpoint_round);

FeatureSeries Featurize(const Trace& trace, Scenario scenario,
                        const FeatureContext& ctx, int checkpoint_round);

nlohmann::json ToJson(const FeatureSeries& fs);
FeatureSeries FeatureSeriesFromJson(const nlohmann::json& j);
void WriteFeaturesJsonl(std::ostream& out,
                        std::span<const FeatureSeries> series);
std::vector<FeatureSeries> ReadFeaturesJsonl(std::istream& in);

}  // namespace negrec

#endif  // NEGREC_FEATURES_HPP_
