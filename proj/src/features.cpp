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

#include "negrec/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <ostream>

#include "negrec/errors.hpp"
#include "negrec/opponent_model.hpp"

namespace negrec {

namespace {

constexpr int kAllBasic = 8;

// Positions in the full eight-column basic block.
enum BasicColumn {
  kMyOnMine = 0,     // U_m(b_m)
  kMyOnTheirs = 1,   // U_m(b_o)
  kOppOnMine = 2,    // U_o(b_m)
  kOppOnTheirs = 3,  // U_o(b_o)
  kEstMyOnMine = 4,
  kEstMyOnTheirs = 5,
  kEstOppOnMine = 6,
  kEstOppOnTheirs = 7,
};

constexpr std::array<const char*, kAllBasic> kBasicNames = {
    "U_m(b_m)",    "U_m(b_o)",    "U_o(b_m)",    "U_o(b_o)",
    "Uhat_m(b_m)", "Uhat_m(b_o)", "Uhat_o(b_m)", "Uhat_o(b_o)"};

constexpr std::array<const char*, kNumDansCategories> kDansNames = {
    "fortunate", "selfish", "concession", "unfortunate", "nice", "silent"};

const std::vector<int>& BasicSelection(Scenario s) {
  static const std::vector<int> kFull = {0, 1, 2, 3, 4, 5, 6, 7};
  static const std::vector<int> kReduced = {0, 1, 4, 5, 6, 7};
  return KnowsOpponentProfile(s) ? kFull : kReduced;
}

using BasicRow = std::array<double, kAllBasic>;

// Everything the two feature blocks are assembled from.
struct Computed {
  std::vector<BasicRow> basic;  // one per valid round
  std::vector<int> dans;        // category per valid round; -1 at round 1
  int end_round = 0;
};

Computed Compute(const Trace& trace, Scenario scenario,
                 const FeatureContext& ctx, int checkpoint) {
  if (checkpoint < 1) throw ArgumentError("checkpoint round must be >= 1");
  if (trace.rounds.empty()) throw ArgumentError("cannot featurize empty trace");
  if (ctx.domain == nullptr || ctx.mine == nullptr) {
    throw StructuralError("feature context needs a domain and own profile");
  }
  const bool knows_opp = KnowsOpponentProfile(scenario);
  if (knows_opp && ctx.opponent == nullptr) {
    throw StructuralError("scenario P1 needs the opponent profile");
  }
  if (ctx.deadline < 1) throw ArgumentError("deadline must be >= 1");

  const int n = std::min<int>(checkpoint, trace.rounds.size());
  FrequencyModel est_mine(*ctx.domain);
  FrequencyModel est_theirs(*ctx.domain);

  Computed out;
  out.basic.reserve(n);
  out.dans.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Round& round = trace.rounds[k];
    const Bid& bm = round.bid_m;
    // A half round ends with O accepting b_m; the accepted bid stands in for
    // O's side of that round.
    const Bid& bo = round.bid_o ? *round.bid_o : round.bid_m;
    est_mine.Update(bm);
    if (round.bid_o) est_theirs.Update(*round.bid_o);

    BasicRow row{};
    row[kMyOnMine] = ctx.mine->Utility(bm);
    row[kMyOnTheirs] = ctx.mine->Utility(bo);
    if (knows_opp) {
      row[kOppOnMine] = ctx.opponent->Utility(bm);
      row[kOppOnTheirs] = ctx.opponent->Utility(bo);
    }
    row[kEstMyOnMine] = est_mine.EstimateUtility(bm);
    row[kEstMyOnTheirs] = est_mine.EstimateUtility(bo);
    row[kEstOppOnMine] = est_theirs.EstimateUtility(bm);
    row[kEstOppOnTheirs] = est_theirs.EstimateUtility(bo);

    int category = -1;
    if (k > 0) {
      const BasicRow& prev = out.basic.back();
      const int opp_col = knows_opp ? kOppOnTheirs : kEstOppOnTheirs;
      const double delta_o = row[opp_col] - prev[opp_col];
      const double delta_m = row[kMyOnTheirs] - prev[kMyOnTheirs];
      category = static_cast<int>(DansClassify(delta_o, delta_m, ctx.gamma));
    }
    out.basic.push_back(row);
    out.dans.push_back(category);
  }
  out.end_round = std::min(trace.end_round, checkpoint);
  return out;
}

StepMatrix AssembleSteps(const Computed& c, Scenario scenario, int checkpoint) {
  const auto& sel = BasicSelection(scenario);
  const int width = TimestepWidth(scenario);
  const int b = static_cast<int>(sel.size());
  StepMatrix m;
  m.rows = checkpoint;
  m.cols = width;
  m.values.assign(static_cast<std::size_t>(checkpoint) * width, 0.0);
  m.mask.assign(checkpoint, 0);
  for (int r = 0; r < static_cast<int>(c.basic.size()); ++r) {
    double* row = &m.values[static_cast<std::size_t>(r) * width];
    for (int j = 0; j < b; ++j) {
      row[j] = c.basic[r][sel[j]];
      row[b + j] = r == 0 ? 0.0 : c.basic[r][sel[j]] - c.basic[r - 1][sel[j]];
    }
    if (c.dans[r] >= 0) row[2 * b + c.dans[r]] = 1.0;
    m.mask[r] = 1;
  }
  return m;
}

std::vector<double> AssembleOverall(const Computed& c, Scenario scenario,
                                    int deadline) {
  const auto& sel = BasicSelection(scenario);
  std::vector<double> v;
  v.reserve(OverallWidth(scenario));
  const BasicRow& first = c.basic.front();
  const BasicRow& last = c.basic.back();
  for (int j : sel) v.push_back(last[j]);
  for (int j : sel) v.push_back(last[j] - first[j]);
  std::array<double, kNumDansCategories> sums{};
  for (int cat : c.dans) {
    if (cat >= 0) sums[cat] += 1.0;
  }
  v.insert(v.end(), sums.begin(), sums.end());
  v.push_back(static_cast<double>(c.end_round) / deadline);
  return v;
}

}  // namespace

std::string ToString(Scenario s) {
  switch (s) {
    case Scenario::kP1:
      return "P1";
    case Scenario::kP2:
      return "P2";
    case Scenario::kP3:
      return "P3";
    case Scenario::kP4:
      return "P4";
  }
  return "?";
}

Scenario ScenarioFromString(std::string_view s) {
  std::string up(s);
  for (char& ch : up) ch = static_cast<char>(std::toupper(ch));
  if (up == "P1") return Scenario::kP1;
  if (up == "P2") return Scenario::kP2;
  if (up == "P3") return Scenario::kP3;
  if (up == "P4") return Scenario::kP4;
  throw ArgumentError("unknown scenario '" + std::string(s) + "'");
}

std::string ToString(DansCategory c) {
  return kDansNames[static_cast<int>(c)];
}

DansCategory DansClassify(double delta_o, double delta_m, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be > 0");
  const int o = delta_o > gamma ? 1 : (delta_o < -gamma ? -1 : 0);
  const int m = delta_m > gamma ? 1 : (delta_m < -gamma ? -1 : 0);
  if (o > 0) return m > 0 ? DansCategory::kFortunate : DansCategory::kSelfish;
  if (o < 0) {
    return m < 0 ? DansCategory::kUnfortunate : DansCategory::kConcession;
  }
  if (m > 0) return DansCategory::kNice;
  return m < 0 ? DansCategory::kUnfortunate : DansCategory::kSilent;
}

int BasicWidth(Scenario s) {
  return static_cast<int>(BasicSelection(s).size());
}
int TimestepWidth(Scenario s) { return 2 * BasicWidth(s) + kNumDansCategories; }
int OverallWidth(Scenario s) {
  return 2 * BasicWidth(s) + kNumDansCategories + 1;
}

std::vector<std::string> TimestepColumns(Scenario s) {
  std::vector<std::string> cols;
  for (int j : BasicSelection(s)) cols.emplace_back(kBasicNames[j]);
  for (int j : BasicSelection(s)) cols.push_back(std::string("d_") + kBasicNames[j]);
  for (const char* d : kDansNames) cols.push_back(std::string("dans_") + d);
  return cols;
}

std::vector<std::string> OverallColumns(Scenario s) {
  std::vector<std::string> cols;
  for (int j : BasicSelection(s)) {
    cols.push_back(std::string("last_") + kBasicNames[j]);
  }
  for (int j : BasicSelection(s)) {
    cols.push_back(std::string("change_") + kBasicNames[j]);
  }
  for (const char* d : kDansNames) cols.push_back(std::string("sum_dans_") + d);
  cols.emplace_back("end_round_over_deadline");
  return cols;
}

nlohmann::json FeatureSchema(Scenario s) {
  // The scenario name is left out so that P2-P4, which share columns, share
  // a hash.
  return {{"timestep_columns", TimestepColumns(s)},
          {"overall_columns", OverallColumns(s)}};
}

std::string SchemaHash(Scenario s) {
  return HashHex(Fnv1a(FeatureSchema(s).dump()));
}

int FeatureSeries::valid_rounds() const {
  return static_cast<int>(std::count(steps.mask.begin(), steps.mask.end(), 1));
}

bool FeatureSeries::operator==(const FeatureSeries& o) const {
  return trace_id == o.trace_id && label == o.label &&
         scenario == o.scenario && checkpoint == o.checkpoint &&
         steps.rows == o.steps.rows && steps.cols == o.steps.cols &&
         steps.values == o.steps.values && steps.mask == o.steps.mask &&
         overall == o.overall;
}

StepMatrix TimestepFeatures(const Trace& trace, Scenario scenario,
                            const FeatureContext& ctx, int checkpoint_round) {
  return AssembleSteps(Compute(trace, scenario, ctx, checkpoint_round),
                       scenario, checkpoint_round);
}

std::vector<double> OverallFeatures(const Trace& trace, Scenario scenario,
                                    const FeatureContext& ctx,
                                    int checkpoint_round) {
  return AssembleOverall(Compute(trace, scenario, ctx, checkpoint_round),
                         scenario, ctx.deadline);
}

FeatureSeries Featurize(const Trace& trace, Scenario scenario,
                        const FeatureContext& ctx, int checkpoint_round) {
  const Computed c = Compute(trace, scenario, ctx, checkpoint_round);
  FeatureSeries fs;
  fs.trace_id = trace.id;
  fs.label = trace.opponent_label;
  fs.scenario = scenario;
  fs.checkpoint = checkpoint_round;
  fs.steps = AssembleSteps(c, scenario, checkpoint_round);
  fs.overall = AssembleOverall(c, scenario, ctx.deadline);
  return fs;
}

nlohmann::json ToJson(const FeatureSeries& fs) {
  nlohmann::json j;
  j["trace_id"] = fs.trace_id;
  j["label"] = fs.label;
  j["scenario"] = ToString(fs.scenario);
  j["checkpoint"] = fs.checkpoint;
  j["rows"] = fs.steps.rows;
  j["cols"] = fs.steps.cols;
  j["steps"] = fs.steps.values;
  j["mask"] = fs.steps.mask;
  j["overall"] = fs.overall;
  return j;
}

FeatureSeries FeatureSeriesFromJson(const nlohmann::json& j) {
  try {
    FeatureSeries fs;
    fs.trace_id = j.at("trace_id").get<std::string>();
    fs.label = j.at("label").get<std::string>();
    fs.scenario = ScenarioFromString(j.at("scenario").get<std::string>());
    fs.checkpoint = j.at("checkpoint").get<int>();
    fs.steps.rows = j.at("rows").get<int>();
    fs.steps.cols = j.at("cols").get<int>();
    fs.steps.values = j.at("steps").get<std::vector<double>>();
    fs.steps.mask = j.at("mask").get<std::vector<std::uint8_t>>();
    fs.overall = j.at("overall").get<std::vector<double>>();
    if (fs.steps.values.size() !=
            static_cast<std::size_t>(fs.steps.rows) * fs.steps.cols ||
        fs.steps.mask.size() != static_cast<std::size_t>(fs.steps.rows)) {
      throw StructuralError("feature record shape disagrees with its data");
    }
    if (fs.steps.cols != TimestepWidth(fs.scenario) ||
        static_cast<int>(fs.overall.size()) != OverallWidth(fs.scenario)) {
      throw SchemaError("feature record widths do not match scenario " +
                        ToString(fs.scenario));
    }
    return fs;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed feature record: ") + e.what());
  }
}

void WriteFeaturesJsonl(std::ostream& out,
                        std::span<const FeatureSeries> series) {
  for (const auto& fs : series) out << ToJson(fs).dump() << '\n';
}

std::vector<FeatureSeries> ReadFeaturesJsonl(std::istream& in) {
  std::vector<FeatureSeries> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(FeatureSeriesFromJson(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace negrec
