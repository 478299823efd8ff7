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


#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"
#include "negrec/dataset.hpp"
#include "negrec/domain.hpp"
#include "negrec/errors.hpp"
#include "negrec/experiment.hpp"
#include "negrec/features.hpp"
#include "negrec/nn.hpp"
#include "negrec/protocol.hpp"
#include "negrec/strategies.hpp"

namespace py = pybind11;

namespace negrec {
namespace {

// Structured values cross the boundary as JSON-compatible Python objects.
py::object ToPy(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json FromPy(const py::handle& o) {
  return nlohmann::json::parse(
      py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object PresetDomainPy(const std::string& name) {
  return ToPy(ToJson(PresetDomain(name)));
}

py::object GenerateDomainPy(const std::vector<int>& values_per_issue,
                            std::uint64_t seed, const std::string& id) {
  return ToPy(ToJson(GenerateDomain(static_cast<int>(values_per_issue.size()),
                                    values_per_issue, seed, id)));
}

py::object GenerateProfilePy(const py::object& domain, std::uint64_t seed,
                             const std::string& id) {
  return ToPy(ToJson(GenerateProfile(DomainFromJson(FromPy(domain)), seed, id)));
}

double UtilityPy(const py::object& profile, const Bid& bid) {
  return EvaluateUtility(ProfileFromJson(FromPy(profile)), bid);
}

py::tuple OppositionPy(const py::object& domain, const py::object& a,
                       const py::object& b, std::uint64_t seed) {
  const auto est = EstimateOpposition(DomainFromJson(FromPy(domain)),
                                      ProfileFromJson(FromPy(a)),
                                      ProfileFromJson(FromPy(b)), seed);
  return py::make_tuple(est.value, est.approximate);
}

py::object RunSessionPy(const py::object& domain, const py::object& mine,
                        const py::object& theirs, const std::string& strategy,
                        int deadline, std::uint64_t seed) {
  const Domain d = DomainFromJson(FromPy(domain));
  NiceTitForTat detector;
  auto opponent = MakeStrategy(PoolSubset(std::vector<std::string>{strategy})[0]);
  return ToPy(ToJson(RunSession(detector, *opponent, d,
                                ProfileFromJson(FromPy(mine)),
                                ProfileFromJson(FromPy(theirs)), deadline, seed)));
}

std::vector<std::string> ValidateTracePy(const py::object& trace,
                                         const py::object& domain) {
  return ValidateTrace(TraceFromJson(FromPy(trace)), DomainFromJson(FromPy(domain)));
}

py::object FeaturizePy(const py::object& trace, const std::string& scenario,
                       const py::object& domain, const py::object& mine,
                       const py::object& opponent, int checkpoint) {
  const Domain d = DomainFromJson(FromPy(domain));
  const PreferenceProfile m = ProfileFromJson(FromPy(mine));
  std::optional<PreferenceProfile> o;
  if (!opponent.is_none()) o = ProfileFromJson(FromPy(opponent));
  FeatureContext ctx{&d, &m, o ? &*o : nullptr, 100};
  const Trace t = TraceFromJson(FromPy(trace));
  ctx.deadline = t.deadline;
  return ToPy(ToJson(Featurize(t, ScenarioFromString(scenario), ctx, checkpoint)));
}

std::string SimulatePy(const py::object& config, const std::filesystem::path& out,
                       bool featurize) {
  const CampaignConfig c = CampaignConfigFromJson(FromPy(config));
  Dataset d;
  {
    py::gil_scoped_release release;
    d = featurize ? BuildDataset(c) : SimulateCampaign(c);
  }
  const auto dir = out / CampaignDirName(c);
  WriteCampaign(d, dir, featurize);
  return dir.string();
}

py::object RunExperimentPy(const py::object& config,
                           const std::optional<std::filesystem::path>& save_models) {
  const ExperimentConfig c = ExperimentConfigFromJson(FromPy(config));
  ExperimentResult r;
  {
    py::gil_scoped_release release;
    r = RunExperiment(c);
  }
  if (save_models) {
    for (const auto& [group, set] : r.models) {
      std::string safe = group;
      std::replace(safe.begin(), safe.end(), '/', '_');
      set.Save(*save_models / safe);
    }
  }
  return ToPy(ToJson(r.report));
}

py::list RecognizePy(const std::filesystem::path& models, const py::object& trace,
                     const std::string& scenario, const py::object& domain,
                     const py::object& mine, const py::object& opponent,
                     std::optional<int> round) {
  const ModelSet set = ModelSet::Load(models);
  const Domain d = DomainFromJson(FromPy(domain));
  const PreferenceProfile m = ProfileFromJson(FromPy(mine));
  std::optional<PreferenceProfile> o;
  if (!opponent.is_none()) o = ProfileFromJson(FromPy(opponent));
  const Trace t = TraceFromJson(FromPy(trace));
  FeatureContext ctx{&d, &m, o ? &*o : nullptr, t.deadline};
  const Recognition r = Recognize(set, t, ScenarioFromString(scenario), ctx, round);
  py::list out;
  for (const auto& p : r.ranked) out.append(py::make_tuple(p.label, p.probability));
  return out;
}

}  // namespace
}  // namespace negrec

PYBIND11_MODULE(_core, m) {
  using namespace negrec;
  m.doc() = "Opponent strategy recognition for alternating-offers negotiation.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<EnumerationLimitError>(m, "EnumerationLimitError",
                                                PyExc_RuntimeError);

  m.def("preset_domain", &PresetDomainPy, py::arg("name"));
  m.def("generate_domain", &GenerateDomainPy, py::arg("values_per_issue"),
        py::arg("seed"), py::arg("id") = "generated");
  m.def("generate_profile", &GenerateProfilePy, py::arg("domain"), py::arg("seed"),
        py::arg("id") = "profile");
  m.def("utility", &UtilityPy, py::arg("profile"), py::arg("bid"));
  m.def("opposition", &OppositionPy, py::arg("domain"), py::arg("a"), py::arg("b"),
        py::arg("seed") = 0,
        "Returns (value, approximate); sampled above the enumeration cap.");
  m.def("default_pool", [] { return ToPy(PoolManifest(DefaultPool())); });
  m.def("run_session", &RunSessionPy, py::arg("domain"), py::arg("mine"),
        py::arg("theirs"), py::arg("strategy"), py::arg("deadline") = 100,
        py::arg("seed") = 0);
  m.def("validate_trace", &ValidateTracePy, py::arg("trace"), py::arg("domain"));
  m.def("featurize", &FeaturizePy, py::arg("trace"), py::arg("scenario"),
        py::arg("domain"), py::arg("mine"), py::arg("opponent") = py::none(),
        py::arg("checkpoint") = 100);
  m.def("dans_classify",
        [](double delta_o, double delta_m, double gamma) {
          return ToString(DansClassify(delta_o, delta_m, gamma));
        },
        py::arg("delta_o"), py::arg("delta_m"), py::arg("gamma") = kDefaultGamma);
  m.def("timestep_width",
        [](const std::string& s) { return TimestepWidth(ScenarioFromString(s)); });
  m.def("overall_width",
        [](const std::string& s) { return OverallWidth(ScenarioFromString(s)); });
  m.def("schema_hash",
        [](const std::string& s) { return SchemaHash(ScenarioFromString(s)); });
  m.def("standard_experiment",
        [](const std::string& s, std::uint64_t seed) {
          return ToPy(ToJson(StandardExperiment(ScenarioFromString(s), seed)));
        },
        py::arg("scenario"), py::arg("seed") = 0);
  m.def("simulate", &SimulatePy, py::arg("config"), py::arg("out"),
        py::arg("featurize") = true, "Writes a campaign directory and returns its path.");
  m.def("run_experiment", &RunExperimentPy, py::arg("config"),
        py::arg("save_models") = std::nullopt);
  m.def("recognize", &RecognizePy, py::arg("models"), py::arg("trace"),
        py::arg("scenario"), py::arg("domain"), py::arg("mine"),
        py::arg("opponent") = py::none(), py::arg("round") = std::nullopt);
}
