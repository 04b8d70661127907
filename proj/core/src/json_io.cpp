// Copyright 2026 The copula-ttd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttd/json_io.hpp"

#include "ttd/errors.hpp"

namespace ttd {

using nlohmann::json;

void to_json(json& j, const GmmParams& params) {
  j = json{{"k", params.k()},
           {"means", params.means()},
           {"sigmas", params.sigmas()},
           {"weights", params.weights()}};
}

void from_json(const json& j, GmmParams& params) {
  params = GmmParams(j.at("means").get<std::vector<double>>(),
                     j.at("sigmas").get<std::vector<double>>(),
                     j.at("weights").get<std::vector<double>>());
  if (j.contains("k") && j.at("k").get<std::size_t>() != params.k()) {
    throw InvalidArgument("GMM field k does not match the parameter vectors");
  }
}

void to_json(json& j, const CopulaModel& model) {
  j = json{{"family", to_string(model.family)}, {"dim", model.dim}};
  if (model.alpha) j["alpha"] = *model.alpha;
  if (model.rho) j["rho"] = *model.rho;
  if (model.nu) j["nu"] = *model.nu;
}

void from_json(const json& j, CopulaModel& model) {
  CopulaModel m;
  m.family = parse_family(j.at("family").get<std::string>());
  m.dim = j.at("dim").get<int>();
  if (j.contains("alpha")) m.alpha = j.at("alpha").get<double>();
  if (j.contains("rho")) m.rho = j.at("rho").get<double>();
  if (j.contains("nu")) m.nu = j.at("nu").get<double>();
  m.validate();
  model = m;
}

void to_json(json& j, const FitResult& fit) {
  j = fit.model;
  j["log_likelihood"] = fit.log_likelihood;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
}

void from_json(const json& j, FitResult& fit) {
  fit.model = j.get<CopulaModel>();
  fit.log_likelihood = j.at("log_likelihood").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.value("iterations", 0);
}

void to_json(json& j, const GofReport& report) {
  j = json{{"model", report.model},
           {"ks", report.ks},
           {"cvm", report.cvm},
           {"n_reference", report.n_reference},
           {"n_model", report.n_model}};
}

void from_json(const json& j, GofReport& report) {
  report.model = j.at("model").get<std::string>();
  report.ks = j.at("ks").get<double>();
  report.cvm = j.at("cvm").get<double>();
  report.n_reference = j.value("n_reference", std::size_t{0});
  report.n_model = j.value("n_model", std::size_t{0});
}

void to_json(json& j, const PathSummary& summary) {
  json q = json::array();
  for (std::size_t i = 0; i < summary.quantiles.size(); ++i) {
    q.push_back({{"p", summary.probabilities[i]}, {"value", summary.quantiles[i]}});
  }
  j = json{{"method", summary.method},
           {"sample_count", summary.sample_count},
           {"mean", summary.mean},
           {"variance", summary.variance},
           {"quantiles", q}};
}

void to_json(json& j, const SynthSpec& spec) {
  j = json{{"marginals", spec.marginals},
           {"coupling", spec.coupling},
           {"segment_ids", spec.segment_ids},
           {"n_trips", spec.n_trips},
           {"seed", spec.seed},
           {"gps_artifact", spec.gps_artifact}};
}

void from_json(const json& j, SynthSpec& spec) {
  spec.marginals = j.at("marginals").get<std::vector<GmmParams>>();
  spec.coupling = j.at("coupling").get<CopulaModel>();
  spec.segment_ids = j.value("segment_ids", std::vector<SegmentId>{});
  spec.n_trips = j.value("n_trips", std::size_t{0});
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.gps_artifact = j.value("gps_artifact", 0.0);
}

}  // namespace ttd
