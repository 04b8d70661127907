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

#pragma once

// nlohmann::json bindings for the interchange types. Field names are fixed:
//
//   GmmParams    {"k":3,"means":[..],"sigmas":[..],"weights":[..]}
//   CopulaModel  {"family":"clayton","dim":2,"alpha":2.595}
//   FitResult    CopulaModel fields + "log_likelihood","converged","iterations"
//   GofReport    {"model":"2D Clayton","ks":..,"cvm":..,"n_reference":..,"n_model":..}
//   PairTau      {"pair":[i,j],"tau":t}
//   PathSummary  {"method":..,"sample_count":..,"mean":..,"variance":..,
//                 "quantiles":[{"p":0.05,"value":..},..]}
//   SynthSpec    {"marginals":[GmmParams..],"coupling":CopulaModel,
//                 "segment_ids":[..],"n_trips":..,"seed":..,"gps_artifact":..}

#include <nlohmann/json.hpp>

#include "ttd/copula.hpp"
#include "ttd/gmm.hpp"
#include "ttd/gof.hpp"
#include "ttd/path.hpp"
#include "ttd/trip_data.hpp"

namespace ttd {

void to_json(nlohmann::json& j, const GmmParams& params);
void from_json(const nlohmann::json& j, GmmParams& params);

void to_json(nlohmann::json& j, const CopulaModel& model);
void from_json(const nlohmann::json& j, CopulaModel& model);

void to_json(nlohmann::json& j, const FitResult& fit);
void from_json(const nlohmann::json& j, FitResult& fit);

void to_json(nlohmann::json& j, const GofReport& report);
void from_json(const nlohmann::json& j, GofReport& report);

void to_json(nlohmann::json& j, const PathSummary& summary);

void to_json(nlohmann::json& j, const SynthSpec& spec);
void from_json(const nlohmann::json& j, SynthSpec& spec);

}  // namespace ttd
