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

// Fit / estimate / evaluate steps shared by the CLI commands and the
// acceptance suite. Every step derives its own seed from the run seed, so
// results do not depend on the order in which concurrent work finishes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttd/copula.hpp"
#include "ttd/dependence.hpp"
#include "ttd/gmm.hpp"
#include "ttd/gof.hpp"
#include "ttd/path.hpp"
#include "ttd/trip_data.hpp"

namespace ttd::cli {

struct MarginalFit {
  SegmentId segment_id = 0;
  GmmFit fit;
  double ks = 0.0;  // fitted CDF against the training column
};

// One GMM per column, fitted concurrently.
std::vector<MarginalFit> fit_marginals(const SegmentSeries& series, std::size_t k,
                                       std::uint64_t seed);

std::vector<GmmParams> params_of(std::span<const MarginalFit> fits);

PseudoObservations pseudo_observations(const SegmentSeries& series,
                                       std::span<const GmmParams> marginals, PseudoMode mode);

struct FamilyFit {
  Family family = Family::gaussian;
  std::optional<FitResult> result;
  std::string error;  // set when the fit threw
};

// Fits each family concurrently; a failure is recorded, not rethrown.
std::vector<FamilyFit> fit_families(const Matrix& pseudo, std::span<const Family> families);

// "2D Clayton", "10D Convolution", ...
std::string model_label(std::size_t dim, std::string_view model);
std::string display_name(Family family);

struct Evaluation {
  std::string model;  // label as produced by model_label
  PathTtdEstimate estimate;
  GofReport gof;
};

Evaluation evaluate_convolution(std::span<const GmmParams> marginals,
                                std::span<const double> reference, std::size_t m,
                                std::uint64_t seed);

Evaluation evaluate_copula(std::span<const GmmParams> marginals, const CopulaModel& model,
                           std::span<const double> reference, std::size_t m, std::uint64_t seed);

struct SweepRow {
  std::size_t segment_count = 0;
  std::string model;  // "convolution" or a family tag
  double ks = 0.0;
  double cvm = 0.0;
};

struct SweepOptions {
  std::vector<Family> families{Family::clayton};
  std::size_t k = 3;
  std::size_t m = kDefaultModelDraws;
  std::uint64_t seed = 42;
  PseudoMode pseudo = PseudoMode::empirical_rank;
  std::size_t min_length = 2;
};

// Prefix lengths min_length..S; rows ordered by length, then convolution
// first, then families in the given order. Marginals are fitted once on the
// full series and shared by every prefix.
std::vector<SweepRow> sweep(const SegmentSeries& series, const SweepOptions& options);

}  // namespace ttd::cli
