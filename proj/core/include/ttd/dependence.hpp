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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ttd/copula.hpp"
#include "ttd/gmm.hpp"
#include "ttd/matrix.hpp"
#include "ttd/trip_data.hpp"

namespace ttd {

// Kendall's tau-b in O(N log N) (Knight's merge-sort algorithm). Throws
// InvalidArgument for unequal lengths or N < 2, DegenerateInput when either
// vector is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

enum class PseudoMode { empirical_rank, parametric_marginal };

std::string_view to_string(PseudoMode mode);
PseudoMode parse_pseudo_mode(std::string_view name);

struct PseudoObservations {
  Matrix values;  // N x S, every entry strictly inside (0, 1)
  PseudoMode source = PseudoMode::empirical_rank;
};

// Empirical mode: average rank / (N + 1) per column.
PseudoObservations to_pseudo_obs(const SegmentSeries& series);
// Parametric mode: gmm_cdf of the matching marginal, clamped to
// [1/(2N), 1 - 1/(2N)]. Throws DimensionMismatch unless one marginal per
// segment is given.
PseudoObservations to_pseudo_obs(const SegmentSeries& series,
                                 std::span<const GmmParams> marginals);

// Average ranks (1-based) of a column, ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

// Closed-form Kendall-tau inversion:
//   Clayton alpha = 2 tau / (1 - tau), Gumbel alpha = 1 / (1 - tau),
//   Gaussian / Student-t rho = sin(pi tau / 2).
// Throws InvalidArgument when tau is outside the family's attainable range
// (Archimedean: Clayton (0, 1), Gumbel [0, 1); elliptical (-1, 1)).
double tau_to_param(Family family, double tau);

struct PairTau {
  std::size_t first = 0;  // column indices
  std::size_t second = 0;
  double tau = 0.0;
};

// Tau of each adjacent column pair (0,1), (1,2), ...
std::vector<PairTau> adjacent_taus(const Matrix& columns);
// Mean tau over all column pairs.
double mean_pairwise_tau(const Matrix& columns);

}  // namespace ttd
