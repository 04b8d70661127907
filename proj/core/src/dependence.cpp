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

#include "ttd/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "ttd/errors.hpp"

namespace ttd {
namespace {

using Count = std::int64_t;

// Pairs tied within runs of equal values of a sorted sequence.
template <typename Range, typename Eq>
Count tied_pairs(const Range& sorted, Eq equal) {
  Count ties = 0;
  Count run = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (equal(sorted[i - 1], sorted[i])) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  return ties + run * (run - 1) / 2;
}

// Stable merge sort on y; returns the number of inversions.
Count sort_and_count(std::vector<double>& y, std::vector<double>& buffer, std::size_t lo,
                     std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  Count swaps = sort_and_count(y, buffer, lo, mid) + sort_and_count(y, buffer, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += static_cast<Count>(mid - i);
      buffer[k++] = y[j++];
    } else {
      buffer[k++] = y[i++];
    }
  }
  while (i < mid) buffer[k++] = y[i++];
  while (j < hi) buffer[k++] = y[j++];
  std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
            buffer.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("kendall_tau needs equal-length inputs");
  if (x.size() < 2) throw InvalidArgument("kendall_tau needs at least two observations");
  const std::size_t n = x.size();

  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {x[i], y[i]};
  std::sort(pairs.begin(), pairs.end());

  const Count x_ties = tied_pairs(pairs, [](const auto& a, const auto& b) { return a.first == b.first; });
  const Count joint_ties = tied_pairs(pairs, [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(n), buffer(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pairs[i].second;
  const Count swaps = sort_and_count(ys, buffer, 0, n);
  const Count y_ties = tied_pairs(ys, [](double a, double b) { return a == b; });

  const Count total = static_cast<Count>(n) * static_cast<Count>(n - 1) / 2;
  if (x_ties == total || y_ties == total) {
    throw DegenerateInput("kendall_tau is undefined for a constant input");
  }
  const double numerator = static_cast<double>(total - x_ties - y_ties + joint_ties - 2 * swaps);
  const double denominator = std::sqrt(static_cast<double>(total - x_ties)) *
                             std::sqrt(static_cast<double>(total - y_ties));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

std::string_view to_string(PseudoMode mode) {
  return mode == PseudoMode::empirical_rank ? "empirical-rank" : "parametric-marginal";
}

PseudoMode parse_pseudo_mode(std::string_view name) {
  if (name == "empirical-rank" || name == "empirical") return PseudoMode::empirical_rank;
  if (name == "parametric-marginal" || name == "parametric") return PseudoMode::parametric_marginal;
  throw InvalidArgument("unknown pseudo-observation mode '" + std::string(name) + "'");
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

PseudoObservations to_pseudo_obs(const SegmentSeries& series) {
  const std::size_t n = series.num_trips();
  const std::size_t s = series.num_segments();
  PseudoObservations out{Matrix(n, s), PseudoMode::empirical_rank};
  const double denom = static_cast<double>(n + 1);
  for (std::size_t c = 0; c < s; ++c) {
    const auto ranks = average_ranks(series.column(c));
    for (std::size_t r = 0; r < n; ++r) out.values(r, c) = ranks[r] / denom;
  }
  return out;
}

PseudoObservations to_pseudo_obs(const SegmentSeries& series,
                                 std::span<const GmmParams> marginals) {
  const std::size_t n = series.num_trips();
  const std::size_t s = series.num_segments();
  if (marginals.size() != s) {
    throw DimensionMismatch("parametric pseudo-observations need one marginal per segment");
  }
  PseudoObservations out{Matrix(n, s), PseudoMode::parametric_marginal};
  const double lo = 0.5 / static_cast<double>(n);
  const double hi = 1.0 - lo;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < s; ++c) {
      out.values(r, c) = std::clamp(gmm_cdf(marginals[c], series.travel_times()(r, c)), lo, hi);
    }
  }
  return out;
}

double tau_to_param(Family family, double tau) {
  switch (family) {
    case Family::clayton:
      if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("Clayton needs tau in (0, 1)");
      return 2.0 * tau / (1.0 - tau);
    case Family::gumbel:
      if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument("Gumbel needs tau in [0, 1)");
      return 1.0 / (1.0 - tau);
    case Family::gaussian:
    case Family::student_t:
      if (!(tau > -1.0 && tau < 1.0)) throw InvalidArgument("elliptical copulas need tau in (-1, 1)");
      return std::sin(std::numbers::pi * tau / 2.0);
    case Family::independence:
      break;
  }
  throw InvalidArgument("the independence copula has no parameter");
}

std::vector<PairTau> adjacent_taus(const Matrix& columns) {
  std::vector<PairTau> out;
  for (std::size_t c = 0; c + 1 < columns.cols(); ++c) {
    out.push_back({c, c + 1, kendall_tau(columns.column(c), columns.column(c + 1))});
  }
  return out;
}

double mean_pairwise_tau(const Matrix& columns) {
  const std::size_t s = columns.cols();
  std::vector<std::vector<double>> cols(s);
  for (std::size_t c = 0; c < s; ++c) cols[c] = columns.column(c);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = a + 1; b < s; ++b) {
      sum += kendall_tau(cols[a], cols[b]);
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace ttd
