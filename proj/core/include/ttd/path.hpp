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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttd/copula.hpp"
#include "ttd/gmm.hpp"
#include "ttd/trip_data.hpp"

namespace ttd {

inline constexpr std::size_t kMinModelDraws = 1000;
inline constexpr std::size_t kDefaultModelDraws = 100000;

// Sampled path travel-time distribution (sum over segments).
struct PathTtdEstimate {
  std::vector<double> samples;  // seconds
  std::string method;           // "copula:<family>", "convolution" or "empirical"
  std::optional<CopulaModel> model;
  std::vector<GmmParams> marginals;

  std::size_t sample_count() const noexcept { return samples.size(); }
};

// Monte-Carlo: m copula draws mapped through each marginal quantile and summed.
// Throws DimensionMismatch when model.dim != marginals.size() and
// InvalidArgument when m < kMinModelDraws.
PathTtdEstimate estimate_copula_path(std::span<const GmmParams> marginals,
                                     const CopulaModel& model, std::size_t m,
                                     std::uint64_t seed);

// Independent per-segment draws summed. Throws InvalidArgument when
// marginals is empty or m < kMinModelDraws.
PathTtdEstimate estimate_convolution_path(std::span<const GmmParams> marginals,
                                          std::size_t m, std::uint64_t seed);

// Row sums of a complete series.
PathTtdEstimate empirical_path(const SegmentSeries& series);

// Right-continuous step CDF over a sorted copy of a sample set.
class EmpiricalCdf {
 public:
  // Throws InvalidArgument when samples is empty.
  explicit EmpiricalCdf(std::span<const double> samples);

  double operator()(double t) const;
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

double estimate_cdf(const PathTtdEstimate& estimate, double t);

struct PathSummary {
  std::string method;
  std::size_t sample_count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> probabilities;  // 0.05, 0.10, ..., 0.95
  std::vector<double> quantiles;
};

PathSummary summarize(const PathTtdEstimate& estimate);

// One sample per line under the header `travel_time_s`.
void write_samples_csv(std::ostream& out, std::span<const double> samples);
// Throws ParseError on a bad header or value.
std::vector<double> read_samples_csv(std::istream& in);

}  // namespace ttd
