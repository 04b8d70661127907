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

#include "ttd/builtin.hpp"

#include <numeric>
#include <string>

#include "ttd/dependence.hpp"
#include "ttd/errors.hpp"

namespace ttd::builtin {

std::vector<GmmParams> leopoldstrasse_marginals() {
  // Means, sigmas and weights per segment in traversal order. Weights are
  // rounded to two decimals and sum to 0.98 or 0.99, so each row
  // is renormalized.
  struct Row {
    double mu[3], sigma[3], w[3];
  };
  static constexpr Row kRows[] = {
      {{16.08, 31.41, 62.92}, {5.25, 9.79, 12.65}, {0.31, 0.34, 0.34}},
      {{5.41, 8.86, 16.31}, {1.44, 2.68, 5.58}, {0.52, 0.38, 0.09}},
      {{8.92, 14.55, 29.37}, {2.03, 4.06, 9.55}, {0.43, 0.34, 0.22}},
      {{3.11, 5.72, 10.33}, {0.72, 1.69, 3.26}, {0.43, 0.38, 0.17}},
      {{9.46, 17.58, 36.01}, {2.18, 5.26, 10.38}, {0.33, 0.38, 0.28}},
      {{6.43, 12.26, 29.55}, {1.53, 3.94, 5.36}, {0.46, 0.35, 0.17}},
      {{8.24, 13.30, 27.82}, {1.68, 3.75, 10.94}, {0.54, 0.37, 0.07}},
      {{2.76, 3.97, 7.09}, {0.48, 0.91, 2.69}, {0.48, 0.38, 0.12}},
      {{3.59, 5.42, 10.17}, {0.64, 1.34, 3.94}, {0.52, 0.35, 0.11}},
      {{6.67, 11.29, 22.46}, {1.32, 3.22, 8.64}, {0.52, 0.35, 0.11}},
  };
  std::vector<GmmParams> out;
  for (const auto& row : kRows) {
    std::vector<double> w(row.w, row.w + 3);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    out.emplace_back(std::vector<double>(row.mu, row.mu + 3),
                     std::vector<double>(row.sigma, row.sigma + 3), std::move(w));
  }
  return out;
}

std::vector<double> leopoldstrasse_adjacent_taus() {
  return {0.318, 0.604, 0.698, 0.602, 0.417, 0.490, 0.639, 0.835, 0.748};
}

SynthSpec synth_spec(std::string_view name, std::size_t n_trips, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_trips = n_trips;
  spec.seed = seed;
  const auto marginals = leopoldstrasse_marginals();
  const auto taus = leopoldstrasse_adjacent_taus();
  if (name == "leopoldstrasse") {
    const double mean_tau = std::accumulate(taus.begin(), taus.end(), 0.0) /
                            static_cast<double>(taus.size());
    spec.marginals = marginals;
    spec.coupling = CopulaModel::clayton(10, tau_to_param(Family::clayton, mean_tau));
    for (SegmentId id = 1; id <= 10; ++id) spec.segment_ids.push_back(id);
    return spec;
  }
  if (name == "leopoldstrasse-2d") {
    spec.marginals = {marginals[1], marginals[2]};
    spec.coupling = CopulaModel::clayton(2, tau_to_param(Family::clayton, taus[1]));
    spec.segment_ids = {2, 3};
    return spec;
  }
  throw InvalidArgument("unknown built-in spec '" + std::string(name) + "'");
}

std::vector<std::string_view> synth_spec_names() { return {"leopoldstrasse", "leopoldstrasse-2d"}; }

}  // namespace ttd::builtin
