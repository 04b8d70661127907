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
#include <string_view>
#include <vector>

#include "ttd/gmm.hpp"
#include "ttd/trip_data.hpp"

namespace ttd::builtin {

// Ten-segment Leopoldstrasse arterial (Munich): three-component GMM per
// segment, fitted on one year of probe-vehicle travel times.
std::vector<GmmParams> leopoldstrasse_marginals();

// Kendall tau of adjacent segment pairs (1,2), (2,3), ..., (9,10).
std::vector<double> leopoldstrasse_adjacent_taus();

inline constexpr std::size_t kLeopoldstrasseTrips = 4495;

// Built-in synthesis specs:
//   "leopoldstrasse"     10 segments, exchangeable Clayton with alpha from the
//                        mean adjacent tau.
//   "leopoldstrasse-2d"  segments 2 and 3, Clayton alpha from their pair tau.
// Throws InvalidArgument for an unknown name.
SynthSpec synth_spec(std::string_view name, std::size_t n_trips, std::uint64_t seed);

std::vector<std::string_view> synth_spec_names();

}  // namespace ttd::builtin
