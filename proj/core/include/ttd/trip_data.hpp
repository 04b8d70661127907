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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttd/copula.hpp"
#include "ttd/gmm.hpp"
#include "ttd/matrix.hpp"

namespace ttd {

using SegmentId = int;

inline constexpr std::string_view kTripCsvHeader = "drive_id,segment_id,travel_time_s";

struct TripRecord {
  std::string drive_id;
  SegmentId segment_id = 0;
  double travel_time = 0.0;  // seconds

  friend bool operator==(const TripRecord&, const TripRecord&) = default;
};

// Complete through-trips over an ordered list of segments. Immutable once
// built: rows x segments matrix of finite positive travel times. Operations
// that need two or more trips (ranks, fitting) check that themselves.
class SegmentSeries {
 public:
  // Throws InvalidArgument on shape mismatch, zero rows, or a non-finite /
  // non-positive entry.
  SegmentSeries(std::vector<SegmentId> segment_ids, Matrix travel_times,
                std::vector<std::string> drive_ids);

  std::size_t num_trips() const noexcept { return times_.rows(); }
  std::size_t num_segments() const noexcept { return times_.cols(); }
  const std::vector<SegmentId>& segment_ids() const noexcept { return segment_ids_; }
  const std::vector<std::string>& drive_ids() const noexcept { return drive_ids_; }
  const Matrix& travel_times() const noexcept { return times_; }

  std::span<const double> row(std::size_t i) const { return times_.row(i); }
  std::vector<double> column(std::size_t j) const { return times_.column(j); }

  // Sub-series restricted to the given segments, in the given order. Throws
  // InvalidArgument for an unknown segment id.
  SegmentSeries select(std::span<const SegmentId> segment_ids) const;
  // First `count` segments in traversal order.
  SegmentSeries prefix(std::size_t count) const;

 private:
  std::vector<SegmentId> segment_ids_;
  Matrix times_;
  std::vector<std::string> drive_ids_;
};

struct AssembledSeries {
  SegmentSeries series;
  std::size_t discarded_drives = 0;
};

// Parses trip CSV with header `drive_id,segment_id,travel_time_s`.
// Throws ParseError, DomainError (travel time <= 0 or not finite) or
// DuplicateError, each carrying the offending line number.
std::vector<TripRecord> load_trips(std::istream& in);
std::vector<TripRecord> load_trips(const std::filesystem::path& path);

// Keeps drives that have exactly one record for each requested segment.
// Rows are ordered by drive_id. Throws EmptyResult when no drive is complete
// and InvalidArgument for an empty or repeated segment list.
AssembledSeries assemble_series(std::span<const TripRecord> records,
                                std::span<const SegmentId> segment_ids);

// Sorted distinct segment ids present in records.
std::vector<SegmentId> segment_ids_of(std::span<const TripRecord> records);

// Writes the series in trip CSV format, one line per (drive, segment).
void write_trips(std::ostream& out, const SegmentSeries& series);

struct SynthSpec {
  std::vector<GmmParams> marginals;
  CopulaModel coupling;
  std::size_t n_trips = 0;
  std::uint64_t seed = 0;
  // Defaults to 1..S when empty.
  std::vector<SegmentId> segment_ids;
  // Fraction of rows where one adjacent segment pair gets proportional
  // travel times (single velocity spanning both segments).
  double gps_artifact = 0.0;
};

// Draws n_trips copula vectors from `coupling` and maps coordinate i through
// the quantile of marginal i restricted to positive travel times. Pure
// function of spec. Throws DimensionMismatch if coupling.dim differs from the
// number of marginals, InvalidArgument for n_trips < 2 or a bad artifact rate.
SegmentSeries synthesize(const SynthSpec& spec);

}  // namespace ttd
