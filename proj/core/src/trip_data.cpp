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

#include "ttd/trip_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>

#include "ttd/errors.hpp"
#include "ttd/random.hpp"

namespace ttd {
namespace {

std::string_view trim_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct PairHash {
  std::size_t operator()(const std::pair<std::string, SegmentId>& p) const noexcept {
    return std::hash<std::string>{}(p.first) * 31u + std::hash<int>{}(p.second);
  }
};

}  // namespace

SegmentSeries::SegmentSeries(std::vector<SegmentId> segment_ids, Matrix travel_times,
                             std::vector<std::string> drive_ids)
    : segment_ids_(std::move(segment_ids)),
      times_(std::move(travel_times)),
      drive_ids_(std::move(drive_ids)) {
  if (segment_ids_.empty()) throw InvalidArgument("a series needs at least one segment");
  if (times_.cols() != segment_ids_.size()) {
    throw InvalidArgument("travel-time columns do not match the segment list");
  }
  if (times_.rows() < 1) throw InvalidArgument("a series needs at least one trip");
  if (drive_ids_.size() != times_.rows()) {
    throw InvalidArgument("drive ids do not match the number of trips");
  }
  for (double v : times_.data()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("travel times must be finite and positive");
    }
  }
}

SegmentSeries SegmentSeries::select(std::span<const SegmentId> segment_ids) const {
  std::vector<std::size_t> cols;
  for (SegmentId id : segment_ids) {
    const auto it = std::find(segment_ids_.begin(), segment_ids_.end(), id);
    if (it == segment_ids_.end()) {
      throw InvalidArgument("segment " + std::to_string(id) + " is not part of the series");
    }
    cols.push_back(static_cast<std::size_t>(it - segment_ids_.begin()));
  }
  Matrix m(num_trips(), cols.size());
  for (std::size_t r = 0; r < num_trips(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = times_(r, cols[c]);
  }
  return SegmentSeries({segment_ids.begin(), segment_ids.end()}, std::move(m), drive_ids_);
}

SegmentSeries SegmentSeries::prefix(std::size_t count) const {
  if (count < 1 || count > num_segments()) throw InvalidArgument("prefix length out of range");
  return select(std::span<const SegmentId>(segment_ids_).first(count));
}

std::vector<TripRecord> load_trips(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  std::string_view header = trim_eol(line);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (header != kTripCsvHeader) {
    throw ParseError(1, "expected header '" + std::string(kTripCsvHeader) + "'");
  }

  std::vector<TripRecord> records;
  std::unordered_map<std::pair<std::string, SegmentId>, std::size_t, PairHash> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim_eol(line);
    if (row.empty()) continue;

    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 comma-separated fields");
    }
    TripRecord rec;
    rec.drive_id = std::string(row.substr(0, c1));
    if (rec.drive_id.empty()) throw ParseError(line_no, "empty drive_id");
    if (!parse_number(row.substr(c1 + 1, c2 - c1 - 1), rec.segment_id)) {
      throw ParseError(line_no, "segment_id is not an integer");
    }
    if (rec.segment_id < 1) throw DomainError(line_no, "segment_id must be at least 1");
    if (!parse_number(row.substr(c2 + 1), rec.travel_time)) {
      throw ParseError(line_no, "travel_time_s is not a number");
    }
    if (!std::isfinite(rec.travel_time) || !(rec.travel_time > 0.0)) {
      throw DomainError(line_no, "travel_time_s must be finite and positive");
    }
    const auto [it, inserted] = seen.emplace(std::make_pair(rec.drive_id, rec.segment_id), line_no);
    if (!inserted) {
      throw DuplicateError(line_no, "duplicate (drive_id, segment_id) = (" + rec.drive_id + ", " +
                                        std::to_string(rec.segment_id) + "), first seen on line " +
                                        std::to_string(it->second));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TripRecord> load_trips(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load_trips(in);
}

std::vector<SegmentId> segment_ids_of(std::span<const TripRecord> records) {
  std::set<SegmentId> ids;
  for (const auto& r : records) ids.insert(r.segment_id);
  return {ids.begin(), ids.end()};
}

AssembledSeries assemble_series(std::span<const TripRecord> records,
                                std::span<const SegmentId> segment_ids) {
  if (segment_ids.empty()) throw InvalidArgument("no segments requested");
  std::map<SegmentId, std::size_t> column;
  for (std::size_t c = 0; c < segment_ids.size(); ++c) {
    if (!column.emplace(segment_ids[c], c).second) {
      throw InvalidArgument("segment " + std::to_string(segment_ids[c]) + " requested twice");
    }
  }

  struct Partial {
    std::vector<double> times;
    std::vector<int> hits;
  };
  std::map<std::string, Partial> drives;
  for (const auto& rec : records) {
    auto& p = drives[rec.drive_id];
    if (p.times.empty()) {
      p.times.assign(segment_ids.size(), 0.0);
      p.hits.assign(segment_ids.size(), 0);
    }
    const auto it = column.find(rec.segment_id);
    if (it == column.end()) continue;
    p.times[it->second] = rec.travel_time;
    ++p.hits[it->second];
  }

  std::vector<std::string> ids;
  std::vector<const Partial*> complete;
  for (const auto& [id, p] : drives) {
    if (std::all_of(p.hits.begin(), p.hits.end(), [](int h) { return h == 1; })) {
      ids.push_back(id);
      complete.push_back(&p);
    }
  }
  if (complete.empty()) throw EmptyResult("no drive covers every requested segment");

  Matrix m(complete.size(), segment_ids.size());
  for (std::size_t r = 0; r < complete.size(); ++r) {
    for (std::size_t c = 0; c < segment_ids.size(); ++c) m(r, c) = complete[r]->times[c];
  }
  const std::size_t discarded = drives.size() - complete.size();
  return {SegmentSeries({segment_ids.begin(), segment_ids.end()}, std::move(m), std::move(ids)),
          discarded};
}

void write_trips(std::ostream& out, const SegmentSeries& series) {
  out << kTripCsvHeader << '\n';
  for (std::size_t r = 0; r < series.num_trips(); ++r) {
    for (std::size_t c = 0; c < series.num_segments(); ++c) {
      out << series.drive_ids()[r] << ',' << series.segment_ids()[c] << ','
          << format_double(series.travel_times()(r, c)) << '\n';
    }
  }
}

SegmentSeries synthesize(const SynthSpec& spec) {
  const std::size_t s = spec.marginals.size();
  if (s == 0) throw InvalidArgument("synthesis needs at least one marginal");
  if (static_cast<std::size_t>(spec.coupling.dim) != s) {
    throw DimensionMismatch("coupling dimension " + std::to_string(spec.coupling.dim) +
                            " does not match " + std::to_string(s) + " marginals");
  }
  if (spec.n_trips < 1) throw InvalidArgument("n_trips must be positive");
  if (!(spec.gps_artifact >= 0.0 && spec.gps_artifact <= 1.0)) {
    throw InvalidArgument("gps artifact rate must lie in [0, 1]");
  }
  std::vector<SegmentId> ids = spec.segment_ids;
  if (ids.empty()) {
    for (std::size_t i = 0; i < s; ++i) ids.push_back(static_cast<SegmentId>(i + 1));
  }
  if (ids.size() != s) throw DimensionMismatch("segment_ids do not match the marginals");

  const Matrix u = copula_sample(spec.coupling, spec.n_trips, spec.seed);

  // Marginals are conditioned on positive travel time so that every row is a
  // valid trip; the copula itself is untouched.
  std::vector<double> mass_below_zero(s);
  for (std::size_t c = 0; c < s; ++c) mass_below_zero[c] = gmm_cdf(spec.marginals[c], 0.0);

  Matrix times(spec.n_trips, s);
  constexpr double kBelowOne = 1.0 - 0x1.0p-53;
  for (std::size_t r = 0; r < spec.n_trips; ++r) {
    for (std::size_t c = 0; c < s; ++c) {
      const double f0 = mass_below_zero[c];
      const double p = std::min(f0 + u(r, c) * (1.0 - f0), kBelowOne);
      times(r, c) = std::max(gmm_quantile(spec.marginals[c], p),
                             std::numeric_limits<double>::min());
    }
  }

  if (spec.gps_artifact > 0.0 && s >= 2) {
    Rng rng(mix_seed(spec.seed, 0xa27));
    for (std::size_t r = 0; r < spec.n_trips; ++r) {
      if (rng.uniform() >= spec.gps_artifact) continue;
      const auto j = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(s - 1)),
                              s - 2);
      const double ratio = spec.marginals[j + 1].mean() / spec.marginals[j].mean();
      if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw InvalidArgument("gps artifact needs positive marginal means");
      }
      times(r, j + 1) = times(r, j) * ratio;
    }
  }

  const std::size_t width = std::max<std::size_t>(6, std::to_string(spec.n_trips).size());
  std::vector<std::string> drive_ids(spec.n_trips);
  for (std::size_t r = 0; r < spec.n_trips; ++r) {
    std::string num = std::to_string(r + 1);
    drive_ids[r] = "d" + std::string(width - num.size(), '0') + num;
  }
  return SegmentSeries(std::move(ids), std::move(times), std::move(drive_ids));
}

}  // namespace ttd
