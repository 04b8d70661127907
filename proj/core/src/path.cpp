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

#include "ttd/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "ttd/errors.hpp"
#include "ttd/random.hpp"

namespace ttd {
namespace {

void check_model_draws(std::size_t m) {
  if (m < kMinModelDraws) {
    throw InvalidArgument("model-based path estimates need at least " +
                          std::to_string(kMinModelDraws) + " draws");
  }
}

void check_finite(const std::vector<double>& samples) {
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error("path estimate produced a non-finite sample");
  }
}

}  // namespace

PathTtdEstimate estimate_copula_path(std::span<const GmmParams> marginals,
                                     const CopulaModel& model, std::size_t m,
                                     std::uint64_t seed) {
  if (static_cast<std::size_t>(model.dim) != marginals.size()) {
    throw DimensionMismatch("copula dimension " + std::to_string(model.dim) + " does not match " +
                            std::to_string(marginals.size()) + " marginals");
  }
  check_model_draws(m);
  const Matrix u = copula_sample(model, m, seed);

  PathTtdEstimate est;
  est.samples.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < marginals.size(); ++c) total += gmm_quantile(marginals[c], u(r, c));
    est.samples[r] = total;
  }
  check_finite(est.samples);
  est.method = "copula:" + std::string(to_string(model.family));
  est.model = model;
  est.marginals.assign(marginals.begin(), marginals.end());
  return est;
}

PathTtdEstimate estimate_convolution_path(std::span<const GmmParams> marginals, std::size_t m,
                                          std::uint64_t seed) {
  if (marginals.empty()) throw InvalidArgument("convolution needs at least one marginal");
  check_model_draws(m);
  PathTtdEstimate est;
  est.samples.assign(m, 0.0);
  for (std::size_t c = 0; c < marginals.size(); ++c) {
    Rng rng(mix_seed(seed, 0xc0 + c));
    for (std::size_t r = 0; r < m; ++r) est.samples[r] += gmm_draw(marginals[c], rng);
  }
  check_finite(est.samples);
  est.method = "convolution";
  est.marginals.assign(marginals.begin(), marginals.end());
  return est;
}

PathTtdEstimate empirical_path(const SegmentSeries& series) {
  PathTtdEstimate est;
  est.samples.resize(series.num_trips());
  for (std::size_t r = 0; r < series.num_trips(); ++r) {
    double total = 0.0;
    for (double v : series.row(r)) total += v;
    est.samples[r] = total;
  }
  est.method = "empirical";
  return est;
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> samples)
    : sorted_(samples.begin(), samples.end()) {
  if (sorted_.empty()) throw InvalidArgument("empirical CDF needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double estimate_cdf(const PathTtdEstimate& estimate, double t) {
  if (estimate.samples.empty()) throw InvalidArgument("estimate has no samples");
  const auto below = std::count_if(estimate.samples.begin(), estimate.samples.end(),
                                   [t](double v) { return v <= t; });
  return static_cast<double>(below) / static_cast<double>(estimate.samples.size());
}

PathSummary summarize(const PathTtdEstimate& estimate) {
  const EmpiricalCdf cdf(estimate.samples);
  const auto sorted = cdf.sorted();
  const double n = static_cast<double>(sorted.size());

  PathSummary s;
  s.method = estimate.method;
  s.sample_count = sorted.size();
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  s.mean = mean;
  s.variance = sorted.size() > 1 ? var / (n - 1.0) : 0.0;
  for (int i = 1; i <= 19; ++i) {
    const double p = 0.05 * i;
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(p * n - 1e-9) - 1.0));
    s.probabilities.push_back(p);
    s.quantiles.push_back(sorted[std::min(idx, sorted.size() - 1)]);
  }
  return s;
}

void write_samples_csv(std::ostream& out, std::span<const double> samples) {
  out << "travel_time_s\n";
  char buf[64];
  for (double v : samples) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
    out.put('\n');
  }
}

std::vector<double> read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  while (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "travel_time_s") throw ParseError(1, "expected header 'travel_time_s'");
  std::vector<double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw ParseError(line_no, "travel_time_s is not a finite number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace ttd
