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

#include "ttd/pipeline.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "ttd/errors.hpp"
#include "ttd/random.hpp"

namespace ttd::cli {
namespace {

// Seed streams: 0x1xx marginal fits, 0x2xxx copula paths, 0x3xx convolution.
std::uint64_t marginal_stream(std::size_t column) { return 0x100 + column; }
std::uint64_t copula_stream(std::size_t dim, Family family) {
  return 0x2000 + 16 * dim + static_cast<std::uint64_t>(family);
}
std::uint64_t convolution_stream(std::size_t dim) { return 0x300 + dim; }

Matrix leading_columns(const Matrix& m, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, c);
  }
  return out;
}

}  // namespace

std::vector<MarginalFit> fit_marginals(const SegmentSeries& series, std::size_t k,
                                       std::uint64_t seed) {
  std::vector<std::future<MarginalFit>> jobs;
  for (std::size_t c = 0; c < series.num_segments(); ++c) {
    jobs.push_back(std::async(std::launch::async, [&series, c, k, seed] {
      const auto column = series.column(c);
      MarginalFit out;
      out.segment_id = series.segment_ids()[c];
      out.fit = fit_gmm(column, k, mix_seed(seed, marginal_stream(c)));
      const auto& params = out.fit.params;
      out.ks = ks_statistic(column, [&params](double t) { return gmm_cdf(params, t); });
      return out;
    }));
  }
  std::vector<MarginalFit> fits;
  for (auto& job : jobs) fits.push_back(job.get());
  return fits;
}

std::vector<GmmParams> params_of(std::span<const MarginalFit> fits) {
  std::vector<GmmParams> out;
  for (const auto& f : fits) out.push_back(f.fit.params);
  return out;
}

PseudoObservations pseudo_observations(const SegmentSeries& series,
                                       std::span<const GmmParams> marginals, PseudoMode mode) {
  if (mode == PseudoMode::parametric_marginal) return to_pseudo_obs(series, marginals);
  return to_pseudo_obs(series);
}

std::vector<FamilyFit> fit_families(const Matrix& pseudo, std::span<const Family> families) {
  std::vector<std::future<FamilyFit>> jobs;
  for (Family f : families) {
    jobs.push_back(std::async(std::launch::async, [&pseudo, f] {
      FamilyFit out;
      out.family = f;
      try {
        out.result = fit_copula(f, pseudo);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      return out;
    }));
  }
  std::vector<FamilyFit> fits;
  for (auto& job : jobs) fits.push_back(job.get());
  return fits;
}

std::string display_name(Family family) {
  switch (family) {
    case Family::independence: return "Independence";
    case Family::gaussian: return "Gaussian";
    case Family::student_t: return "Student-t";
    case Family::clayton: return "Clayton";
    case Family::gumbel: return "Gumbel";
  }
  return "?";
}

std::string model_label(std::size_t dim, std::string_view model) {
  return std::to_string(dim) + "D " + std::string(model);
}

Evaluation evaluate_convolution(std::span<const GmmParams> marginals,
                                std::span<const double> reference, std::size_t m,
                                std::uint64_t seed) {
  Evaluation out;
  out.model = model_label(marginals.size(), "Convolution");
  out.estimate =
      estimate_convolution_path(marginals, m, mix_seed(seed, convolution_stream(marginals.size())));
  out.gof = compare(out.model, reference, out.estimate.samples);
  return out;
}

Evaluation evaluate_copula(std::span<const GmmParams> marginals, const CopulaModel& model,
                           std::span<const double> reference, std::size_t m, std::uint64_t seed) {
  Evaluation out;
  out.model = model_label(marginals.size(), display_name(model.family));
  out.estimate = estimate_copula_path(
      marginals, model, m, mix_seed(seed, copula_stream(marginals.size(), model.family)));
  out.gof = compare(out.model, reference, out.estimate.samples);
  return out;
}

std::vector<SweepRow> sweep(const SegmentSeries& series, const SweepOptions& options) {
  const std::size_t s = series.num_segments();
  if (options.min_length < 2 || options.min_length > s) {
    throw InvalidArgument("sweep needs a series with at least " +
                          std::to_string(std::max<std::size_t>(options.min_length, 2)) +
                          " segments");
  }
  const auto marginals = params_of(fit_marginals(series, options.k, options.seed));
  const auto pseudo = pseudo_observations(series, marginals, options.pseudo);

  std::vector<std::future<std::vector<SweepRow>>> jobs;
  for (std::size_t len = options.min_length; len <= s; ++len) {
    jobs.push_back(std::async(std::launch::async, [&, len] {
      const auto prefix = series.prefix(len);
      const auto reference = empirical_path(prefix).samples;
      const std::span<const GmmParams> m(marginals.data(), len);
      std::vector<SweepRow> rows;
      const auto conv = evaluate_convolution(m, reference, options.m, options.seed);
      rows.push_back({len, "convolution", conv.gof.ks, conv.gof.cvm});
      const auto fits = fit_families(leading_columns(pseudo.values, len), options.families);
      for (const auto& f : fits) {
        if (!f.result) throw Error(std::string(to_string(f.family)) + " fit failed: " + f.error);
        const auto ev = evaluate_copula(m, f.result->model, reference, options.m, options.seed);
        rows.push_back({len, std::string(to_string(f.family)), ev.gof.ks, ev.gof.cvm});
      }
      return rows;
    }));
  }
  std::vector<SweepRow> out;
  for (auto& job : jobs) {
    auto rows = job.get();
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace ttd::cli
