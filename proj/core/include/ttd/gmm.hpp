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
#include <span>
#include <vector>

#include "ttd/random.hpp"

namespace ttd {

// Finite Gaussian mixture used as the marginal travel-time model of one
// segment. Components are kept in ascending order of their means.
//
// sigmas[j] is the component standard deviation, i.e. the inverse square root
// of the component precision.
class GmmParams {
 public:
  GmmParams() = default;

  // Validates and canonicalizes (sorts by mean). Throws InvalidArgument when
  // sizes differ, a sigma is not positive, a weight lies outside (0, 1], or
  // the weights do not sum to one within 1e-9.
  GmmParams(std::vector<double> means, std::vector<double> sigmas,
            std::vector<double> weights);

  static GmmParams normal(double mean, double sigma) {
    return GmmParams({mean}, {sigma}, {1.0});
  }

  std::size_t k() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& sigmas() const noexcept { return sigmas_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double mean() const;
  double variance() const;

  friend bool operator==(const GmmParams&, const GmmParams&) = default;

 private:
  std::vector<double> means_;
  std::vector<double> sigmas_;
  std::vector<double> weights_;
};

struct GmmFitOptions {
  int restarts = 5;
  int max_iterations = 500;
  double tolerance = 1e-8;  // stop when the log-likelihood gain drops below
  double sigma_floor = 1e-3;
};

struct GmmFit {
  GmmParams params;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  // Log-likelihood after each E-step of the winning restart.
  std::vector<double> trace;
};

// EM with k-means++ seeding; best of `options.restarts` runs by final
// log-likelihood. A run that hits max_iterations is returned with
// converged = false.
//
// Throws InvalidArgument if k < 1, fewer than 10*k samples are given or a
// sample is not finite; DegenerateInput if all samples are equal. Samples
// need not be positive: draws from an untruncated mixture can dip below zero.
GmmFit fit_gmm(std::span<const double> samples, std::size_t k, std::uint64_t seed,
               const GmmFitOptions& options = {});

double gmm_pdf(const GmmParams& params, double x);
double gmm_cdf(const GmmParams& params, double x);

// Inverse CDF by bracketed root finding on gmm_cdf over
// [min mean - 12 max sigma, max mean + 12 max sigma]. Throws InvalidArgument
// unless 0 < p < 1.
double gmm_quantile(const GmmParams& params, double p);

std::vector<double> gmm_sample(const GmmParams& params, std::size_t n, std::uint64_t seed);

// One draw using the caller's generator: pick a component by weight, then
// draw from that normal.
double gmm_draw(const GmmParams& params, Rng& rng);

// Log-likelihood of samples under params.
double gmm_log_likelihood(const GmmParams& params, std::span<const double> samples);

}  // namespace ttd
