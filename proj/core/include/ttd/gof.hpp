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
#include <functional>
#include <span>
#include <string>

namespace ttd {

using CdfFunction = std::function<double(double)>;

// Two-sample sup |F_ref - F_model| over every jump point of both step CDFs.
// Throws InvalidArgument when either sample is empty.
double ks_statistic(std::span<const double> reference, std::span<const double> model);

// One-sample sup distance between the reference step CDF and a model CDF.
double ks_statistic(std::span<const double> reference, const CdfFunction& model_cdf);

// (1/N) sum_i ((i - 0.5)/N - F_model(x_(i)))^2 over sorted reference values.
// Throws InvalidArgument when reference is empty.
double cvm_statistic(std::span<const double> reference, const CdfFunction& model_cdf);

// Same with the model given as samples (step CDF, no smoothing).
double cvm_statistic(std::span<const double> reference, std::span<const double> model);

struct GofReport {
  std::string model;
  double ks = 0.0;
  double cvm = 0.0;
  std::size_t n_reference = 0;
  std::size_t n_model = 0;
};

GofReport compare(std::string model, std::span<const double> reference,
                  std::span<const double> model_samples);

}  // namespace ttd
