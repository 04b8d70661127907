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

#include "ttd/gof.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ttd/errors.hpp"
#include "ttd/path.hpp"

namespace ttd {
namespace {

std::vector<double> sorted_copy(std::span<const double> values, const char* what) {
  if (values.empty()) throw InvalidArgument(std::string(what) + " sample is empty");
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double ks_statistic(std::span<const double> reference, std::span<const double> model) {
  const auto a = sorted_copy(reference, "reference");
  const auto b = sorted_copy(model, "model");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

double ks_statistic(std::span<const double> reference, const CdfFunction& model_cdf) {
  const auto x = sorted_copy(reference, "reference");
  const double n = static_cast<double>(x.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = model_cdf(x[i]);
    sup = std::max({sup, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(sup, 0.0, 1.0);
}

double cvm_statistic(std::span<const double> reference, const CdfFunction& model_cdf) {
  const auto x = sorted_copy(reference, "reference");
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (static_cast<double>(i) + 0.5) / n - model_cdf(x[i]);
    sum += d * d;
  }
  return sum / n;
}

double cvm_statistic(std::span<const double> reference, std::span<const double> model) {
  const EmpiricalCdf cdf(model);
  return cvm_statistic(reference, [&cdf](double t) { return cdf(t); });
}

GofReport compare(std::string model, std::span<const double> reference,
                  std::span<const double> model_samples) {
  GofReport r;
  r.model = std::move(model);
  r.ks = ks_statistic(reference, model_samples);
  r.cvm = cvm_statistic(reference, model_samples);
  r.n_reference = reference.size();
  r.n_model = model_samples.size();
  return r;
}

}  // namespace ttd
