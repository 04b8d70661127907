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

// Univariate distribution functions used across the library. Thin wrappers
// so that callers do not depend on Boost.Math directly.

namespace ttd::special {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double student_t_cdf(double x, double dof);
double student_t_quantile(double p, double dof);
double student_t_log_pdf(double x, double dof);

double chi_squared_pdf(double x, double dof);
double chi_squared_quantile(double p, double dof);

double log_gamma(double x);

}  // namespace ttd::special
