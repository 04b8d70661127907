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

#include "ttd/special.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace ttd::special {

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double student_t_cdf(double x, double dof) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), x);
}

double student_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

double student_t_log_pdf(double x, double dof) {
  return boost::math::lgamma(0.5 * (dof + 1.0)) - boost::math::lgamma(0.5 * dof) -
         0.5 * std::log(dof * M_PI) -
         0.5 * (dof + 1.0) * std::log1p(x * x / dof);
}

double chi_squared_pdf(double x, double dof) {
  return boost::math::pdf(boost::math::chi_squared_distribution<double>(dof), x);
}

double chi_squared_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

double log_gamma(double x) { return boost::math::lgamma(x); }

}  // namespace ttd::special
