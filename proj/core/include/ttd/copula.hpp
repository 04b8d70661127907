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
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ttd/matrix.hpp"

namespace ttd {

enum class Family { independence, gaussian, student_t, clayton, gumbel };

std::string_view to_string(Family family);
// Accepts the names produced by to_string plus "t" and "gauss". Throws
// InvalidArgument for anything else.
Family parse_family(std::string_view name);

inline constexpr Family kFittedFamilies[] = {Family::gaussian, Family::student_t,
                                             Family::clayton, Family::gumbel};

// Exchangeable copula in dimension dim >= 2.
//
// Elliptical families use the uniform correlation matrix
// R = (1 - rho) I + rho 11', positive definite for -1/(dim-1) < rho < 1.
// Clayton: C(u) = (sum u_i^-alpha - dim + 1)^(-1/alpha), alpha > 0.
// Gumbel:  C(u) = exp(-(sum (-ln u_i)^alpha)^(1/alpha)), alpha >= 1.
// Student-t degrees of freedom must satisfy 2 < nu (fits search (2, 50]).
struct CopulaModel {
  Family family = Family::independence;
  int dim = 2;
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<double> nu;

  static CopulaModel independence(int dim);
  static CopulaModel gaussian(int dim, double rho);
  static CopulaModel student_t(int dim, double rho, double nu);
  static CopulaModel clayton(int dim, double alpha);
  static CopulaModel gumbel(int dim, double alpha);

  // Throws InvalidArgument when parameters are missing, extra, or outside
  // the family's domain.
  void validate() const;

  friend bool operator==(const CopulaModel&, const CopulaModel&) = default;
};

std::string describe(const CopulaModel& model);

double copula_log_density(const CopulaModel& model, std::span<const double> u);
double copula_density(const CopulaModel& model, std::span<const double> u);

struct CdfEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for closed-form or quadrature results
};

// Archimedean families and independence are closed form. Elliptical families
// use one-factor quadrature when rho >= 0 (any dim) and the reflection
// identity for dim == 2; dim > 2 with rho < 0 falls back to Monte-Carlo with
// the standard error reported.
CdfEstimate copula_cdf(const CopulaModel& model, std::span<const double> u);

// n x dim matrix of draws strictly inside (0, 1).
Matrix copula_sample(const CopulaModel& model, std::size_t n, std::uint64_t seed);

struct CopulaFitOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  double clamp = 1e-10;  // pseudo-observations are clamped to [clamp, 1-clamp]
  double nu_min = 2.05;
  double nu_max = 50.0;
};

struct FitResult {
  CopulaModel model;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = true;
  // Log-likelihood at the Kendall-tau inversion start point.
  double start_log_likelihood = 0.0;
};

// Maximum-likelihood fit of `family` to pseudo-observations (rows are
// observations, each entry strictly in (0, 1)).
//
// Throws InvalidArgument when fewer than 10 rows are given, the matrix has
// fewer than 2 columns, or an entry lies outside (0, 1).
FitResult fit_copula(Family family, const Matrix& pseudo, const CopulaFitOptions& options = {});

// Sum of copula_log_density over rows (after clamping).
double copula_log_likelihood(const CopulaModel& model, const Matrix& pseudo,
                             double clamp = 1e-10);

}  // namespace ttd
