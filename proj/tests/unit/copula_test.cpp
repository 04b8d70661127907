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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ttd/copula.hpp"
#include "ttd/dependence.hpp"
#include "ttd/errors.hpp"
#include "ttd/gof.hpp"

namespace ttd {
namespace {

using V = std::vector<double>;

double clayton_cdf_2d(double a, double u, double v) {
  return std::pow(std::pow(u, -a) + std::pow(v, -a) - 1.0, -1.0 / a);
}

double gumbel_cdf_2d(double a, double u, double v) {
  return std::exp(-std::pow(std::pow(-std::log(u), a) + std::pow(-std::log(v), a), 1.0 / a));
}

double gaussian_density_2d(double rho, double u, double v) {
  const boost::math::normal_distribution<double> n01;
  const double x = boost::math::quantile(n01, u);
  const double y = boost::math::quantile(n01, v);
  const double q = (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - rho * rho));
  return std::exp(-q) / std::sqrt(1.0 - rho * rho);
}

// Rank-based pseudo-observations of a raw sample matrix.
Matrix ranks_of(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto r = average_ranks(x.column(c));
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out(i, c) = r[i] / static_cast<double>(x.rows() + 1);
    }
  }
  return out;
}

std::vector<CopulaModel> representative_2d() {
  return {CopulaModel::gaussian(2, 0.5), CopulaModel::gaussian(2, -0.4),
          CopulaModel::student_t(2, 0.5, 5.0), CopulaModel::clayton(2, 2.0),
          CopulaModel::gumbel(2, 1.8)};
}

TEST(CopulaModel, ValidationAndDescription) {
  EXPECT_NO_THROW(CopulaModel::clayton(10, 0.698).validate());
  EXPECT_THROW(CopulaModel::clayton(2, 0.0), InvalidArgument);
  EXPECT_THROW(CopulaModel::gumbel(2, 0.9), InvalidArgument);
  EXPECT_THROW(CopulaModel::gaussian(3, -0.5), InvalidArgument);
  EXPECT_NO_THROW(CopulaModel::gaussian(3, -0.49));
  EXPECT_THROW(CopulaModel::gaussian(2, 1.0), InvalidArgument);
  EXPECT_THROW(CopulaModel::student_t(2, 0.3, 2.0), InvalidArgument);
  EXPECT_THROW(CopulaModel::independence(1), InvalidArgument);

  CopulaModel missing{Family::clayton, 2, std::nullopt, std::nullopt, std::nullopt};
  EXPECT_THROW(missing.validate(), InvalidArgument);
  CopulaModel extra{Family::clayton, 2, 1.0, 0.5, std::nullopt};
  EXPECT_THROW(extra.validate(), InvalidArgument);

  EXPECT_FALSE(describe(CopulaModel::clayton(2, 2.5)).empty());
}

TEST(CopulaModel, FamilyNames) {
  for (Family f : {Family::independence, Family::gaussian, Family::student_t, Family::clayton,
                   Family::gumbel}) {
    EXPECT_EQ(parse_family(to_string(f)), f);
  }
  EXPECT_EQ(parse_family("t"), Family::student_t);
  EXPECT_THROW(parse_family("frank"), InvalidArgument);
}

TEST(CopulaDensity, IndependenceCases) {
  EXPECT_EQ(copula_density(CopulaModel::independence(3), V{0.1, 0.5, 0.9}), 1.0);
  EXPECT_NEAR(copula_density(CopulaModel::gaussian(2, 0.0), V{0.5, 0.5}), 1.0, 1e-14);
  for (const V& u : {V{0.1, 0.9}, V{0.5, 0.5}, V{0.03, 0.2}}) {
    EXPECT_NEAR(copula_density(CopulaModel::gumbel(2, 1.0), u), 1.0, 1e-12);
  }
}

TEST(CopulaDensity, ClaytonMatchesMixedPartialOfCdf) {
  const double a = 2.595;
  const double fd = oracle::mixed_partial_2d(
      [a](double u, double v) { return clayton_cdf_2d(a, u, v); }, 0.5, 0.5);
  const double c = copula_density(CopulaModel::clayton(2, a), V{0.5, 0.5});
  EXPECT_NEAR(c, fd, 1e-6);
  EXPECT_NEAR(c, 1.6910306582044287, 1e-10);
}

TEST(CopulaDensity, ArchimedeanMatchesMixedPartialOnGrid) {
  for (double u : {0.1, 0.35, 0.8}) {
    for (double v : {0.2, 0.6, 0.9}) {
      const double fc = oracle::mixed_partial_2d(
          [](double x, double y) { return clayton_cdf_2d(0.9, x, y); }, u, v);
      EXPECT_NEAR(copula_density(CopulaModel::clayton(2, 0.9), V{u, v}), fc, 1e-5);
      const double fg = oracle::mixed_partial_2d(
          [](double x, double y) { return gumbel_cdf_2d(1.993, x, y); }, u, v);
      EXPECT_NEAR(copula_density(CopulaModel::gumbel(2, 1.993), V{u, v}), fg, 1e-5);
    }
  }
}

TEST(CopulaDensity, HighPrecisionReferenceValues) {
  EXPECT_NEAR(copula_density(CopulaModel::clayton(3, 0.698), V{0.3, 0.6, 0.8}),
              0.95386054138997667616, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::gumbel(2, 1.993), V{0.3, 0.7}),
              0.66645679971876426594, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::gumbel(3, 1.363), V{0.2, 0.5, 0.9}),
              0.55616000686751906218, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::gumbel(4, 2.5), V{0.15, 0.4, 0.55, 0.8}),
              0.12285877654790332514, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::gaussian(3, 0.387), V{0.2, 0.5, 0.9}),
              0.60361774520082271910, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::gaussian(2, -0.5), V{0.2, 0.7}),
              1.31545823691510593798, 1e-10);
  EXPECT_NEAR(copula_density(CopulaModel::student_t(3, 0.428, 6.582), V{0.2, 0.5, 0.9}),
              0.48646245702516074318, 1e-9);
}

TEST(CopulaDensity, GaussianMatchesBivariateFormula) {
  for (double rho : {-0.7, -0.2, 0.3, 0.9}) {
    for (double u : {0.05, 0.4, 0.93}) {
      for (double v : {0.12, 0.5, 0.77}) {
        EXPECT_NEAR(copula_density(CopulaModel::gaussian(2, rho), V{u, v}),
                    gaussian_density_2d(rho, u, v), 1e-10 * gaussian_density_2d(rho, u, v));
      }
    }
  }
}

TEST(CopulaDensity, StudentTApproachesGaussianForLargeNu) {
  const V u{0.2, 0.65, 0.4};
  const double g = copula_density(CopulaModel::gaussian(3, 0.4), u);
  const double t = copula_density(CopulaModel::student_t(3, 0.4, 1e6), u);
  EXPECT_NEAR(t, g, 1e-4);
}

TEST(CopulaDensity, ExchangeableUnderPermutation) {
  const std::vector<CopulaModel> models{
      CopulaModel::gaussian(4, 0.35), CopulaModel::gaussian(4, -0.2),
      CopulaModel::student_t(4, 0.35, 4.0), CopulaModel::clayton(4, 1.7),
      CopulaModel::gumbel(4, 2.2)};
  V u{0.12, 0.47, 0.66, 0.91};
  for (const auto& m : models) {
    const double base = copula_log_density(m, u);
    V p = u;
    std::sort(p.begin(), p.end());
    do {
      EXPECT_NEAR(copula_log_density(m, p), base, 1e-12 * std::max(1.0, std::abs(base)))
          << describe(m);
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST(CopulaDensity, HighDimensionFinite) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
  const std::vector<CopulaModel> models{
      CopulaModel::gaussian(10, 0.6), CopulaModel::student_t(10, 0.6, 3.0),
      CopulaModel::clayton(10, 2.93), CopulaModel::gumbel(10, 3.0),
      CopulaModel::gumbel(10, 1.0 + 1e-9)};
  for (const auto& m : models) {
    for (int i = 0; i < 200; ++i) {
      V u(10);
      for (double& x : u) x = unif(gen);
      const double l = copula_log_density(m, u);
      EXPECT_TRUE(std::isfinite(l)) << describe(m);
      if (m.family == Family::gumbel && *m.alpha < 1.0 + 1e-6) EXPECT_NEAR(l, 0.0, 1e-6);
    }
  }
}

TEST(CopulaDensity, Errors) {
  EXPECT_THROW(copula_density(CopulaModel::clayton(2, 1.0), V{0.0, 0.5}), InvalidArgument);
  EXPECT_THROW(copula_density(CopulaModel::clayton(2, 1.0), V{0.5, 1.0}), InvalidArgument);
  EXPECT_THROW(copula_density(CopulaModel::clayton(2, 1.0), V{0.5, 0.5, 0.5}), DimensionMismatch);
  CopulaModel bad{Family::gumbel, 2, 0.5, std::nullopt, std::nullopt};
  EXPECT_THROW(copula_density(bad, V{0.5, 0.5}), InvalidArgument);
}

TEST(CopulaDensity, MonteCarloIntegralIsOne) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = 1'000'000;
  for (const auto& m : representative_2d()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::clamp(unif(gen), 1e-12, 1.0 - 1e-12);
      const double v = std::clamp(unif(gen), 1e-12, 1.0 - 1e-12);
      sum += copula_density(m, V{u, v});
    }
    EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 0.01) << describe(m);
  }
}

TEST(CopulaCdf, ClosedFormAndProduct) {
  EXPECT_NEAR(copula_cdf(CopulaModel::clayton(2, 2.0), V{0.5, 0.5}).value,
              0.37796447300922722, 1e-14);
  EXPECT_NEAR(copula_cdf(CopulaModel::gaussian(2, 0.0), V{0.3, 0.7}).value, 0.21, 1e-9);
  EXPECT_NEAR(copula_cdf(CopulaModel::independence(3), V{0.3, 0.7, 0.5}).value, 0.105, 1e-15);
  EXPECT_NEAR(copula_cdf(CopulaModel::gumbel(2, 1.993), V{0.3, 0.7}).value,
              gumbel_cdf_2d(1.993, 0.3, 0.7), 1e-14);
}

TEST(CopulaCdf, ClaytonAgreesWithSampleFrequency) {
  const auto u = copula_sample(CopulaModel::clayton(2, 2.0), 200000, 12);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < u.rows(); ++i) hits += (u(i, 0) <= 0.5 && u(i, 1) <= 0.5);
  const double p = 1.0 / std::sqrt(7.0);
  const double se = std::sqrt(p * (1.0 - p) / 200000.0);
  EXPECT_NEAR(static_cast<double>(hits) / 200000.0, p, 4.0 * se);
}

TEST(CopulaCdf, EllipticalHighPrecisionReferenceValues) {
  EXPECT_NEAR(copula_cdf(CopulaModel::gaussian(2, 0.701), V{0.3, 0.6}).value,
              0.27353139110890061475, 1e-8);
  EXPECT_NEAR(copula_cdf(CopulaModel::gaussian(2, -0.6), V{0.3, 0.6}).value,
              0.09149608928959930170, 1e-8);
  EXPECT_NEAR(copula_cdf(CopulaModel::student_t(2, 0.5, 4.0), V{0.3, 0.6}).value,
              0.24280940140298069971, 1e-8);
  EXPECT_NEAR(copula_cdf(CopulaModel::student_t(2, -0.4, 4.0), V{0.3, 0.6}).value,
              0.12238226778482856081, 1e-8);
}

TEST(CopulaCdf, NegativeCorrelationInHigherDimensionReportsError) {
  const auto m = CopulaModel::gaussian(3, -0.3);
  const V u{0.4, 0.7, 0.6};
  const auto est = copula_cdf(m, u);
  EXPECT_GT(est.std_error, 0.0);
  const auto s = copula_sample(m, 400000, 21);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    hits += (s(i, 0) <= u[0] && s(i, 1) <= u[1] && s(i, 2) <= u[2]);
  }
  const double freq = static_cast<double>(hits) / 400000.0;
  const double se_freq = std::sqrt(freq * (1.0 - freq) / 400000.0);
  EXPECT_NEAR(est.value, freq, 4.0 * std::hypot(est.std_error, se_freq));
}

TEST(CopulaCdf, GroundedBoundedAndUniformLimit) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  const std::vector<CopulaModel> models{
      CopulaModel::gaussian(3, 0.5), CopulaModel::student_t(3, 0.3, 6.0),
      CopulaModel::clayton(3, 1.5), CopulaModel::gumbel(3, 2.0), CopulaModel::gaussian(2, -0.8)};
  for (const auto& m : models) {
    for (int i = 0; i < 20; ++i) {
      V u(static_cast<std::size_t>(m.dim));
      for (double& x : u) x = unif(gen);
      const double c = copula_cdf(m, u).value;
      const double lower = std::max(0.0, std::accumulate(u.begin(), u.end(), 0.0) - m.dim + 1.0);
      EXPECT_LE(c, *std::min_element(u.begin(), u.end()) + 1e-9) << describe(m);
      EXPECT_GE(c, lower - 1e-9) << describe(m);
    }
    const V top(static_cast<std::size_t>(m.dim), 1.0 - 1e-9);
    EXPECT_NEAR(copula_cdf(m, top).value, 1.0, 1e-7) << describe(m);
  }
}

TEST(CopulaSample, UniformMarginsAndDeterminism) {
  const std::vector<CopulaModel> models{
      CopulaModel::gaussian(3, 0.6), CopulaModel::gaussian(3, -0.4),
      CopulaModel::student_t(3, 0.6, 4.0), CopulaModel::clayton(3, 2.0),
      CopulaModel::gumbel(3, 2.0), CopulaModel::independence(3)};
  for (const auto& m : models) {
    const auto u = copula_sample(m, 100000, 31);
    ASSERT_EQ(u.rows(), 100000u);
    ASSERT_EQ(u.cols(), 3u);
    for (double x : u.data()) ASSERT_TRUE(x > 0.0 && x < 1.0);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_LT(ks_statistic(u.column(c), [](double t) { return std::clamp(t, 0.0, 1.0); }),
                0.02)
          << describe(m) << " column " << c;
    }
    EXPECT_EQ(copula_sample(m, 500, 8), copula_sample(m, 500, 8));
  }
  EXPECT_THROW(copula_sample(CopulaModel::clayton(2, 1.0), 0, 1), InvalidArgument);
}

TEST(CopulaSample, KendallTauExamples) {
  const auto g = copula_sample(CopulaModel::gaussian(2, 0.0), 100000, 1);
  EXPECT_NEAR(kendall_tau(g.column(0), g.column(1)), 0.0, 0.01);
  const auto c = copula_sample(CopulaModel::clayton(2, 2.595), 100000, 2);
  EXPECT_NEAR(kendall_tau(c.column(0), c.column(1)), 0.56474428726877, 0.02);
  const auto u = copula_sample(CopulaModel::gumbel(2, 1.993), 100000, 3);
  EXPECT_NEAR(kendall_tau(u.column(0), u.column(1)), 0.49824385348721, 0.02);
}

TEST(CopulaSample, NegativeCorrelationTauInHigherDimension) {
  const double rho = -0.3;
  const auto u = copula_sample(CopulaModel::gaussian(4, rho), 100000, 4);
  const double expected = 2.0 / M_PI * std::asin(rho);
  for (const auto& p : adjacent_taus(u)) EXPECT_NEAR(p.tau, expected, 0.02);
}

TEST(CopulaSample, AgreesWithDensityOnGrid) {
  // 20 x 20 histogram of 1e6 draws against cell masses from nested
  // adaptive quadrature of the density.
  using boost::math::quadrature::gauss_kronrod;
  constexpr int kCells = 20;
  constexpr std::size_t kDraws = 1'000'000;
  for (const auto& m : representative_2d()) {
    const auto u = copula_sample(m, kDraws, 2026);
    std::vector<double> observed(kCells * kCells, 0.0);
    for (std::size_t i = 0; i < kDraws; ++i) {
      const int a = std::min(kCells - 1, static_cast<int>(u(i, 0) * kCells));
      const int b = std::min(kCells - 1, static_cast<int>(u(i, 1) * kCells));
      observed[static_cast<std::size_t>(a * kCells + b)] += 1.0;
    }
    double chi2 = 0.0, total_mass = 0.0;
    for (int a = 0; a < kCells; ++a) {
      for (int b = 0; b < kCells; ++b) {
        const double u0 = a / double(kCells), u1 = (a + 1) / double(kCells);
        const double v0 = b / double(kCells), v1 = (b + 1) / double(kCells);
        const double mass = gauss_kronrod<double, 15>::integrate(
            [&](double x) {
              return gauss_kronrod<double, 15>::integrate(
                  [&](double y) { return copula_density(m, V{x, y}); }, v0, v1, 10, 1e-10);
            },
            u0, u1, 10, 1e-10);
        total_mass += mass;
        const double expected = mass * static_cast<double>(kDraws);
        const double diff = observed[static_cast<std::size_t>(a * kCells + b)] - expected;
        chi2 += diff * diff / expected;
      }
    }
    EXPECT_NEAR(total_mass, 1.0, 1e-6) << describe(m);
    const boost::math::chi_squared_distribution<double> dist(kCells * kCells - 1);
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    EXPECT_GT(p, 0.001) << describe(m) << " chi2 = " << chi2;
  }
}

TEST(CopulaSample, ClaytonHasHeavierLowerTailThanMatchedGaussian) {
  const double q = 0.01;
  const std::size_t n = 1'000'000;
  auto tail = [&](const CopulaModel& m) {
    const auto u = copula_sample(m, n, 17);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += (u(i, 0) < q && u(i, 1) < q);
    return static_cast<double>(hits) / static_cast<double>(n) / q;
  };
  const double clayton = tail(CopulaModel::clayton(2, 2.0));
  const double gaussian = tail(CopulaModel::gaussian(2, std::sin(M_PI * 0.5 / 2.0)));
  EXPECT_GT(clayton, gaussian);
  EXPECT_GT(clayton, 0.6);  // lower tail dependence 2^(-1/2)
}

TEST(FitCopula, RecoversTwoDimensionalClayton) {
  const auto raw = copula_sample(CopulaModel::clayton(2, 2.595), 4495, 42);
  const auto fit = fit_copula(Family::clayton, ranks_of(raw));
  EXPECT_NEAR(*fit.model.alpha, 2.595, 0.15);
  EXPECT_TRUE(fit.converged);
  EXPECT_TRUE(std::isfinite(fit.log_likelihood));
}

TEST(FitCopula, RecoversTenDimensionalClayton) {
  const auto raw = copula_sample(CopulaModel::clayton(10, 0.698), 4495, 43);
  const auto fit = fit_copula(Family::clayton, ranks_of(raw));
  EXPECT_NEAR(*fit.model.alpha, 0.698, 0.1);
  EXPECT_EQ(fit.model.dim, 10);
}

TEST(FitCopula, RecoversGumbelAndGaussian) {
  const auto g = fit_copula(Family::gumbel, ranks_of(copula_sample(CopulaModel::gumbel(3, 1.993), 4000, 5)));
  EXPECT_NEAR(*g.model.alpha, 1.993, 0.1);
  const auto n = fit_copula(Family::gaussian, ranks_of(copula_sample(CopulaModel::gaussian(3, 0.6), 4000, 6)));
  EXPECT_NEAR(*n.model.rho, 0.6, 0.03);
  const auto neg = fit_copula(Family::gaussian, ranks_of(copula_sample(CopulaModel::gaussian(2, -0.5), 4000, 7)));
  EXPECT_NEAR(*neg.model.rho, -0.5, 0.03);
}

TEST(FitCopula, StudentTRecoversCorrelationAndHeavyTails) {
  const auto fit = fit_copula(Family::student_t,
                              ranks_of(copula_sample(CopulaModel::student_t(3, 0.5, 4.0), 4000, 8)));
  EXPECT_NEAR(*fit.model.rho, 0.5, 0.05);
  EXPECT_GT(*fit.model.nu, 2.05);
  EXPECT_LT(*fit.model.nu, 10.0);
  EXPECT_GE(fit.log_likelihood, fit.start_log_likelihood);
}

TEST(FitCopula, IndependenceLimits) {
  const auto pseudo = ranks_of(copula_sample(CopulaModel::independence(2), 100000, 9));
  EXPECT_LT(*fit_copula(Family::clayton, pseudo).model.alpha, 0.05);
  EXPECT_LT(std::abs(*fit_copula(Family::gaussian, pseudo).model.rho), 0.02);
}

TEST(FitCopula, OptimumNotWorseThanStartAndLikelihoodConsistent) {
  const auto pseudo = ranks_of(copula_sample(CopulaModel::clayton(3, 1.2), 1500, 10));
  for (Family f : kFittedFamilies) {
    const auto fit = fit_copula(f, pseudo);
    EXPECT_GE(fit.log_likelihood, fit.start_log_likelihood) << to_string(f);
    EXPECT_NEAR(fit.log_likelihood, copula_log_likelihood(fit.model, pseudo),
                1e-8 * std::max(1.0, std::abs(fit.log_likelihood)))
        << to_string(f);
    EXPECT_EQ(fit.model.family, f);
    EXPECT_NO_THROW(fit.model.validate());
  }
}

TEST(FitCopula, Errors) {
  EXPECT_THROW(fit_copula(Family::clayton, Matrix(9, 2, 0.5)), InvalidArgument);
  EXPECT_THROW(fit_copula(Family::clayton, Matrix(20, 1, 0.5)), InvalidArgument);
  Matrix boundary(20, 2, 0.5);
  boundary(3, 1) = 1.0;
  EXPECT_THROW(fit_copula(Family::clayton, boundary), InvalidArgument);
}

}  // namespace
}  // namespace ttd
