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

#include "ttd/copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "ttd/dependence.hpp"
#include "ttd/errors.hpp"
#include "ttd/random.hpp"
#include "ttd/special.hpp"

namespace ttd {
namespace {

constexpr double kPi = std::numbers::pi;

double open_unit(double u) {
  return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

void check_unit(std::span<const double> u, int dim) {
  if (static_cast<int>(u.size()) != dim) {
    throw DimensionMismatch("copula argument has " + std::to_string(u.size()) +
                            " coordinates, model dimension is " + std::to_string(dim));
  }
  for (double v : u) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("copula argument must lie in (0, 1)");
  }
}

double rho_lower_bound(int dim) { return -1.0 / static_cast<double>(dim - 1); }

// log det R for the exchangeable correlation matrix.
double exchangeable_log_det(double rho, int dim) {
  const double d = static_cast<double>(dim);
  return (d - 1.0) * std::log1p(-rho) + std::log1p((d - 1.0) * rho);
}

// z' R^{-1} z given sum of squares and squared sum.
double exchangeable_quad(double sum_sq, double sq_sum, double rho, int dim) {
  const double d = static_cast<double>(dim);
  return (sum_sq - rho / (1.0 + (d - 1.0) * rho) * sq_sum) / (1.0 - rho);
}

// log(sum u_i^-alpha - d + 1) from l_i = -ln u_i.
double clayton_log_sum(std::span<const double> neg_log_u, double alpha) {
  double m = 0.0;
  for (double l : neg_log_u) m = std::max(m, alpha * l);
  if (m < 700.0) {
    double s = 0.0;
    for (double l : neg_log_u) s += std::expm1(alpha * l);
    return std::log1p(s);
  }
  double s = 0.0;
  for (double l : neg_log_u) s += std::exp(alpha * l - m);
  s += (1.0 - static_cast<double>(neg_log_u.size())) * std::exp(-m);
  return m + std::log(s);
}

double clayton_log_density_from_logs(std::span<const double> neg_log_u, double alpha) {
  const std::size_t d = neg_log_u.size();
  double value = 0.0;
  double sum_l = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    value += std::log1p(static_cast<double>(k) * alpha);
    sum_l += neg_log_u[k];
  }
  value += (alpha + 1.0) * sum_l;
  value -= (1.0 / alpha + static_cast<double>(d)) * clayton_log_sum(neg_log_u, alpha);
  return value;
}

// (-1)^d times the d-th derivative of exp(-t^a), scaled by t^d, is a
// polynomial in x = t^a with non-negative coefficients:
//   beta_0 = 1, beta_{n+1} = sum_k C(n,k) |(a)_{k+1}| x beta_{n-k},
// where (a)_m is the falling factorial. All terms are non-negative.
double gumbel_log_poly(double x, double a, std::size_t d) {
  std::vector<double> falling(d + 1, 0.0);  // falling[m] = |(a)_m|
  falling[0] = 1.0;
  for (std::size_t m = 1; m <= d; ++m) {
    falling[m] = falling[m - 1] * std::abs(a - static_cast<double>(m - 1));
  }
  // Work with beta_n / x^n to keep magnitudes near one for large x.
  std::vector<double> scaled(d + 1, 0.0);
  scaled[0] = 1.0;
  for (std::size_t n = 0; n < d; ++n) {
    double acc = 0.0;
    double binom = 1.0;
    double x_pow = 1.0;  // x^{-k}
    for (std::size_t k = 0; k <= n; ++k) {
      acc += binom * falling[k + 1] * x_pow * scaled[n - k];
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
      x_pow /= x;
    }
    scaled[n + 1] = acc;
  }
  return static_cast<double>(d) * std::log(x) + std::log(scaled[d]);
}

double gumbel_log_density_from_logs(std::span<const double> neg_log_u, double theta) {
  const std::size_t d = neg_log_u.size();
  double t = 0.0;
  double tail = 0.0;
  for (double l : neg_log_u) {
    const double log_l = std::log(l);
    t += std::exp(theta * log_l);
    tail += (theta - 1.0) * log_l + l;
  }
  const double a = 1.0 / theta;
  const double x = std::pow(t, a);
  return -x + gumbel_log_poly(x, a, d) - static_cast<double>(d) * std::log(t) +
         static_cast<double>(d) * std::log(theta) + tail;
}

double student_t_log_constant(double nu, int dim) {
  const double d = static_cast<double>(dim);
  return special::log_gamma(0.5 * (nu + d)) + (d - 1.0) * special::log_gamma(0.5 * nu) -
         d * special::log_gamma(0.5 * (nu + 1.0));
}

// P(X_i <= x_i for all i) for standard normals with exchangeable
// correlation rho in [0, 1), by one-factor quadrature.
double exchangeable_normal_cdf(std::span<const double> x, double rho) {
  if (rho == 0.0) {
    double p = 1.0;
    for (double v : x) p *= special::normal_cdf(v);
    return p;
  }
  const double sr = std::sqrt(rho);
  const double sc = std::sqrt(1.0 - rho);
  auto integrand = [&](double z) {
    double p = special::normal_pdf(z);
    for (double v : x) {
      p *= special::normal_cdf((v - sr * z) / sc);
      if (p == 0.0) break;
    }
    return p;
  };
  // Break points where a factor switches from ~1 to ~0.
  std::vector<double> cuts{-12.0, 12.0};
  for (double v : x) {
    const double b = v / sr;
    if (b > -12.0 && b < 12.0) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] <= 0.0) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        integrand, cuts[i], cuts[i + 1], 15, 1e-12);
  }
  return std::clamp(total, 0.0, 1.0);
}

// Same for the exchangeable Student-t: mixing over W ~ chi2(nu),
// T = X sqrt(nu / W).
double exchangeable_t_cdf(std::span<const double> t, double rho, double nu) {
  std::vector<double> scaled(t.size());
  auto integrand = [&](double p) {
    const double w = special::chi_squared_quantile(p, nu);
    const double s = std::sqrt(w / nu);
    for (std::size_t i = 0; i < t.size(); ++i) scaled[i] = t[i] * s;
    return exchangeable_normal_cdf(scaled, rho);
  };
  const double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      integrand, 0.0, 1.0, 12, 1e-9);
  return std::clamp(value, 0.0, 1.0);
}

// Elliptical CDF in latent coordinates, any rho for dim == 2, rho >= 0
// otherwise.
double elliptical_latent_cdf(const CopulaModel& model, std::span<const double> latent) {
  const double rho = *model.rho;
  if (rho >= 0.0) {
    return model.family == Family::gaussian ? exchangeable_normal_cdf(latent, rho)
                                            : exchangeable_t_cdf(latent, rho, *model.nu);
  }
  // dim == 2: (X1, -X2) has correlation -rho.
  const double first = model.family == Family::gaussian
                           ? special::normal_cdf(latent[0])
                           : special::student_t_cdf(latent[0], *model.nu);
  const double flipped[2] = {latent[0], -latent[1]};
  const double other = model.family == Family::gaussian
                           ? exchangeable_normal_cdf(flipped, -rho)
                           : exchangeable_t_cdf(flipped, -rho, *model.nu);
  return std::clamp(first - other, 0.0, 1.0);
}

// Minimizes f on [lo, hi] with Brent's method; returns {argmin, iterations}.
template <typename F>
std::pair<double, int> brent_minimize(F f, double lo, double hi, const CopulaFitOptions& options) {
  const int bits = static_cast<int>(std::ceil(-std::log2(options.tolerance))) + 1;
  std::uintmax_t iters = static_cast<std::uintmax_t>(options.max_iterations);
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
  return {r.first, static_cast<int>(iters)};
}

// Per-row statistics reused across likelihood evaluations.
struct LogPseudo {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> neg_log_u;  // rows x cols
  std::vector<double> clamped;    // rows x cols
};

LogPseudo prepare(const Matrix& pseudo, double clamp) {
  LogPseudo lp;
  lp.rows = pseudo.rows();
  lp.cols = pseudo.cols();
  lp.neg_log_u.resize(lp.rows * lp.cols);
  lp.clamped.resize(lp.rows * lp.cols);
  for (std::size_t r = 0; r < lp.rows; ++r) {
    for (std::size_t c = 0; c < lp.cols; ++c) {
      const double u = std::clamp(pseudo(r, c), clamp, 1.0 - clamp);
      lp.clamped[r * lp.cols + c] = u;
      lp.neg_log_u[r * lp.cols + c] = -std::log(u);
    }
  }
  return lp;
}

double clayton_ll(const LogPseudo& lp, double alpha) {
  double ll = 0.0;
  for (std::size_t r = 0; r < lp.rows; ++r) {
    ll += clayton_log_density_from_logs({lp.neg_log_u.data() + r * lp.cols, lp.cols}, alpha);
  }
  return ll;
}

double gumbel_ll(const LogPseudo& lp, double theta) {
  double ll = 0.0;
  for (std::size_t r = 0; r < lp.rows; ++r) {
    ll += gumbel_log_density_from_logs({lp.neg_log_u.data() + r * lp.cols, lp.cols}, theta);
  }
  return ll;
}

struct LatentSums {
  std::vector<double> sum_sq;
  std::vector<double> sq_sum;
  double marginal_term = 0.0;  // t only: sum over entries of log1p(x^2/nu)
};

LatentSums gaussian_sums(const LogPseudo& lp) {
  LatentSums s;
  s.sum_sq.resize(lp.rows);
  s.sq_sum.resize(lp.rows);
  for (std::size_t r = 0; r < lp.rows; ++r) {
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < lp.cols; ++c) {
      const double z = special::normal_quantile(lp.clamped[r * lp.cols + c]);
      a += z * z;
      b += z;
    }
    s.sum_sq[r] = a;
    s.sq_sum[r] = b * b;
  }
  return s;
}

LatentSums t_sums(const LogPseudo& lp, double nu) {
  LatentSums s;
  s.sum_sq.resize(lp.rows);
  s.sq_sum.resize(lp.rows);
  for (std::size_t r = 0; r < lp.rows; ++r) {
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < lp.cols; ++c) {
      const double x = special::student_t_quantile(lp.clamped[r * lp.cols + c], nu);
      a += x * x;
      b += x;
      s.marginal_term += std::log1p(x * x / nu);
    }
    s.sum_sq[r] = a;
    s.sq_sum[r] = b * b;
  }
  return s;
}

double gaussian_ll(const LatentSums& s, double rho, int dim) {
  const double n = static_cast<double>(s.sum_sq.size());
  double quad = 0.0;
  for (std::size_t r = 0; r < s.sum_sq.size(); ++r) {
    quad += exchangeable_quad(s.sum_sq[r], s.sq_sum[r], rho, dim) - s.sum_sq[r];
  }
  return -0.5 * n * exchangeable_log_det(rho, dim) - 0.5 * quad;
}

double t_ll(const LatentSums& s, double rho, double nu, int dim) {
  const double n = static_cast<double>(s.sum_sq.size());
  const double d = static_cast<double>(dim);
  double core = 0.0;
  for (std::size_t r = 0; r < s.sum_sq.size(); ++r) {
    core += std::log1p(exchangeable_quad(s.sum_sq[r], s.sq_sum[r], rho, dim) / nu);
  }
  return n * (student_t_log_constant(nu, dim) - 0.5 * exchangeable_log_det(rho, dim)) -
         0.5 * (nu + d) * core + 0.5 * (nu + 1.0) * s.marginal_term;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::independence: return "independence";
    case Family::gaussian: return "gaussian";
    case Family::student_t: return "student_t";
    case Family::clayton: return "clayton";
    case Family::gumbel: return "gumbel";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "independence") return Family::independence;
  if (name == "gaussian" || name == "gauss") return Family::gaussian;
  if (name == "student_t" || name == "t") return Family::student_t;
  if (name == "clayton") return Family::clayton;
  if (name == "gumbel") return Family::gumbel;
  throw InvalidArgument("unknown copula family '" + std::string(name) + "'");
}

CopulaModel CopulaModel::independence(int dim) {
  CopulaModel m{Family::independence, dim, {}, {}, {}};
  m.validate();
  return m;
}

CopulaModel CopulaModel::gaussian(int dim, double rho) {
  CopulaModel m{Family::gaussian, dim, {}, rho, {}};
  m.validate();
  return m;
}

CopulaModel CopulaModel::student_t(int dim, double rho, double nu) {
  CopulaModel m{Family::student_t, dim, {}, rho, nu};
  m.validate();
  return m;
}

CopulaModel CopulaModel::clayton(int dim, double alpha) {
  CopulaModel m{Family::clayton, dim, alpha, {}, {}};
  m.validate();
  return m;
}

CopulaModel CopulaModel::gumbel(int dim, double alpha) {
  CopulaModel m{Family::gumbel, dim, alpha, {}, {}};
  m.validate();
  return m;
}

void CopulaModel::validate() const {
  if (dim < 2) throw InvalidArgument("copula dimension must be at least 2");
  const bool wants_alpha = family == Family::clayton || family == Family::gumbel;
  const bool wants_rho = family == Family::gaussian || family == Family::student_t;
  const bool wants_nu = family == Family::student_t;
  if (alpha.has_value() != wants_alpha || rho.has_value() != wants_rho ||
      nu.has_value() != wants_nu) {
    throw InvalidArgument("parameters do not match copula family " +
                          std::string(to_string(family)));
  }
  if (family == Family::clayton && !(*alpha > 0.0 && std::isfinite(*alpha))) {
    throw InvalidArgument("Clayton alpha must be positive");
  }
  if (family == Family::gumbel && !(*alpha >= 1.0 && std::isfinite(*alpha))) {
    throw InvalidArgument("Gumbel alpha must be at least 1");
  }
  if (wants_rho && !(*rho > rho_lower_bound(dim) && *rho < 1.0)) {
    throw InvalidArgument("correlation must lie in (-1/(d-1), 1)");
  }
  if (wants_nu && !(*nu > 2.0 && std::isfinite(*nu))) {
    throw InvalidArgument("Student-t degrees of freedom must exceed 2");
  }
}

std::string describe(const CopulaModel& model) {
  std::ostringstream os;
  os.precision(4);
  switch (model.family) {
    case Family::independence: os << "/"; break;
    case Family::gaussian: os << "rho=" << *model.rho; break;
    case Family::student_t: os << "rho=" << *model.rho << ", nu=" << *model.nu; break;
    case Family::clayton:
    case Family::gumbel: os << "alpha=" << *model.alpha; break;
  }
  return os.str();
}

double copula_log_density(const CopulaModel& model, std::span<const double> u) {
  model.validate();
  check_unit(u, model.dim);
  const std::size_t d = u.size();
  switch (model.family) {
    case Family::independence:
      return 0.0;
    case Family::clayton:
    case Family::gumbel: {
      std::vector<double> l(d);
      for (std::size_t i = 0; i < d; ++i) l[i] = -std::log(u[i]);
      return model.family == Family::clayton ? clayton_log_density_from_logs(l, *model.alpha)
                                             : gumbel_log_density_from_logs(l, *model.alpha);
    }
    case Family::gaussian: {
      double a = 0.0, b = 0.0;
      for (double v : u) {
        const double z = special::normal_quantile(v);
        a += z * z;
        b += z;
      }
      const double rho = *model.rho;
      return -0.5 * exchangeable_log_det(rho, model.dim) -
             0.5 * (exchangeable_quad(a, b * b, rho, model.dim) - a);
    }
    case Family::student_t: {
      const double nu = *model.nu;
      double a = 0.0, b = 0.0, marg = 0.0;
      for (double v : u) {
        const double x = special::student_t_quantile(v, nu);
        a += x * x;
        b += x;
        marg += std::log1p(x * x / nu);
      }
      const double rho = *model.rho;
      return student_t_log_constant(nu, model.dim) -
             0.5 * exchangeable_log_det(rho, model.dim) -
             0.5 * (nu + static_cast<double>(d)) *
                 std::log1p(exchangeable_quad(a, b * b, rho, model.dim) / nu) +
             0.5 * (nu + 1.0) * marg;
    }
  }
  return 0.0;
}

double copula_density(const CopulaModel& model, std::span<const double> u) {
  if (model.family == Family::independence) {
    model.validate();
    check_unit(u, model.dim);
    return 1.0;
  }
  return std::exp(copula_log_density(model, u));
}

CdfEstimate copula_cdf(const CopulaModel& model, std::span<const double> u) {
  model.validate();
  check_unit(u, model.dim);
  switch (model.family) {
    case Family::independence: {
      double p = 1.0;
      for (double v : u) p *= v;
      return {p, 0.0};
    }
    case Family::clayton: {
      std::vector<double> l(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) l[i] = -std::log(u[i]);
      return {std::exp(-clayton_log_sum(l, *model.alpha) / *model.alpha), 0.0};
    }
    case Family::gumbel: {
      double t = 0.0;
      for (double v : u) t += std::pow(-std::log(v), *model.alpha);
      return {std::exp(-std::pow(t, 1.0 / *model.alpha)), 0.0};
    }
    case Family::gaussian:
    case Family::student_t:
      break;
  }

  std::vector<double> latent(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    latent[i] = model.family == Family::gaussian
                    ? special::normal_quantile(u[i])
                    : special::student_t_quantile(u[i], *model.nu);
  }
  if (*model.rho >= 0.0 || model.dim == 2) {
    return {elliptical_latent_cdf(model, latent), 0.0};
  }

  constexpr std::size_t kDraws = 200000;
  const Matrix draws = copula_sample(model, kDraws, 0x5eed);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < kDraws; ++r) {
    const auto row = draws.row(r);
    bool inside = true;
    for (std::size_t i = 0; i < u.size() && inside; ++i) inside = row[i] <= u[i];
    hits += inside ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(kDraws);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(kDraws))};
}

Matrix copula_sample(const CopulaModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw InvalidArgument("sample count must be positive");
  const std::size_t d = static_cast<std::size_t>(model.dim);
  Matrix out(n, d);
  Rng rng(mix_seed(seed, 0xc0b1a));

  switch (model.family) {
    case Family::independence:
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) out(r, c) = rng.uniform();
      }
      break;

    case Family::gaussian:
    case Family::student_t: {
      const double rho = *model.rho;
      const bool factor = rho >= 0.0;
      const double a = factor ? std::sqrt(rho) : 0.0;
      const double b = std::sqrt(1.0 - rho);
      // Symmetric square root of R for negative rho:
      // X = sqrt(1-rho) Z + c (sum Z) 1.
      const double dd = static_cast<double>(d);
      const double c_neg = factor ? 0.0 : (-b + std::sqrt(1.0 - rho + dd * rho)) / dd;
      std::vector<double> z(d);
      for (std::size_t r = 0; r < n; ++r) {
        double z0 = 0.0, zsum = 0.0;
        if (factor) z0 = rng.normal();
        for (std::size_t c = 0; c < d; ++c) {
          z[c] = rng.normal();
          zsum += z[c];
        }
        double scale = 1.0;
        if (model.family == Family::student_t) {
          scale = std::sqrt(*model.nu / rng.chi_squared(*model.nu));
        }
        for (std::size_t c = 0; c < d; ++c) {
          const double x = factor ? a * z0 + b * z[c] : b * z[c] + c_neg * zsum;
          out(r, c) = model.family == Family::gaussian
                          ? open_unit(special::normal_cdf(x))
                          : open_unit(special::student_t_cdf(x * scale, *model.nu));
        }
      }
      break;
    }

    case Family::clayton: {
      // Marshall-Olkin: V ~ Gamma(1/alpha), U_i = (1 + E_i / V)^(-1/alpha).
      const double alpha = *model.alpha;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = rng.gamma(1.0 / alpha);
        for (std::size_t c = 0; c < d; ++c) {
          out(r, c) = open_unit(std::exp(-std::log1p(rng.exponential() / v) / alpha));
        }
      }
      break;
    }

    case Family::gumbel: {
      // Positive-stable frailty with Laplace transform exp(-s^a), a = 1/alpha
      // (Kanter's representation), U_i = exp(-(E_i / V)^a).
      const double a = 1.0 / *model.alpha;
      for (std::size_t r = 0; r < n; ++r) {
        double v = 1.0;
        if (a < 1.0) {
          const double theta = kPi * rng.uniform();
          const double w = rng.exponential();
          v = std::sin(a * theta) / std::pow(std::sin(theta), 1.0 / a) *
              std::pow(std::sin((1.0 - a) * theta) / w, (1.0 - a) / a);
        }
        for (std::size_t c = 0; c < d; ++c) {
          out(r, c) = open_unit(std::exp(-std::pow(rng.exponential() / v, a)));
        }
      }
      break;
    }
  }
  return out;
}

double copula_log_likelihood(const CopulaModel& model, const Matrix& pseudo, double clamp) {
  double ll = 0.0;
  std::vector<double> row(pseudo.cols());
  for (std::size_t r = 0; r < pseudo.rows(); ++r) {
    for (std::size_t c = 0; c < pseudo.cols(); ++c) {
      row[c] = std::clamp(pseudo(r, c), clamp, 1.0 - clamp);
    }
    ll += copula_log_density(model, row);
  }
  return ll;
}

FitResult fit_copula(Family family, const Matrix& pseudo, const CopulaFitOptions& options) {
  if (pseudo.rows() < 10) throw InvalidArgument("copula fit needs at least 10 observations");
  if (pseudo.cols() < 2) throw InvalidArgument("copula fit needs at least 2 dimensions");
  for (double v : pseudo.data()) {
    if (!(v > 0.0 && v < 1.0)) {
      throw InvalidArgument("pseudo-observations must lie strictly inside (0, 1)");
    }
  }
  const int dim = static_cast<int>(pseudo.cols());

  if (family == Family::independence) {
    FitResult fit;
    fit.model = CopulaModel::independence(dim);
    return fit;
  }

  const LogPseudo lp = prepare(pseudo, options.clamp);
  const double tau = mean_pairwise_tau(pseudo);
  const double rho_lo = rho_lower_bound(dim) + 1e-6;
  const double rho_hi = 1.0 - 1e-6;

  FitResult fit;
  fit.converged = true;
  auto note = [&](int iters) {
    fit.iterations += iters;
    if (iters >= options.max_iterations) fit.converged = false;
  };

  switch (family) {
    case Family::clayton: {
      const double lo = 1e-6, hi = 50.0;
      const double start = tau > 0.0 ? std::clamp(tau_to_param(family, tau), lo, hi) : lo;
      auto nll = [&](double a) { return -clayton_ll(lp, a); };
      const auto [best, iters] = brent_minimize(nll, lo, hi, options);
      note(iters);
      fit.start_log_likelihood = -nll(start);
      const double best_ll = -nll(best);
      const double alpha = best_ll >= fit.start_log_likelihood ? best : start;
      fit.model = CopulaModel::clayton(dim, alpha);
      fit.log_likelihood = std::max(best_ll, fit.start_log_likelihood);
      break;
    }
    case Family::gumbel: {
      const double lo = 1.0, hi = 50.0;
      const double start = tau > 0.0 ? std::clamp(tau_to_param(family, tau), lo, hi) : lo;
      auto nll = [&](double a) { return -gumbel_ll(lp, a); };
      const auto [best, iters] = brent_minimize(nll, lo, hi, options);
      note(iters);
      fit.start_log_likelihood = -nll(start);
      const double best_ll = -nll(best);
      const double alpha = best_ll >= fit.start_log_likelihood ? best : start;
      fit.model = CopulaModel::gumbel(dim, alpha);
      fit.log_likelihood = std::max(best_ll, fit.start_log_likelihood);
      break;
    }
    case Family::gaussian: {
      const LatentSums sums = gaussian_sums(lp);
      const double start = std::clamp(tau_to_param(family, std::clamp(tau, -0.999, 0.999)),
                                      rho_lo, rho_hi);
      auto nll = [&](double r) { return -gaussian_ll(sums, r, dim); };
      const auto [best, iters] = brent_minimize(nll, rho_lo, rho_hi, options);
      note(iters);
      fit.start_log_likelihood = -nll(start);
      const double best_ll = -nll(best);
      const double rho = best_ll >= fit.start_log_likelihood ? best : start;
      fit.model = CopulaModel::gaussian(dim, rho);
      fit.log_likelihood = std::max(best_ll, fit.start_log_likelihood);
      break;
    }
    case Family::student_t: {
      constexpr double kStartNu = 10.0;
      const double rho_start = std::clamp(
          tau_to_param(family, std::clamp(tau, -0.999, 0.999)), rho_lo, rho_hi);
      // Profile likelihood in nu: latent quantiles depend on nu only, so
      // they are computed once per outer evaluation.
      double inner_rho = rho_start;
      auto profile = [&](double nu, double* rho_out) {
        const LatentSums sums = t_sums(lp, nu);
        auto nll = [&](double r) { return -t_ll(sums, r, nu, dim); };
        const auto [best, iters] = brent_minimize(nll, rho_lo, rho_hi, options);
        note(iters);
        if (rho_out != nullptr) *rho_out = best;
        return nll(best);
      };
      auto outer = [&](double nu) { return profile(nu, &inner_rho); };
      const auto [best_nu, iters] = brent_minimize(outer, options.nu_min, options.nu_max, options);
      note(iters);
      double best_rho = rho_start;
      const double best_ll = -profile(best_nu, &best_rho);
      const LatentSums start_sums = t_sums(lp, kStartNu);
      fit.start_log_likelihood = t_ll(start_sums, rho_start, kStartNu, dim);
      if (best_ll >= fit.start_log_likelihood) {
        fit.model = CopulaModel::student_t(dim, best_rho, best_nu);
        fit.log_likelihood = best_ll;
      } else {
        fit.model = CopulaModel::student_t(dim, rho_start, kStartNu);
        fit.log_likelihood = fit.start_log_likelihood;
      }
      break;
    }
    case Family::independence:
      break;
  }
  return fit;
}

}  // namespace ttd
