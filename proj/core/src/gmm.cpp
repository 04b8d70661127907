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

#include "ttd/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ttd/errors.hpp"
#include "ttd/special.hpp"

namespace ttd {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Neumaier compensated sum; EM log-likelihoods are compared at 1e-8.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Components {
  std::vector<double> means;
  std::vector<double> sigmas;
  std::vector<double> weights;
};

// Hard 1-D k-means++ seeding followed by a few Lloyd passes.
Components seed_components(std::span<const double> x, std::size_t k, Rng& rng,
                           double sigma_floor) {
  const std::size_t n = x.size();
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(x[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))]);

  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= d2[pick];
        if (target <= 0.0) break;
      }
    } else {
      pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    }
    centers.push_back(x[pick]);
  }

  std::vector<std::size_t> label(n, 0);
  std::vector<double> sum(k), count(k);
  for (int pass = 0; pass < 10; ++pass) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (std::abs(x[i] - centers[j]) < std::abs(x[i] - centers[best])) best = j;
      }
      label[i] = best;
      sum[best] += x[i];
      count[best] += 1.0;
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] > 0.0) centers[j] = sum[j] / count[j];
    }
  }

  const double mean_all = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var_all = 0.0;
  for (double v : x) var_all += (v - mean_all) * (v - mean_all);
  var_all /= static_cast<double>(n);

  Components c{centers, std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  std::vector<double> ss(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = x[i] - centers[label[i]];
    ss[label[i]] += dev * dev;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] >= 2.0) {
      c.sigmas[j] = std::max(std::sqrt(ss[j] / count[j]), sigma_floor);
    } else {
      c.sigmas[j] = std::max(std::sqrt(var_all) / static_cast<double>(k), sigma_floor);
    }
    c.weights[j] = std::max(count[j], 1.0) / static_cast<double>(n);
  }
  const double wsum = std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
  for (double& w : c.weights) w /= wsum;
  return c;
}

struct EmRun {
  Components comp;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// E-step: fills responsibilities (n x k) and returns the log-likelihood.
double expectation(std::span<const double> x, const Components& c, std::vector<double>& resp) {
  const std::size_t k = c.means.size();
  std::vector<double> log_norm(k);
  for (std::size_t j = 0; j < k; ++j) {
    log_norm[j] = std::log(c.weights[j]) - std::log(c.sigmas[j]) - kLogSqrt2Pi;
  }
  CompensatedSum ll;
  std::vector<double> lj(k);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double z = (x[i] - c.means[j]) / c.sigmas[j];
      lj[j] = log_norm[j] - 0.5 * z * z;
      m = std::max(m, lj[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      lj[j] = std::exp(lj[j] - m);
      s += lj[j];
    }
    for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = lj[j] / s;
    ll.add(m + std::log(s));
  }
  return ll.value();
}

void maximization(std::span<const double> x, const std::vector<double>& resp,
                  double sigma_floor, Components& c) {
  const std::size_t k = c.means.size();
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < k; ++j) {
    double nk = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      nk += resp[i * k + j];
      sx += resp[i * k + j] * x[i];
    }
    // Component with no mass keeps its location; its weight goes to zero.
    if (nk <= std::numeric_limits<double>::min()) {
      c.weights[j] = 0.0;
      continue;
    }
    const double mu = sx / nk;
    double sv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mu;
      sv += resp[i * k + j] * d * d;
    }
    c.means[j] = mu;
    c.sigmas[j] = std::max(std::sqrt(sv / nk), sigma_floor);
    c.weights[j] = nk / n;
  }
}

EmRun run_em(std::span<const double> x, Components init, const GmmFitOptions& options) {
  EmRun run;
  run.comp = std::move(init);
  std::vector<double> resp(x.size() * run.comp.means.size());
  double previous = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double ll = expectation(x, run.comp, resp);
    run.trace.push_back(ll);
    run.iterations = it;
    run.log_likelihood = ll;
    if (it > 1 && ll - previous < options.tolerance) {
      run.converged = true;
      break;
    }
    previous = ll;
    if (it == options.max_iterations) break;
    maximization(x, resp, options.sigma_floor, run.comp);
  }
  return run;
}

GmmParams canonical(const Components& c) {
  std::vector<double> w = c.weights;
  for (double& v : w) v = std::max(v, 1e-12);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= s;
  return GmmParams(c.means, c.sigmas, std::move(w));
}

}  // namespace

GmmParams::GmmParams(std::vector<double> means, std::vector<double> sigmas,
                     std::vector<double> weights) {
  const std::size_t k = means.size();
  if (k == 0 || sigmas.size() != k || weights.size() != k) {
    throw InvalidArgument("GMM parameter vectors must be non-empty and of equal length");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!std::isfinite(means[j])) throw InvalidArgument("GMM mean must be finite");
    if (!(sigmas[j] > 0.0) || !std::isfinite(sigmas[j])) {
      throw InvalidArgument("GMM sigma must be positive and finite");
    }
    if (!(weights[j] > 0.0 && weights[j] <= 1.0)) {
      throw InvalidArgument("GMM weight must lie in (0, 1]");
    }
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("GMM weights must sum to 1");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return means[a] < means[b];
  });
  means_.reserve(k);
  sigmas_.reserve(k);
  weights_.reserve(k);
  for (std::size_t j : order) {
    means_.push_back(means[j]);
    sigmas_.push_back(sigmas[j]);
    weights_.push_back(weights[j]);
  }
}

double GmmParams::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < k(); ++j) m += weights_[j] * means_[j];
  return m;
}

double GmmParams::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t j = 0; j < k(); ++j) {
    const double d = means_[j] - m;
    v += weights_[j] * (sigmas_[j] * sigmas_[j] + d * d);
  }
  return v;
}

double gmm_pdf(const GmmParams& params, double x) {
  double density = 0.0;
  for (std::size_t j = 0; j < params.k(); ++j) {
    const double z = (x - params.means()[j]) / params.sigmas()[j];
    density += params.weights()[j] * special::normal_pdf(z) / params.sigmas()[j];
  }
  return density;
}

double gmm_cdf(const GmmParams& params, double x) {
  double p = 0.0;
  for (std::size_t j = 0; j < params.k(); ++j) {
    p += params.weights()[j] * special::normal_cdf((x - params.means()[j]) / params.sigmas()[j]);
  }
  return std::clamp(p, 0.0, 1.0);
}

double gmm_quantile(const GmmParams& params, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile probability must lie in (0, 1)");

  const auto& mu = params.means();
  const double sigma_max = *std::max_element(params.sigmas().begin(), params.sigmas().end());
  double lo = mu.front() - 12.0 * sigma_max;
  double hi = mu.back() + 12.0 * sigma_max;

  // Newton steps are taken only while they stay inside the bracket;
  // otherwise bisect.
  const double tol = 1e-15 + 1e-12 * std::min(p, 1.0 - p);
  double x = std::clamp(params.mean() + std::sqrt(params.variance()) * special::normal_quantile(p),
                        lo, hi);
  for (int it = 0; it < 400; ++it) {
    const double f = gmm_cdf(params, x) - p;
    if (std::abs(f) <= tol) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      break;
    }
    const double d = gmm_pdf(params, x);
    const double step = d > 0.0 ? x - f / d : std::numeric_limits<double>::quiet_NaN();
    x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
  }
  return x;
}

double gmm_draw(const GmmParams& params, Rng& rng) {
  const double u = rng.uniform();
  std::size_t j = 0;
  double acc = params.weights()[0];
  while (u > acc && j + 1 < params.k()) acc += params.weights()[++j];
  return params.means()[j] + params.sigmas()[j] * rng.normal();
}

std::vector<double> gmm_sample(const GmmParams& params, std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6d6d));
  std::vector<double> out(n);
  for (double& v : out) v = gmm_draw(params, rng);
  return out;
}

double gmm_log_likelihood(const GmmParams& params, std::span<const double> samples) {
  CompensatedSum ll;
  for (double x : samples) ll.add(std::log(gmm_pdf(params, x)));
  return ll.value();
}

GmmFit fit_gmm(std::span<const double> samples, std::size_t k, std::uint64_t seed,
               const GmmFitOptions& options) {
  if (k < 1) throw InvalidArgument("GMM needs at least one component");
  if (samples.size() < 10 * k) {
    throw InvalidArgument("GMM fit needs at least 10*k samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("GMM samples must be finite");
    }
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) throw DegenerateInput("all samples are identical");

  const int restarts = std::max(1, options.restarts);
  EmRun best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    EmRun run = run_em(samples, seed_components(samples, k, rng, options.sigma_floor), options);
    if (!std::isfinite(best.log_likelihood) || run.log_likelihood > best.log_likelihood) {
      best = std::move(run);
    }
  }

  GmmFit fit;
  fit.params = canonical(best.comp);
  fit.log_likelihood = best.log_likelihood;
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  fit.trace = std::move(best.trace);
  return fit;
}

}  // namespace ttd
