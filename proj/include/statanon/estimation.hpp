// Copyright 2026 The Statanon Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STATANON_ESTIMATION_HPP_
#define STATANON_ESTIMATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "statanon/binomial.hpp"
#include "statanon/distribution.hpp"
#include "statanon/exposure.hpp"
#include "statanon/random.hpp"
#include "statanon/rational.hpp"

namespace statanon {

// Two-sided plug-in confidence band for an exposure value.
struct ExposureInterval {
  double lower = 0.0;
  double upper = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::size_t support_size = 0;
};

// Smallest sample size at which the plug-in exposure interval at slack gamma
// holds with probability 1−delta: ceil((ln(1/δ) + ln|V|)/(2γ²)), at least 1.
inline std::int64_t RequiredSampleSize(double gamma, double delta,
                                       std::size_t support_size) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("RequiredSampleSize: gamma outside (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("RequiredSampleSize: delta outside (0,1)");
  if (support_size < 1)
    throw std::invalid_argument("RequiredSampleSize: support_size < 1");
  const long double raw =
      (std::log(1.0L / static_cast<long double>(delta)) +
       std::log(static_cast<long double>(support_size))) /
      (2.0L * static_cast<long double>(gamma) * static_cast<long double>(gamma));
  const auto n = static_cast<std::int64_t>(std::ceil(raw));
  return std::max<std::int64_t>(1, n);
}

// With every estimated mass within gamma of the truth (which holds with
// probability 1−delta at the required sample size), the true exposure is
// bracketed by [Q̂(t−γ) − γ|V|, Q̂(t+γ) + γ|V|]. Thresholds outside [0,1]
// clamp the plug-in value to 0 or 1.
inline ExposureInterval PluginExposureInterval(const ExposureCurve& emp_curve, double t,
                                               double gamma, std::size_t support_size,
                                               double delta = 0.0) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("PluginExposureInterval: t outside [0,1]");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("PluginExposureInterval: gamma outside [0,1)");
  const double slack = gamma * static_cast<double>(support_size);
  const double q_lo = t - gamma < 0.0 ? 0.0 : emp_curve.ValueAt(t - gamma);
  const double q_hi = t + gamma > 1.0 ? 1.0 : emp_curve.ValueAt(t + gamma);
  ExposureInterval iv;
  iv.lower = std::max(0.0, q_lo - slack);
  iv.upper = std::min(1.0, q_hi + slack);
  iv.gamma = gamma;
  iv.delta = delta;
  iv.support_size = support_size;
  return iv;
}

// Claimed uniform-in-k bound on |Q_p(n,k) − Q_p̂(n,k)|:
// C·‖p−p̂‖_∞ with C = |V|·(√(e(n+1))/(2√(|V|−1)) + 1). The constant is NOT
// sound everywhere: near the simplex boundary (two-value supports with one
// mass close to 1 and k close to n) the true gap can exceed it — see the
// characterization tests. It is reported as specified; consumers treat it as
// an audit quantity, not a guarantee.
inline double StatisticalExposureErrorBound(std::int64_t n, std::size_t support_size,
                                            double linf_error) {
  if (support_size < 2)
    throw std::invalid_argument(
        "StatisticalExposureErrorBound: support_size must be at least 2");
  if (n < 1) throw std::invalid_argument("StatisticalExposureErrorBound: n < 1");
  if (!(linf_error >= 0.0))
    throw std::invalid_argument("StatisticalExposureErrorBound: negative error");
  const double v = static_cast<double>(support_size);
  const double constant =
      v * (std::sqrt(std::exp(1.0) * static_cast<double>(n + 1)) /
               (2.0 * std::sqrt(v - 1.0)) +
           1.0);
  return constant * linf_error;
}

// The two-point family behind the estimation lower bound: distributions p0
// and p1 that are KL-close (indistinguishable from n samples) yet have
// exposures at q differing by |1/s − sε|, ε = (s−1)/(s²n). Both are exact
// rationals realized as empirical distributions over a common denominator
// s²n; boundary inputs (n = s−1) produce explicit zero-mass atoms.
struct LeCamPair {
  DiscreteDistribution p0;
  DiscreteDistribution p1;
  Rational q;        // threshold separating the two exposures
  Rational epsilon;  // atom-mass perturbation
  Rational gap;      // |exposure(p0,q) − exposure(p1,q)| = |1/s − sε|
};

inline LeCamPair LeCamHardPair(std::int64_t s, std::int64_t n) {
  if (s < 2) throw std::invalid_argument("LeCamHardPair: s < 2");
  if (n < 1) throw std::invalid_argument("LeCamHardPair: n < 1");
  const BigInt total = BigInt(s) * s * n;  // common denominator s²n
  // p0: s atoms of mass 1/s² − ε = (n−s+1)/(s²n); remainder (s−1+s²ε)/s.
  const BigInt atom0 = BigInt(n) - s + 1;
  if (atom0 < 0)
    throw std::invalid_argument("LeCamHardPair: atom mass would go negative (n < s-1)");
  // p1: s atoms of mass 1/s² = n/(s²n); remainder (s−1)/s.
  const BigInt atom1 = BigInt(n);
  const BigInt rem0 = total - BigInt(s) * atom0;
  const BigInt rem1 = total - BigInt(s) * atom1;

  std::vector<std::string> values;
  for (std::int64_t i = 0; i < s; ++i) values.push_back("v" + std::to_string(i));
  values.push_back("rest");

  std::vector<std::uint64_t> counts0, counts1;
  for (std::int64_t i = 0; i < s; ++i) {
    counts0.push_back(atom0.template convert_to<std::uint64_t>());
    counts1.push_back(atom1.template convert_to<std::uint64_t>());
  }
  counts0.push_back(rem0.template convert_to<std::uint64_t>());
  counts1.push_back(rem1.template convert_to<std::uint64_t>());

  LeCamPair pair{DiscreteDistribution::Empirical(values, counts0),
                 DiscreteDistribution::Empirical(values, counts1),
                 Rational(2 * BigInt(n) - s + 1, 2 * total),  // 1/s² − ε/2
                 Rational(BigInt(s) - 1, total), Rational(0)};
  const Rational q0 = Exposure(pair.p0, pair.q);
  const Rational q1 = Exposure(pair.p1, pair.q);
  pair.gap = q0 >= q1 ? q0 - q1 : q1 - q0;
  return pair;
}

// KL divergence in nats over the common support; 0·log(0/q) = 0. Infinite
// divergences cannot arise for the Le Cam pair (p1 has full support).
inline double KlDivergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("KlDivergence: support size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i);
    const double qi = q.prob(i);
    if (pi == 0.0) continue;
    if (qi == 0.0) throw std::invalid_argument("KlDivergence: q vanishes where p does not");
    kl += pi * std::log(pi / qi);
  }
  return std::max(0.0, kl);
}

// Per-k Monte Carlo summary of the two plug-in estimators of the Fig-3-style
// experiment, plus the ground-truth statistical exposure of the sampling
// distribution. Standard deviations are population standard deviations over
// the trials.
struct EstimatorSummary {
  std::vector<std::int64_t> k_grid;
  std::vector<double> mean_exposure;   // plug-in exposure at t = k/n
  std::vector<double> std_exposure;
  std::vector<double> mean_statexp;    // plug-in statistical exposure at (n, k)
  std::vector<double> std_statexp;
  std::vector<double> truth;           // statistical_exposure(true_dist, n, k)
  std::int64_t n_users = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

// Samples `trials` databases of n_users i.i.d. rows from true_dist and
// summarizes, per anonymity level k, the plug-in exposure estimator
// Σ_{v: c_v<k} c_v/n and the plug-in statistical-exposure estimator
// Q_p̂(n,k). Each trial draws from Rng::Substream(seed, trial), so the
// result is independent of any parallel schedule.
inline EstimatorSummary SimulateEstimators(const DiscreteDistribution& true_dist,
                                           std::int64_t n_users,
                                           const std::vector<std::int64_t>& k_grid,
                                           std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("SimulateEstimators: trials < 1");
  if (n_users < 1) throw std::invalid_argument("SimulateEstimators: n_users < 1");
  for (const auto k : k_grid)
    if (k < 1 || k > n_users)
      throw std::invalid_argument("SimulateEstimators: k outside [1, n_users]");

  const std::size_t m = true_dist.size();
  std::vector<double> cum(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += true_dist.prob(i);
    cum[i] = acc;
  }
  cum[m - 1] = 1.0;  // guard against accumulated rounding

  EstimatorSummary summary;
  summary.k_grid = k_grid;
  summary.n_users = n_users;
  summary.trials = trials;
  summary.seed = seed;
  const std::size_t kn = k_grid.size();
  std::vector<double> sum_a(kn, 0.0), sum_a2(kn, 0.0), sum_b(kn, 0.0), sum_b2(kn, 0.0);

  std::vector<std::uint64_t> counts(m);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::Substream(seed, static_cast<std::uint64_t>(trial));
    std::fill(counts.begin(), counts.end(), 0);
    for (std::int64_t r = 0; r < n_users; ++r) {
      const double u = rng.NextDouble();
      const std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), u,
                           [](double cv, double uv) { return cv <= uv; }) -
          cum.begin());
      ++counts[std::min(idx, m - 1)];
    }
    // Observed empirical distribution (zero counts dropped).
    std::vector<std::string> obs_values;
    std::vector<std::uint64_t> obs_counts;
    for (std::size_t i = 0; i < m; ++i) {
      if (counts[i] > 0) {
        obs_values.push_back(true_dist.values()[i]);
        obs_counts.push_back(counts[i]);
      }
    }
    const auto emp = DiscreteDistribution::Empirical(obs_values, obs_counts);
    for (std::size_t ki = 0; ki < kn; ++ki) {
      const std::int64_t k = k_grid[ki];
      double expo = 0.0;
      for (const auto c : obs_counts) {
        if (static_cast<std::int64_t>(c) < k)
          expo += static_cast<double>(c) / static_cast<double>(n_users);
      }
      const double statexp = StatisticalExposure(emp, n_users, k);
      sum_a[ki] += expo;
      sum_a2[ki] += expo * expo;
      sum_b[ki] += statexp;
      sum_b2[ki] += statexp * statexp;
    }
  }

  const double tn = static_cast<double>(trials);
  for (std::size_t ki = 0; ki < kn; ++ki) {
    const double ma = sum_a[ki] / tn;
    const double mb = sum_b[ki] / tn;
    summary.mean_exposure.push_back(ma);
    summary.std_exposure.push_back(std::sqrt(std::max(0.0, sum_a2[ki] / tn - ma * ma)));
    summary.mean_statexp.push_back(mb);
    summary.std_statexp.push_back(std::sqrt(std::max(0.0, sum_b2[ki] / tn - mb * mb)));
    summary.truth.push_back(StatisticalExposure(true_dist, n_users, k_grid[ki]));
  }
  return summary;
}

}  // namespace statanon

#endif  // STATANON_ESTIMATION_HPP_
