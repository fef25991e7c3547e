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

#ifndef STATANON_BINOMIAL_HPP_
#define STATANON_BINOMIAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "statanon/distribution.hpp"

namespace statanon {

// ln P(Bin(m, p) <= j), by direct summation of the j+1 leading terms in log
// space. Intended regime: small j (anonymity levels) with m up to ~1e6;
// accuracy ~1e-10 relative in the linear domain there. The log binomial
// coefficient is accumulated incrementally (sum of ~j logs) rather than via
// lgamma, whose cancellation at large m costs ~1e-9 absolute error in the
// log domain.
inline double LogBinomialCdf(std::int64_t j, std::int64_t m, double p) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (m < 0) throw std::invalid_argument("LogBinomialCdf: negative trial count");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("LogBinomialCdf: p outside [0,1]");
  if (j < 0) return kNegInf;   // empty event
  if (j >= m) return 0.0;      // certain event (includes m == 0)
  if (p == 0.0) return 0.0;    // all mass at 0 <= j
  if (p == 1.0) return kNegInf;  // all mass at m > j
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  // Log-domain terms ln C(m,i) + i ln p + (m-i) ln(1-p), i = 0..j; summed by
  // log-sum-exp against the running maximum. Compensated accumulation keeps
  // the coefficient sum exact to ~1 ulp over <= j additions.
  std::vector<double> terms(static_cast<std::size_t>(j) + 1);
  double log_binom = 0.0;  // ln C(m, i)
  double comp = 0.0;       // Kahan compensation for log_binom
  double max_term = kNegInf;
  for (std::int64_t i = 0; i <= j; ++i) {
    if (i > 0) {
      const double delta = std::log(static_cast<double>(m - i + 1)) -
                           std::log(static_cast<double>(i));
      const double y = delta - comp;
      const double t = log_binom + y;
      comp = (t - log_binom) - y;
      log_binom = t;
    }
    const double term = log_binom + static_cast<double>(i) * log_p +
                        static_cast<double>(m - i) * log_q;
    terms[static_cast<std::size_t>(i)] = term;
    max_term = std::max(max_term, term);
  }
  if (max_term == kNegInf) return kNegInf;
  double sum = 0.0;
  for (const double t : terms) sum += std::exp(t - max_term);
  const double log_cdf = max_term + std::log(sum);
  return std::min(log_cdf, 0.0);
}

inline double BinomialCdf(std::int64_t j, std::int64_t m, double p) {
  return std::exp(LogBinomialCdf(j, m, p));
}

// Statistical exposure Q_p(n, k): the probability that a uniformly random
// user of an n-row database drawn i.i.d. from p is less than k-anonymous,
//   Q_p(n, k) = sum_i p_i · P(Bin(n-1, p_i) <= k-2).
// k = 1 is identically 0: every user matches their own row.
inline double StatisticalExposure(const DiscreteDistribution& dist, std::int64_t n,
                                  std::int64_t k) {
  if (n < 1) throw std::invalid_argument("StatisticalExposure: n < 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("StatisticalExposure: k outside [1, n]");
  if (k == 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist.prob(i);
    if (p == 0.0) continue;
    sum += p * BinomialCdf(k - 2, n - 1, p);
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace statanon

#endif  // STATANON_BINOMIAL_HPP_
