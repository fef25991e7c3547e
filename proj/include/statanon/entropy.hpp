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

#ifndef STATANON_ENTROPY_HPP_
#define STATANON_ENTROPY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "statanon/distribution.hpp"
#include "statanon/exposure.hpp"

namespace statanon {

// Shannon entropy −Σ p log_base p with 0·log 0 = 0. Natural log is the
// internal convention (the exposure integral identity lives in nats).
inline double Entropy(const DiscreteDistribution& dist, double base = std::exp(1.0)) {
  if (!(base > 1.0)) throw std::invalid_argument("Entropy: base must exceed 1");
  double h = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist.prob(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(0.0, h) / std::log(base);
}

// The entropy of a distribution also equals the integral of Q(t)/t over
// (0, 1]: Q is a step function, so the integral closed-forms into
// Σ_i Q(levels just above ℓ_i)·(ln ℓ_{i+1} − ln ℓ_i) with ℓ_{end} = 1.
inline double EntropyViaCurveIntegral(const ExposureCurve& curve) {
  const auto& pts = curve.points();
  double integral = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double mass_up_to = pts[i].cum_below + pts[i].mass;  // Q on (ℓ_i, ℓ_{i+1}]
    const double next_level = (i + 1 < pts.size()) ? pts[i + 1].level : 1.0;
    integral += mass_up_to * (std::log(next_level) - std::log(pts[i].level));
  }
  return integral;
}

// Q(t) ≤ −H/log t for 0 < t < 1: anonymity exposure is capped by entropy.
inline double EntropyExposureBound(double entropy, double t, double base = std::exp(1.0)) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("EntropyExposureBound: t must lie in (0,1)");
  if (!(base > 1.0)) throw std::invalid_argument("EntropyExposureBound: base must exceed 1");
  if (entropy < 0.0) throw std::invalid_argument("EntropyExposureBound: negative entropy");
  const double log_t = std::log(t) / std::log(base);
  return std::min(1.0, -entropy / log_t);
}

// The distribution meeting the entropy bound with equality: n atoms of mass t
// (n = −B/(t ln t), which must be integral) plus one remainder atom of mass
// 1 − n·t. Its exposure just above t is exactly n·t = −B/ln t, and its
// entropy is at most B + 1/e. Atom value ids are "a0".."a<n-1>" plus "rest".
inline DiscreteDistribution EntropyTightnessWitness(double B, double t) {
  if (!(B > 0.0)) throw std::invalid_argument("EntropyTightnessWitness: B must be positive");
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("EntropyTightnessWitness: t must lie in (0,1)");
  const double log_t = std::log(t);
  const double n_real = -B / (t * log_t);
  const double n_rounded = std::round(n_real);
  if (!(n_rounded >= 1.0) || std::abs(n_real - n_rounded) > 1e-6)
    throw std::invalid_argument(
        "EntropyTightnessWitness: -B/(t ln t) = " + std::to_string(n_real) +
        " is not a positive integer");
  const auto n = static_cast<std::int64_t>(n_rounded);
  const double level = static_cast<double>(n) * t;  // = −B/ln t
  const double remainder = 1.0 - level;
  if (!(level < 1.0 - t))
    throw std::invalid_argument(
        "EntropyTightnessWitness: -B/ln t = " + std::to_string(level) +
        " must be below 1 - t = " + std::to_string(1.0 - t));
  std::vector<std::string> values;
  std::vector<double> probs;
  values.reserve(static_cast<std::size_t>(n) + 1);
  probs.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t i = 0; i < n; ++i) {
    values.push_back("a" + std::to_string(i));
    probs.push_back(t);
  }
  values.push_back("rest");
  probs.push_back(remainder);
  return DiscreteDistribution::Analytic(std::move(values), std::move(probs));
}

}  // namespace statanon

#endif  // STATANON_ENTROPY_HPP_
