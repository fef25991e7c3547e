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

#ifndef STATANON_EXPOSURE_HPP_
#define STATANON_EXPOSURE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "statanon/distribution.hpp"
#include "statanon/rational.hpp"

namespace statanon {

// Exposure at threshold t: the total mass of values whose probability is
// STRICTLY below t — the fraction of users who are less than (t·n)-anonymous.
// The strictness is the entire semantics; exact overloads never round.

inline Rational Exposure(const DiscreteDistribution& dist, const Rational& t) {
  if (t < 0 || t > 1) throw std::invalid_argument("Exposure: t outside [0,1]");
  if (!dist.empirical())
    throw std::logic_error("Exposure(Rational): requires the empirical variant");
  // count/total < t  <=>  count·den < num·total, all in integers.
  const BigInt num = boost::multiprecision::numerator(t);
  const BigInt den = boost::multiprecision::denominator(t);
  const BigInt total(dist.total());
  BigInt below = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (BigInt(dist.count(i)) * den < num * total) below += dist.count(i);
  }
  return Rational(below, total);
}

inline double Exposure(const DiscreteDistribution& dist, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("Exposure: t outside [0,1]");
  double below = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.prob(i) < t) below += dist.prob(i);
  }
  return below;
}

// The step function t ↦ Q(t) as sorted distinct probability levels with the
// mass sitting at each level. Q(t) is the prefix mass of levels strictly
// below t. Exact levels are carried whenever the source was empirical.
class ExposureCurve {
 public:
  struct Point {
    double level = 0.0;       // distinct probability level
    double mass = 0.0;        // total mass at exactly this level
    double cum_below = 0.0;   // total mass strictly below this level
    Rational level_r;         // exact mirrors; valid when exact()
    Rational mass_r;
    Rational cum_below_r;
  };

  static ExposureCurve FromDistribution(const DiscreteDistribution& dist) {
    ExposureCurve curve;
    curve.exact_ = dist.empirical();
    if (curve.exact_) {
      std::map<Rational, Rational> levels;  // level -> mass at level
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.count(i) == 0) continue;  // zero atoms carry no mass
        levels[dist.RationalProb(i)] += dist.RationalProb(i);
      }
      Rational cum = 0;
      for (const auto& [level, mass] : levels) {
        Point p;
        p.level_r = level;
        p.mass_r = mass;
        p.cum_below_r = cum;
        p.level = ToDouble(level);
        p.mass = ToDouble(mass);
        p.cum_below = ToDouble(cum);
        curve.points_.push_back(std::move(p));
        cum += mass;
      }
      curve.total_r_ = cum;
      curve.total_ = ToDouble(cum);
    } else {
      std::map<double, double> levels;
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.prob(i) == 0.0) continue;
        levels[dist.prob(i)] += dist.prob(i);
      }
      double cum = 0.0;
      for (const auto& [level, mass] : levels) {
        Point p;
        p.level = level;
        p.mass = mass;
        p.cum_below = cum;
        curve.points_.push_back(std::move(p));
        cum += mass;
      }
      curve.total_ = cum;
    }
    curve.value_count_ = dist.PositiveSupportSize();
    return curve;
  }

  bool exact() const { return exact_; }
  const std::vector<Point>& points() const { return points_; }
  // Number of distinct values carrying mass (the support size |V|).
  std::size_t value_count() const { return value_count_; }

  Rational ValueAt(const Rational& t) const {
    if (!exact_) throw std::logic_error("ExposureCurve::ValueAt(Rational): inexact curve");
    // First level >= t bounds the strictly-below prefix; past the last level
    // the value is the full mass.
    for (const auto& p : points_) {
      if (p.level_r >= t) return p.cum_below_r;
    }
    return total_r_;
  }

  double ValueAt(double t) const {
    // First level >= t bounds the strictly-below prefix.
    auto it = std::lower_bound(points_.begin(), points_.end(), t,
                               [](const Point& p, double x) { return p.level < x; });
    if (it == points_.end()) return total_;
    return it->cum_below;
  }

 private:
  std::vector<Point> points_;
  bool exact_ = false;
  Rational total_r_ = 0;
  double total_ = 0.0;
  std::size_t value_count_ = 0;
};

inline ExposureCurve MakeExposureCurve(const DiscreteDistribution& dist) {
  return ExposureCurve::FromDistribution(dist);
}

// Brute-force oracle semantics expressed through the library types: the
// fraction of rows whose full-row multiplicity is < k equals the exposure of
// the joint distribution at t = k/n.
inline Rational RowMultiplicityExposure(const CategoricalTable& table,
                                        const std::vector<std::size_t>& cols,
                                        std::uint64_t k) {
  const auto dist = EmpiricalDistribution(table, cols);
  return Exposure(dist, Rational(BigInt(k), BigInt(table.n_rows())));
}

}  // namespace statanon

#endif  // STATANON_EXPOSURE_HPP_
