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

#ifndef STATANON_COMPOSITION_HPP_
#define STATANON_COMPOSITION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "statanon/distribution.hpp"
#include "statanon/exposure.hpp"
#include "statanon/rational.hpp"

namespace statanon {

// A marginal column as the composition rules see it: its exposure curve, the
// chosen per-column threshold, and the column's support size.
template <typename Real>
struct MarginalSpec {
  ExposureCurve curve;
  Real threshold{};
  std::size_t support_size = 0;
};

// A marginal before threshold allocation (input to the bound search).
struct MarginalCurve {
  ExposureCurve curve;
  std::size_t support_size = 0;
};

// Auditable record of one composition-rule application. The recorded
// parameters recompute the bound exactly; `bound` is stored unclamped and
// clamped to 1 only for reporting. Exact mirrors are carried when the rule
// was evaluated in rational arithmetic.
struct BoundCertificate {
  std::string rule;  // "support", "general", or "trivial"
  std::vector<double> thresholds;
  std::vector<std::size_t> support_sizes;
  int j_star = -1;   // support rule only
  double c = 0.0;    // general rule only
  double joint_threshold = 0.0;
  double bound = 0.0;
  bool exact = false;
  std::vector<Rational> thresholds_r;
  Rational c_r = 0;
  Rational joint_threshold_r = 0;
  Rational bound_r = 0;

  double ReportedBound() const { return std::min(1.0, bound); }
  Rational ReportedBoundExact() const { return std::min(Rational(1), bound_r); }
};

namespace internal {

inline double CurveQ(const ExposureCurve& curve, double t) { return curve.ValueAt(t); }
inline Rational CurveQ(const ExposureCurve& curve, const Rational& t) {
  return curve.ValueAt(t);
}

inline double AsDouble(double v) { return v; }
inline double AsDouble(const Rational& v) { return ToDouble(v); }

inline void FillCertificate(BoundCertificate& cert, const std::vector<Rational>& thresholds,
                            const Rational& c, const Rational& joint_threshold,
                            const Rational& bound) {
  cert.exact = true;
  cert.thresholds_r = thresholds;
  cert.c_r = c;
  cert.joint_threshold_r = joint_threshold;
  cert.bound_r = bound;
  cert.thresholds.clear();
  for (const auto& t : thresholds) cert.thresholds.push_back(ToDouble(t));
  cert.c = ToDouble(c);
  cert.joint_threshold = ToDouble(joint_threshold);
  cert.bound = ToDouble(bound);
}

inline void FillCertificate(BoundCertificate& cert, const std::vector<double>& thresholds,
                            double c, double joint_threshold, double bound) {
  cert.exact = false;
  cert.thresholds = thresholds;
  cert.c = c;
  cert.joint_threshold = joint_threshold;
  cert.bound = bound;
}

}  // namespace internal

// Composition with known support sizes: at the joint threshold ∏ t_j, the
// joint exposure is at most Σ_j Q_j(t_j) + Σ_{j≠j*} t_j·|V_j|. One column of
// choice (j_star) is exempt from the slack term.
template <typename Real>
BoundCertificate ComposeSupport(const std::vector<MarginalSpec<Real>>& marginals,
                                std::size_t j_star) {
  if (marginals.empty()) throw std::invalid_argument("ComposeSupport: no marginals");
  if (j_star >= marginals.size())
    throw std::invalid_argument("ComposeSupport: j_star out of range");
  Real joint_threshold = Real(1);
  Real bound = Real(0);
  std::vector<Real> thresholds;
  thresholds.reserve(marginals.size());
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    const auto& m = marginals[j];
    joint_threshold = joint_threshold * m.threshold;
    bound = bound + internal::CurveQ(m.curve, m.threshold);
    if (j != j_star)
      bound = bound + m.threshold * Real(static_cast<std::int64_t>(m.support_size));
    thresholds.push_back(m.threshold);
  }
  BoundCertificate cert;
  cert.rule = "support";
  cert.j_star = static_cast<int>(j_star);
  for (const auto& m : marginals) cert.support_sizes.push_back(m.support_size);
  internal::FillCertificate(cert, thresholds, Real(0), joint_threshold, bound);
  return cert;
}

// General composition: at the joint threshold c·∏ t_j, the joint exposure is
// at most Σ_j Q_j(t_j) + c, for any free parameter c in (0,1). Support sizes
// never enter the bound.
template <typename Real>
BoundCertificate ComposeGeneral(const std::vector<MarginalSpec<Real>>& marginals,
                                const Real& c) {
  if (marginals.empty()) throw std::invalid_argument("ComposeGeneral: no marginals");
  if (!(c > Real(0) && c < Real(1)))
    throw std::invalid_argument("ComposeGeneral: c outside (0,1)");
  Real joint_threshold = c;
  Real bound = c;
  std::vector<Real> thresholds;
  thresholds.reserve(marginals.size());
  for (const auto& m : marginals) {
    joint_threshold = joint_threshold * m.threshold;
    bound = bound + internal::CurveQ(m.curve, m.threshold);
    thresholds.push_back(m.threshold);
  }
  BoundCertificate cert;
  cert.rule = "general";
  for (const auto& m : marginals) cert.support_sizes.push_back(m.support_size);
  internal::FillCertificate(cert, thresholds, c, joint_threshold, bound);
  return cert;
}

namespace internal {

// Per-column candidate thresholds: every breakpoint level, the level just
// above it, and 1. "Just above" a/b is (a·b+1)/b² exactly; the double path
// uses nextafter.
inline std::vector<Rational> CandidateThresholds(const ExposureCurve& curve,
                                                 const Rational&) {
  if (!curve.exact())
    throw std::logic_error("BestBound<Rational>: curve lacks exact levels");
  std::vector<Rational> out;
  for (const auto& p : curve.points()) {
    out.push_back(p.level_r);
    const BigInt a = boost::multiprecision::numerator(p.level_r);
    const BigInt b = boost::multiprecision::denominator(p.level_r);
    const Rational above(a * b + 1, b * b);
    if (above <= 1) out.push_back(above);
  }
  out.push_back(Rational(1));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<double> CandidateThresholds(const ExposureCurve& curve, double) {
  std::vector<double> out;
  for (const auto& p : curve.points()) {
    out.push_back(p.level);
    const double above = std::nextafter(p.level, 2.0);
    if (above <= 1.0) out.push_back(above);
  }
  out.push_back(1.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Best rule application for one threshold allocation. For fixed thresholds
// the optima are closed-form: the support rule drops the largest slack term
// (first argmax j*), and the general rule takes the smallest feasible c
// (its bound Σ Q_j + c grows with c). Ties across allocations are broken by
// (bound, rule, j*, c, thresholds) ascending, making the search
// deterministic regardless of evaluation order.
template <typename Real>
struct SearchState {
  bool found = false;
  std::uint64_t generation = 0;  // bumped on every accepted improvement
  Real bound{};
  int rule_rank = 0;  // 0 support, 1 general
  int j_star = -1;
  Real c{};
  std::vector<Real> thresholds;
  Real joint_threshold{};
};

template <typename Real>
bool Improves(const SearchState<Real>& best, const Real& bound, int rule_rank,
              int j_star, const Real& c, const std::vector<Real>& thresholds) {
  if (!best.found) return true;
  if (bound != best.bound) return bound < best.bound;
  if (rule_rank != best.rule_rank) return rule_rank < best.rule_rank;
  if (j_star != best.j_star) return j_star < best.j_star;
  if (c != best.c) return c < best.c;
  return thresholds < best.thresholds;
}

template <typename Real>
void ConsiderAllocation(const std::vector<MarginalCurve>& marginals,
                        const std::vector<Real>& alloc, const Real& target,
                        const std::vector<Real>& c_grid, SearchState<Real>& best) {
  const std::size_t d = marginals.size();
  Real product = Real(1);
  Real sum_q = Real(0);
  Real sum_slack = Real(0);
  Real max_slack = Real(0);
  int arg_max = 0;
  for (std::size_t j = 0; j < d; ++j) {
    product = product * alloc[j];
    sum_q = sum_q + CurveQ(marginals[j].curve, alloc[j]);
    const Real slack = alloc[j] * Real(static_cast<std::int64_t>(marginals[j].support_size));
    sum_slack = sum_slack + slack;
    if (j == 0 || slack > max_slack) {
      max_slack = slack;
      arg_max = static_cast<int>(j);
    }
  }
  if (product >= target) {
    const Real bound = sum_q + sum_slack - max_slack;
    if (Improves(best, bound, 0, arg_max, Real(0), alloc)) {
      best.found = true;
      ++best.generation;
      best.bound = bound;
      best.rule_rank = 0;
      best.j_star = arg_max;
      best.c = Real(0);
      best.thresholds = alloc;
      best.joint_threshold = product;
    }
  }
  for (const auto& c : c_grid) {  // ascending: the first feasible c is optimal
    if (c * product >= target) {
      const Real bound = sum_q + c;
      if (Improves(best, bound, 1, -1, c, alloc)) {
        best.found = true;
        ++best.generation;
        best.bound = bound;
        best.rule_rank = 1;
        best.j_star = -1;
        best.c = c;
        best.thresholds = alloc;
        best.joint_threshold = c * product;
      }
      break;
    }
  }
}

}  // namespace internal

// Minimum composition bound whose certified joint threshold is at least
// target_threshold. Searches the support rule over every exempt column j*
// and the general rule over c ∈ {2⁻²⁰..2⁻¹}, with per-column thresholds
// drawn from breakpoint levels, levels just above them, and 1. Exhaustive
// when the candidate grid has at most 10⁵ allocations, else greedy
// coordinate descent from the near-uniform allocation. Returns the trivial
// bound 1 when nothing is feasible.
template <typename Real>
BoundCertificate BestBound(const std::vector<MarginalCurve>& marginals,
                           const Real& target_threshold) {
  if (marginals.empty()) throw std::invalid_argument("BestBound: no marginals");
  if (!(target_threshold > Real(0) && target_threshold <= Real(1)))
    throw std::invalid_argument("BestBound: target outside (0,1]");

  const std::size_t d = marginals.size();
  std::vector<std::vector<Real>> candidates;
  candidates.reserve(d);
  double grid_size = 1.0;
  for (const auto& m : marginals) {
    candidates.push_back(internal::CandidateThresholds(m.curve, Real{}));
    grid_size *= static_cast<double>(candidates.back().size());
  }

  std::vector<Real> c_grid;  // 2^-1 .. 2^-20, sorted ascending
  {
    Real c = Real(1) / Real(2);
    for (int i = 0; i < 20; ++i) {
      c_grid.push_back(c);
      c = c / Real(2);
    }
    std::reverse(c_grid.begin(), c_grid.end());
  }

  internal::SearchState<Real> best;

  if (grid_size <= 100000.0) {
    std::vector<std::size_t> idx(d, 0);
    std::vector<Real> alloc(d);
    while (true) {
      for (std::size_t j = 0; j < d; ++j) alloc[j] = candidates[j][idx[j]];
      internal::ConsiderAllocation(marginals, alloc, target_threshold, c_grid, best);
      std::size_t j = 0;
      while (j < d && ++idx[j] == candidates[j].size()) {
        idx[j] = 0;
        ++j;
      }
      if (j == d) break;
    }
  } else {
    // Greedy start: per column, the smallest candidate at or above the
    // uniform allocation target^(1/d) (1 always qualifies). The starting
    // point is a heuristic, so double arithmetic suffices here; feasibility
    // and objectives stay in Real.
    const double root =
        std::pow(internal::AsDouble(target_threshold), 1.0 / static_cast<double>(d));
    std::vector<Real> alloc(d);
    for (std::size_t j = 0; j < d; ++j) {
      alloc[j] = candidates[j].back();
      for (const auto& cand : candidates[j]) {
        if (internal::AsDouble(cand) >= root) {
          alloc[j] = cand;
          break;
        }
      }
    }
    internal::ConsiderAllocation(marginals, alloc, target_threshold, c_grid, best);
    for (int pass = 0; pass < 32; ++pass) {
      const std::uint64_t before = best.generation;
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<Real> trial = best.found ? best.thresholds : alloc;
        for (const auto& cand : candidates[j]) {
          trial[j] = cand;
          internal::ConsiderAllocation(marginals, trial, target_threshold, c_grid, best);
        }
      }
      if (best.generation == before) break;
    }
  }

  BoundCertificate cert;
  for (const auto& m : marginals) cert.support_sizes.push_back(m.support_size);
  if (!best.found) {
    cert.rule = "trivial";
    internal::FillCertificate(cert, std::vector<Real>(d, Real(1)), Real(0),
                              target_threshold, Real(1));
    return cert;
  }
  cert.rule = best.rule_rank == 0 ? "support" : "general";
  cert.j_star = best.j_star;
  internal::FillCertificate(cert, best.thresholds, best.c, best.joint_threshold, best.bound);
  return cert;
}

// The (n+1)-row two-column binary matrix whose columns are individually
// n/2-anonymous while the middle row (0,0) is jointly unique: n/2 rows
// (1,0), one row (0,0), n/2 rows (0,1).
inline CategoricalTable MiddleUserExample(std::int64_t n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("MiddleUserExample: n must be even and >= 2");
  std::vector<TableColumn> columns = {{"c1", {"0", "1"}}, {"c2", {"0", "1"}}};
  std::vector<std::string> cells;
  cells.reserve(static_cast<std::size_t>(2 * (n + 1)));
  for (std::int64_t i = 0; i < n / 2; ++i) {
    cells.push_back("1");
    cells.push_back("0");
  }
  cells.push_back("0");
  cells.push_back("0");
  for (std::int64_t i = 0; i < n / 2; ++i) {
    cells.push_back("0");
    cells.push_back("1");
  }
  return CategoricalTable::Create(std::move(columns), std::move(cells));
}

// Output of the slack-necessity construction: a table and per-column
// thresholds q_i at which the joint exposure at c·∏q_i reaches Σ_i Q_i(q_i),
// showing the general rule's additive slack c cannot be dropped.
struct SlackWitness {
  CategoricalTable table;
  std::vector<Rational> thresholds;  // all equal to (a·2^(k-1)-1)/(a·2^k)
  std::int64_t k = 0;
  BigInt a;  // = 3/c
};

// Builds the witness for c with integer reciprocal: 2^k groups of a = 3/c
// identical rows (the k-bit binary encodings, column i holding bit i), with
// one redaction in each of the first k groups (group i's first row, column
// i). k is the smallest integer with c·q^k ≥ 2/(a·2^k) for
// q = (a·2^(k-1)-1)/(a·2^k).
inline SlackWitness BuildSlackWitness(const Rational& c) {
  if (!(c > 0) || boost::multiprecision::numerator(c) != 1)
    throw std::invalid_argument("BuildSlackWitness: 1/c must be a positive integer");
  const BigInt a = BigInt(3) * boost::multiprecision::denominator(c);
  std::int64_t k = 0;
  Rational q;
  for (std::int64_t trial_k = 1; trial_k <= 24; ++trial_k) {
    const BigInt rows = a << trial_k;              // a·2^k
    const BigInt half = (a << (trial_k - 1)) - 1;  // a·2^(k-1) − 1
    q = Rational(half, rows);
    Rational lhs = c;
    for (std::int64_t i = 0; i < trial_k; ++i) lhs *= q;
    if (lhs >= Rational(BigInt(2), rows)) {
      k = trial_k;
      break;
    }
  }
  if (k == 0)
    throw std::runtime_error("BuildSlackWitness: no k <= 24 satisfies the inequality");

  const BigInt rows_big = a << k;
  if (rows_big > 1000000)
    throw std::invalid_argument("BuildSlackWitness: table would exceed 10^6 rows");
  const auto n_rows = rows_big.template convert_to<std::int64_t>();
  const auto a_small = a.template convert_to<std::int64_t>();

  std::vector<TableColumn> columns;
  for (std::int64_t i = 0; i < k; ++i)
    columns.push_back({"x" + std::to_string(i), {"0", "1"}});
  std::vector<std::string> cells;
  cells.reserve(static_cast<std::size_t>(n_rows * k));
  const std::int64_t groups = std::int64_t{1} << k;
  for (std::int64_t g = 0; g < groups; ++g) {
    for (std::int64_t r = 0; r < a_small; ++r) {
      for (std::int64_t col = 0; col < k; ++col) {
        const bool redact = (g < k && col == g && r == 0);
        if (redact)
          cells.push_back(Redacted());
        else
          cells.push_back(((g >> col) & 1) ? "1" : "0");
      }
    }
  }
  SlackWitness w{CategoricalTable::Create(std::move(columns), std::move(cells)),
                 std::vector<Rational>(static_cast<std::size_t>(k), q), k, a};
  return w;
}

}  // namespace statanon

#endif  // STATANON_COMPOSITION_HPP_
