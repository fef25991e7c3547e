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

#ifndef STATANON_DISTRIBUTION_HPP_
#define STATANON_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "statanon/rational.hpp"

namespace statanon {

// The redaction symbol. An ordinary value for all counting purposes.
inline const std::string& Redacted() {
  static const std::string kBottom = "\xE2\x8A\xA5";  // UTF-8 "⊥"
  return kBottom;
}

// Joint value tuples are joined with a unit separator that table cells are
// forbidden to contain.
inline constexpr char kTupleSeparator = '\x1F';

inline std::string JoinTuple(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(kTupleSeparator);
    out += parts[i];
  }
  return out;
}

inline std::vector<std::string> SplitTuple(const std::string& joined) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = joined.find(kTupleSeparator, start);
    if (pos == std::string::npos) {
      parts.push_back(joined.substr(start));
      return parts;
    }
    parts.push_back(joined.substr(start, pos - start));
    start = pos + 1;
  }
}

// A probability distribution over finitely many named values. The empirical
// variant stores exact integer counts over a sample of size `total`; the
// analytic variant stores real masses. All exact-arithmetic paths require the
// empirical variant.
class DiscreteDistribution {
 public:
  static DiscreteDistribution Empirical(std::vector<std::string> values,
                                        std::vector<std::uint64_t> counts) {
    if (values.size() != counts.size())
      throw std::invalid_argument("Empirical: values/counts size mismatch");
    if (values.empty()) throw std::invalid_argument("Empirical: empty support");
    std::uint64_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("Empirical: zero total count");
    DiscreteDistribution d;
    d.values_ = std::move(values);
    d.counts_ = std::move(counts);
    d.total_ = total;
    d.CheckDistinct();
    return d;
  }

  static DiscreteDistribution Analytic(std::vector<std::string> values,
                                       std::vector<double> probs) {
    if (values.size() != probs.size())
      throw std::invalid_argument("Analytic: values/probs size mismatch");
    if (values.empty()) throw std::invalid_argument("Analytic: empty support");
    double sum = 0.0;
    for (const auto p : probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("Analytic: negative mass");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("Analytic: masses sum to " + std::to_string(sum));
    DiscreteDistribution d;
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    d.CheckDistinct();
    return d;
  }

  bool empirical() const { return total_ > 0; }
  std::size_t size() const { return values_.size(); }
  std::uint64_t total() const { return total_; }
  const std::vector<std::string>& values() const { return values_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  std::uint64_t count(std::size_t i) const { return counts_.at(i); }

  double prob(std::size_t i) const {
    if (empirical())
      return static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return probs_[i];
  }

  // Exact mass; empirical variant only.
  Rational RationalProb(std::size_t i) const {
    RequireEmpirical("RationalProb");
    return Rational(BigInt(counts_.at(i)), BigInt(total_));
  }

  // Support size excluding zero-mass values (some constructions report
  // boundary cases with explicit zero atoms).
  std::size_t PositiveSupportSize() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (prob(i) > 0.0) ++n;
    return n;
  }

 private:
  void CheckDistinct() const {
    std::unordered_set<std::string> seen;
    for (const auto& v : values_)
      if (!seen.insert(v).second)
        throw std::invalid_argument("DiscreteDistribution: duplicate value id: " + v);
  }

  void RequireEmpirical(const char* op) const {
    if (!empirical())
      throw std::logic_error(std::string(op) + ": requires the empirical variant");
  }

  std::vector<std::string> values_;
  std::vector<std::uint64_t> counts_;  // empirical variant
  std::vector<double> probs_;          // analytic variant
  std::uint64_t total_ = 0;            // 0 marks the analytic variant
};

struct TableColumn {
  std::string id;
  std::vector<std::string> alphabet;  // legal non-redacted values
};

// The database: n rows of d categorical columns; cells are alphabet members
// or the redaction symbol.
class CategoricalTable {
 public:
  // Standard constructor: at least one column and one row.
  static CategoricalTable Create(std::vector<TableColumn> columns,
                                 std::vector<std::string> cells) {
    if (columns.empty()) throw std::invalid_argument("CategoricalTable: no columns");
    return Build(std::move(columns), std::move(cells));
  }

  // A release may legitimately contain zero columns (the empty release set);
  // only that pathway may construct such a table.
  static CategoricalTable CreateReleased(std::vector<TableColumn> columns,
                                         std::size_t n_rows,
                                         std::vector<std::string> cells) {
    if (columns.empty()) {
      if (n_rows == 0) throw std::invalid_argument("CategoricalTable: no rows");
      if (!cells.empty()) throw std::invalid_argument("CategoricalTable: stray cells");
      CategoricalTable t;
      t.n_rows_ = n_rows;
      return t;
    }
    CategoricalTable t = Build(std::move(columns), std::move(cells));
    if (t.n_rows() != n_rows)
      throw std::invalid_argument("CategoricalTable: row count mismatch");
    return t;
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<TableColumn>& columns() const { return columns_; }

  const std::string& cell(std::size_t row, std::size_t col) const {
    return cells_.at(row * n_cols() + col);
  }

  std::size_t ColumnIndex(const std::string& id) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].id == id) return i;
    throw std::invalid_argument("CategoricalTable: unknown column id: " + id);
  }

  std::vector<std::string> Row(std::size_t row) const {
    std::vector<std::string> r(n_cols());
    for (std::size_t c = 0; c < n_cols(); ++c) r[c] = cell(row, c);
    return r;
  }

  std::vector<std::string> RowSubset(std::size_t row,
                                     const std::vector<std::size_t>& cols) const {
    std::vector<std::string> r;
    r.reserve(cols.size());
    for (const auto c : cols) r.push_back(cell(row, c));
    return r;
  }

 private:
  static CategoricalTable Build(std::vector<TableColumn> columns,
                                std::vector<std::string> cells) {
    const std::size_t d = columns.size();
    if (cells.empty() || cells.size() % d != 0)
      throw std::invalid_argument("CategoricalTable: cell count not a multiple of columns");
    CategoricalTable t;
    t.columns_ = std::move(columns);
    t.cells_ = std::move(cells);
    t.n_rows_ = t.cells_.size() / d;
    std::unordered_set<std::string> ids;
    for (const auto& col : t.columns_)
      if (!ids.insert(col.id).second)
        throw std::invalid_argument("CategoricalTable: duplicate column id: " + col.id);
    for (const auto& col : t.columns_) {
      std::unordered_set<std::string> seen;
      for (const auto& v : col.alphabet) {
        if (v == Redacted())
          throw std::invalid_argument("CategoricalTable: alphabet contains the redaction symbol");
        if (!seen.insert(v).second)
          throw std::invalid_argument("CategoricalTable: duplicate alphabet value: " + v);
      }
    }
    for (std::size_t r = 0; r < t.n_rows_; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        const std::string& v = t.cell(r, c);
        if (v.find(kTupleSeparator) != std::string::npos)
          throw std::invalid_argument("CategoricalTable: cell contains the tuple separator");
        if (v == Redacted()) continue;
        const auto& alpha = t.columns_[c].alphabet;
        if (std::find(alpha.begin(), alpha.end(), v) == alpha.end())
          throw std::invalid_argument("CategoricalTable: cell value '" + v +
                                      "' not in alphabet of column " + t.columns_[c].id);
      }
    }
    return t;
  }

  std::vector<TableColumn> columns_;
  std::vector<std::string> cells_;  // row-major
  std::size_t n_rows_ = 0;
};

// Empirical joint distribution of the selected columns; the redaction symbol
// is an ordinary value. Values are joint tuples joined with the tuple
// separator, listed in lexicographic order for determinism.
inline DiscreteDistribution EmpiricalDistribution(const CategoricalTable& table,
                                                  const std::vector<std::size_t>& cols) {
  if (cols.empty())
    throw std::invalid_argument("EmpiricalDistribution: empty column subset");
  for (const auto c : cols)
    if (c >= table.n_cols())
      throw std::invalid_argument("EmpiricalDistribution: column index out of range");
  std::map<std::string, std::uint64_t> tally;
  for (std::size_t r = 0; r < table.n_rows(); ++r)
    ++tally[JoinTuple(table.RowSubset(r, cols))];
  std::vector<std::string> values;
  std::vector<std::uint64_t> counts;
  values.reserve(tally.size());
  counts.reserve(tally.size());
  for (const auto& [v, c] : tally) {
    values.push_back(v);
    counts.push_back(c);
  }
  return DiscreteDistribution::Empirical(std::move(values), std::move(counts));
}

inline DiscreteDistribution EmpiricalDistribution(const CategoricalTable& table,
                                                  const std::vector<std::string>& col_ids) {
  std::vector<std::size_t> cols;
  cols.reserve(col_ids.size());
  for (const auto& id : col_ids) cols.push_back(table.ColumnIndex(id));
  return EmpiricalDistribution(table, cols);
}

inline std::vector<std::size_t> AllColumns(const CategoricalTable& table) {
  std::vector<std::size_t> cols(table.n_cols());
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return cols;
}

}  // namespace statanon

#endif  // STATANON_DISTRIBUTION_HPP_
