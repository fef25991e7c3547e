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

#ifndef STATANON_IO_HPP_
#define STATANON_IO_HPP_

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "statanon/composition.hpp"
#include "statanon/distribution.hpp"
#include "statanon/estimation.hpp"
#include "statanon/protocol.hpp"
#include "statanon/random.hpp"
#include "statanon/rational.hpp"

namespace statanon {

// ---------------------------------------------------------------------------
// Schema-driven CSV ingestion.
// ---------------------------------------------------------------------------

// Numeric binning: values ≤ cutoff map to le_label, others to gt_label.
struct ThresholdRule {
  double cutoff = 0.0;
  std::string le_label;
  std::string gt_label;
};

struct SchemaColumn {
  std::string name;
  std::optional<std::string> source_name;   // header lookup (defaults to name)
  std::optional<std::size_t> source_index;  // positional lookup
  std::vector<std::string> alphabet;        // empty: infer from data
  std::optional<ThresholdRule> threshold;
};

struct TableSchema {
  bool has_header = true;
  std::vector<std::string> missing_values;  // tokens mapped to the redaction value
  std::vector<SchemaColumn> columns;
};

namespace internal {

inline std::string Trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(Trim(line.substr(start)));
      break;
    }
    out.push_back(Trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace internal

inline TableSchema SchemaFromJson(const nlohmann::json& j) {
  TableSchema schema;
  schema.has_header = j.value("has_header", true);
  if (j.contains("missing_values"))
    for (const auto& m : j.at("missing_values"))
      schema.missing_values.push_back(m.get<std::string>());
  if (!j.contains("columns") || !j.at("columns").is_array() || j.at("columns").empty())
    throw std::runtime_error("schema: 'columns' must be a nonempty array");
  for (const auto& cj : j.at("columns")) {
    SchemaColumn col;
    col.name = cj.at("name").get<std::string>();
    if (cj.contains("source")) col.source_name = cj.at("source").get<std::string>();
    if (cj.contains("source_index"))
      col.source_index = cj.at("source_index").get<std::size_t>();
    if (cj.contains("alphabet") && cj.at("alphabet").is_array())
      for (const auto& a : cj.at("alphabet")) col.alphabet.push_back(a.get<std::string>());
    if (cj.contains("threshold")) {
      const auto& tj = cj.at("threshold");
      col.threshold = ThresholdRule{tj.at("cutoff").get<double>(),
                                    tj.at("le_label").get<std::string>(),
                                    tj.at("gt_label").get<std::string>()};
    }
    schema.columns.push_back(std::move(col));
  }
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    for (std::size_t k = i + 1; k < schema.columns.size(); ++k)
      if (schema.columns[i].name == schema.columns[k].name)
        throw std::runtime_error("schema: duplicate column name: " + schema.columns[i].name);
  return schema;
}

inline TableSchema LoadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("schema: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("schema: " + path + ": " + e.what());
  }
  return SchemaFromJson(j);
}

// Reads a comma-separated file under the schema: cells are trimmed, missing
// tokens become the redaction value, threshold rules bin numeric cells, and
// undeclared alphabets are inferred from the data. No quoting support.
inline CategoricalTable LoadCsv(std::istream& in, const TableSchema& schema) {
  std::vector<std::size_t> source(schema.columns.size());
  std::string line;
  if (schema.has_header) {
    if (!std::getline(in, line)) throw std::runtime_error("csv: missing header row");
    const auto header = internal::SplitCsvLine(line);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto& col = schema.columns[c];
      if (col.source_index.has_value()) {
        source[c] = *col.source_index;
      } else {
        const std::string key = col.source_name.value_or(col.name);
        const auto it = index.find(key);
        if (it == index.end())
          throw std::runtime_error("csv: header lacks column '" + key + "'");
        source[c] = it->second;
      }
    }
  } else {
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      if (!schema.columns[c].source_index.has_value())
        throw std::runtime_error("csv: headerless input needs source_index for '" +
                                 schema.columns[c].name + "'");
      source[c] = *schema.columns[c].source_index;
    }
  }

  std::vector<std::string> cells;
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    if (internal::Trim(line).empty()) continue;
    const auto fields = internal::SplitCsvLine(line);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      if (source[c] >= fields.size())
        throw std::runtime_error("csv: row " + std::to_string(n_rows + 1) +
                                 " has too few fields");
      std::string cell = fields[source[c]];
      bool missing = false;
      for (const auto& m : schema.missing_values)
        if (cell == m) missing = true;
      if (missing) {
        cell = Redacted();
      } else if (schema.columns[c].threshold.has_value()) {
        const auto& rule = *schema.columns[c].threshold;
        std::size_t used = 0;
        double value = 0.0;
        try {
          value = std::stod(cell, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != cell.size() || cell.empty())
          throw std::runtime_error("csv: non-numeric cell '" + cell +
                                   "' under threshold rule for '" +
                                   schema.columns[c].name + "'");
        cell = value <= rule.cutoff ? rule.le_label : rule.gt_label;
      }
      cells.push_back(std::move(cell));
    }
    ++n_rows;
  }
  if (n_rows == 0) throw std::runtime_error("csv: no data rows");

  std::vector<TableColumn> columns;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto& col = schema.columns[c];
    std::vector<std::string> alphabet = col.alphabet;
    if (col.threshold.has_value() && alphabet.empty())
      alphabet = {col.threshold->le_label, col.threshold->gt_label};
    if (alphabet.empty()) {
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& cell = cells[r * schema.columns.size() + c];
        if (cell != Redacted() &&
            std::find(alphabet.begin(), alphabet.end(), cell) == alphabet.end())
          alphabet.push_back(cell);
      }
      std::sort(alphabet.begin(), alphabet.end());
    }
    columns.push_back({col.name, std::move(alphabet)});
  }
  try {
    return CategoricalTable::Create(std::move(columns), std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("csv: ") + e.what());
  }
}

inline CategoricalTable LoadCsvFile(const std::string& path, const TableSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return LoadCsv(in, schema);
}

inline void WriteTableCsv(std::ostream& out, const CategoricalTable& table) {
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c > 0) out << ',';
    out << table.columns()[c].id;
  }
  out << '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      if (c > 0) out << ',';
      out << table.cell(r, c);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Curve and estimator exports.
// ---------------------------------------------------------------------------

struct CurvePoint {
  std::string label;
  double t = 0.0;
  double exposure = 0.0;
};

inline void WriteCurveCsv(std::ostream& out, const std::vector<CurvePoint>& rows) {
  out << "label,t,exposure\n";
  std::ostringstream fmt;
  fmt.precision(17);
  for (const auto& row : rows) {
    fmt.str("");
    fmt << row.t << ',' << row.exposure;
    out << row.label << ',' << fmt.str() << '\n';
  }
}

inline void WriteEstimatorSummaryCsv(std::ostream& out, const EstimatorSummary& s) {
  out << "k,mean_exposure,std_exposure,mean_statexp,std_statexp,truth\n";
  std::ostringstream fmt;
  fmt.precision(17);
  for (std::size_t i = 0; i < s.k_grid.size(); ++i) {
    fmt.str("");
    fmt << s.k_grid[i] << ',' << s.mean_exposure[i] << ',' << s.std_exposure[i] << ','
        << s.mean_statexp[i] << ',' << s.std_statexp[i] << ',' << s.truth[i];
    out << fmt.str() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Certificate and decision serialization.
// ---------------------------------------------------------------------------

inline nlohmann::json CertificateToJson(const BoundCertificate& cert) {
  nlohmann::json j;
  j["rule"] = cert.rule;
  j["thresholds"] = cert.thresholds;
  j["support_sizes"] = cert.support_sizes;
  j["joint_threshold"] = cert.joint_threshold;
  j["bound"] = cert.bound;
  j["bound_reported"] = cert.ReportedBound();
  j["exact"] = cert.exact;
  if (cert.rule == "support") j["j_star"] = cert.j_star;
  if (cert.rule == "general") j["c"] = cert.c;
  if (cert.exact) {
    std::vector<std::string> ts;
    for (const auto& t : cert.thresholds_r) ts.push_back(RationalString(t));
    j["thresholds_exact"] = ts;
    j["joint_threshold_exact"] = RationalString(cert.joint_threshold_r);
    j["bound_exact"] = RationalString(cert.bound_r);
    if (cert.rule == "general") j["c_exact"] = RationalString(cert.c_r);
  }
  return j;
}

inline nlohmann::json CertificateToJson(const StatisticalCertificate& cert) {
  nlohmann::json j;
  j["rule"] = "statistical";
  j["estimate"] = cert.estimate;
  j["gamma"] = cert.gamma;
  j["slack"] = cert.slack;
  j["bound"] = cert.bound;
  j["bound_reported"] = cert.ReportedBound();
  j["k"] = cert.k;
  j["n_round1"] = cert.n_round1;
  j["n_round2"] = cert.n_round2;
  j["joint_support"] = cert.joint_support;
  j["delta"] = cert.delta;
  return j;
}

inline nlohmann::json PolicyToJson(const PolicyParams& policy) {
  nlohmann::json j;
  j["mode"] = policy.mode == PolicyParams::Mode::kFixed ? "fixed" : "statistical";
  if (policy.target_t.has_value()) {
    j["target_t"] = RationalString(*policy.target_t);
  } else {
    j["target_k"] = policy.target_k;
  }
  j["budget"] = policy.budget;
  j["delta"] = policy.delta;
  if (!policy.utility_order.empty()) j["utility"] = policy.utility_order;
  return j;
}

inline nlohmann::json DecisionToJson(const ReleaseDecision& decision) {
  nlohmann::json j;
  j["released"] = decision.released_ids;
  j["policy"] = PolicyToJson(decision.policy);
  if (decision.has_fixed_cert) {
    j["certificate"] = CertificateToJson(decision.fixed_cert);
  } else if (decision.has_stat_cert) {
    j["certificate"] = CertificateToJson(decision.stat_cert);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Transcript logs.
// ---------------------------------------------------------------------------

// One line per wire event: party direction hop digest.
inline std::string TranscriptLog(const ProtocolTranscript& transcript) {
  std::string out;
  for (const auto& e : transcript.entries) {
    out += e.party;
    out += ' ';
    out += e.direction;
    out += ' ';
    out += std::to_string(e.hop);
    out += ' ';
    out += DigestHex(e.payload);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Protocol configuration documents.
// ---------------------------------------------------------------------------

namespace internal {

inline Rational RationalFromJson(const nlohmann::json& j, const char* what) {
  if (j.is_string()) return ParseRational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(j.get<long long>()));
  if (j.is_number_float()) {
    // Exact conversion of the IEEE value; use a string like "2/101" for
    // targets that are not dyadic rationals.
    const double v = j.get<double>();
    int exp = 0;
    const double mant = std::frexp(v, &exp);
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    Rational r{BigInt(scaled)};
    const int e2 = exp - 53;
    if (e2 >= 0) {
      r *= Rational(BigInt(1) << e2);
    } else {
      r /= Rational(BigInt(1) << (-e2));
    }
    return r;
  }
  throw std::runtime_error(std::string("config: ") + what + " must be a number or string");
}

}  // namespace internal

// Distribution document: either {"uniform": m} over values "v0".."v{m-1}",
// or explicit {"values": [...], "probs": [...]} where multi-column tuple
// values are arrays of strings.
inline DiscreteDistribution DistributionFromJson(const nlohmann::json& j) {
  if (j.contains("uniform")) {
    const auto m = j.at("uniform").get<std::size_t>();
    if (m < 1) throw std::runtime_error("config: uniform distribution needs size >= 1");
    std::vector<std::string> values;
    std::vector<double> probs;
    for (std::size_t i = 0; i < m; ++i) {
      values.push_back("v" + std::to_string(i));
      probs.push_back(1.0 / static_cast<double>(m));
    }
    return DiscreteDistribution::Analytic(std::move(values), std::move(probs));
  }
  std::vector<std::string> values;
  for (const auto& v : j.at("values")) {
    if (v.is_array()) {
      std::vector<std::string> parts;
      for (const auto& p : v) parts.push_back(p.get<std::string>());
      values.push_back(JoinTuple(parts));
    } else {
      values.push_back(v.get<std::string>());
    }
  }
  std::vector<double> probs;
  for (const auto& p : j.at("probs")) probs.push_back(p.get<double>());
  return DiscreteDistribution::Analytic(std::move(values), std::move(probs));
}

inline PolicyParams PolicyFromJson(const nlohmann::json& j,
                                   PolicyParams::Mode default_mode) {
  PolicyParams policy;
  policy.mode = default_mode;
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "fixed") {
      policy.mode = PolicyParams::Mode::kFixed;
    } else if (mode == "statistical") {
      policy.mode = PolicyParams::Mode::kStatistical;
    } else {
      throw std::runtime_error("config: unknown policy mode: " + mode);
    }
  }
  if (j.contains("target_t"))
    policy.target_t = internal::RationalFromJson(j.at("target_t"), "target_t");
  if (j.contains("target_k")) policy.target_k = j.at("target_k").get<std::int64_t>();
  if (!j.contains("target_t") && !j.contains("target_k"))
    throw std::runtime_error("config: policy needs target_k or target_t");
  policy.budget = j.value("budget", 1.0);
  policy.delta = j.value("delta", 0.05);
  if (j.contains("utility"))
    for (const auto& u : j.at("utility")) policy.utility_order.push_back(u.get<std::string>());
  return policy;
}

// Full simulation document. Table paths are resolved against base_dir.
inline ProtocolConfig ParseProtocolConfig(const nlohmann::json& j,
                                          const std::string& base_dir) {
  ProtocolConfig config;
  const auto setting = j.at("setting").get<std::string>();
  if (setting == "fixed") {
    config.setting = ProtocolConfig::Setting::kFixed;
  } else if (setting == "statistical") {
    config.setting = ProtocolConfig::Setting::kStatistical;
  } else {
    throw std::runtime_error("config: unknown setting: " + setting);
  }
  config.seed = j.value("seed", 0ULL);
  config.policy = PolicyFromJson(j.at("policy"),
                                 config.setting == ProtocolConfig::Setting::kFixed
                                     ? PolicyParams::Mode::kFixed
                                     : PolicyParams::Mode::kStatistical);

  const auto resolve = [&](const std::string& path) {
    if (path.empty() || path.front() == '/' || base_dir.empty()) return path;
    return base_dir + "/" + path;
  };

  if (config.setting == ProtocolConfig::Setting::kFixed) {
    const auto& tj = j.at("table");
    const auto schema = LoadSchema(resolve(tj.at("schema").get<std::string>()));
    config.table = LoadCsvFile(resolve(tj.at("path").get<std::string>()), schema);
  } else {
    const auto& dj = j.at("distribution");
    config.distribution = DistributionFromJson(dj);
    if (dj.contains("columns")) {
      for (const auto& c : dj.at("columns"))
        config.dist_columns.push_back(c.get<std::string>());
    } else {
      config.dist_columns = {"v"};
    }
    const auto& cohorts = j.at("cohorts");
    if (!cohorts.is_array() || cohorts.size() != 2)
      throw std::runtime_error("config: 'cohorts' must be [n_round1, n_round2]");
    config.cohort1 = cohorts[0].get<std::int64_t>();
    config.cohort2 = cohorts[1].get<std::int64_t>();
  }
  return config;
}

inline ProtocolConfig LoadProtocolConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  const auto slash = path.find_last_of('/');
  const std::string base_dir = slash == std::string::npos ? "" : path.substr(0, slash);
  try {
    return ParseProtocolConfig(j, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
}

}  // namespace statanon

#endif  // STATANON_IO_HPP_
