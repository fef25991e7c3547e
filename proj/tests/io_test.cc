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

#include "statanon/io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "statanon/composition.hpp"
#include "statanon/protocol.hpp"
#include "statanon/random.hpp"
#include "test_util.hpp"

namespace statanon {
namespace {

using nlohmann::json;

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  ASSERT_TRUE(out.good()) << path;
  out << content;
}

TEST(SchemaTest, ParsesFieldsAndDefaults) {
  const json j = json::parse(R"({
    "missing_values": ["?", ""],
    "columns": [
      {"name": "sex"},
      {"name": "wage", "source": "income", "alphabet": ["lo", "hi"]},
      {"name": "age", "source_index": 3,
       "threshold": {"cutoff": 40, "le_label": "young", "gt_label": "old"}}
    ]
  })");
  const TableSchema schema = SchemaFromJson(j);
  EXPECT_TRUE(schema.has_header);
  EXPECT_EQ(schema.missing_values, (std::vector<std::string>{"?", ""}));
  ASSERT_EQ(schema.columns.size(), 3u);
  EXPECT_FALSE(schema.columns[0].source_name.has_value());
  EXPECT_EQ(schema.columns[1].source_name.value(), "income");
  EXPECT_EQ(schema.columns[1].alphabet, (std::vector<std::string>{"lo", "hi"}));
  EXPECT_EQ(schema.columns[2].source_index.value(), 3u);
  ASSERT_TRUE(schema.columns[2].threshold.has_value());
  EXPECT_DOUBLE_EQ(schema.columns[2].threshold->cutoff, 40.0);
  EXPECT_EQ(schema.columns[2].threshold->le_label, "young");
}

TEST(SchemaTest, RejectsBadDocuments) {
  EXPECT_THROW(SchemaFromJson(json::parse(R"({"columns": []})")), std::runtime_error);
  EXPECT_THROW(SchemaFromJson(json::parse(R"({})")), std::runtime_error);
  EXPECT_THROW(SchemaFromJson(json::parse(
                   R"({"columns": [{"name": "a"}, {"name": "a"}]})")),
               std::runtime_error);
}

TableSchema TwoColumnSchema() {
  return SchemaFromJson(json::parse(R"({
    "missing_values": ["?"],
    "columns": [{"name": "x"}, {"name": "y"}]
  })"));
}

TEST(LoadCsvTest, HeaderLookupByNameWithInferenceAndMissingTokens) {
  std::istringstream in(
      "y,x,ignored\n"
      "b, u ,9\n"
      "a,v,9\n"
      "?,u,9\n");
  const auto table = LoadCsv(in, TwoColumnSchema());
  ASSERT_EQ(table.n_rows(), 3u);
  ASSERT_EQ(table.n_cols(), 2u);
  EXPECT_EQ(table.columns()[0].id, "x");
  // Cells are trimmed; alphabets are inferred sorted; "?" became redacted.
  EXPECT_EQ(table.cell(0, 0), "u");
  EXPECT_EQ(table.cell(0, 1), "b");
  EXPECT_EQ(table.cell(2, 1), Redacted());
  EXPECT_EQ(table.columns()[0].alphabet, (std::vector<std::string>{"u", "v"}));
  EXPECT_EQ(table.columns()[1].alphabet, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsvTest, SourceNameAndSourceIndexOverrideHeaderName) {
  const auto schema = SchemaFromJson(json::parse(R"({
    "columns": [{"name": "wage", "source": "income"},
                {"name": "first", "source_index": 0}]
  })"));
  std::istringstream in(
      "city,income\n"
      "rome,hi\n"
      "oslo,lo\n");
  const auto table = LoadCsv(in, schema);
  EXPECT_EQ(table.cell(0, 0), "hi");
  EXPECT_EQ(table.cell(0, 1), "rome");
  EXPECT_EQ(table.cell(1, 0), "lo");
}

TEST(LoadCsvTest, HeaderlessRequiresSourceIndex) {
  const auto positional = SchemaFromJson(json::parse(R"({
    "has_header": false,
    "columns": [{"name": "x", "source_index": 1}]
  })"));
  std::istringstream ok("p,q\nr,s\n");
  const auto table = LoadCsv(ok, positional);
  ASSERT_EQ(table.n_rows(), 2u);
  EXPECT_EQ(table.cell(0, 0), "q");

  const auto unindexed = SchemaFromJson(json::parse(R"({
    "has_header": false,
    "columns": [{"name": "x"}]
  })"));
  std::istringstream bad("p\n");
  EXPECT_THROW(LoadCsv(bad, unindexed), std::runtime_error);
}

TEST(LoadCsvTest, ThresholdRuleBinsNumericCells) {
  const auto schema = SchemaFromJson(json::parse(R"({
    "missing_values": ["?"],
    "columns": [{"name": "age",
                 "threshold": {"cutoff": 40, "le_label": "young", "gt_label": "old"}}]
  })"));
  std::istringstream in("age\n39.5\n40\n41\n?\n");
  const auto table = LoadCsv(in, schema);
  EXPECT_EQ(table.cell(0, 0), "young");
  EXPECT_EQ(table.cell(1, 0), "young");  // boundary maps to the le side
  EXPECT_EQ(table.cell(2, 0), "old");
  EXPECT_EQ(table.cell(3, 0), Redacted());
  EXPECT_EQ(table.columns()[0].alphabet, (std::vector<std::string>{"young", "old"}));

  std::istringstream bad("age\nforty\n");
  EXPECT_THROW(LoadCsv(bad, schema), std::runtime_error);
}

TEST(LoadCsvTest, StructuralErrorsAreDataErrors) {
  std::istringstream short_row("x,y\nonly_one_field\n");
  EXPECT_THROW(LoadCsv(short_row, TwoColumnSchema()), std::runtime_error);
  std::istringstream empty("x,y\n\n\n");
  EXPECT_THROW(LoadCsv(empty, TwoColumnSchema()), std::runtime_error);
  const auto declared = SchemaFromJson(json::parse(R"({
    "columns": [{"name": "x", "alphabet": ["u"]}]
  })"));
  std::istringstream off_alphabet("x\nu\nw\n");
  try {
    LoadCsv(off_alphabet, declared);
    FAIL() << "expected a data error";
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("csv:", 0), 0u);
  }
}

TEST(LoadCsvTest, WriteThenLoadRoundTripsTables) {
  Rng rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    const auto table = testutil::RandomTable(rng, 20, 3);
    std::ostringstream out;
    WriteTableCsv(out, table);
    TableSchema schema;
    schema.missing_values = {Redacted()};
    for (const auto& col : table.columns())
      schema.columns.push_back({col.id, std::nullopt, std::nullopt, col.alphabet,
                                std::nullopt});
    std::istringstream in(out.str());
    const auto back = LoadCsv(in, schema);
    ASSERT_EQ(back.n_rows(), table.n_rows());
    ASSERT_EQ(back.n_cols(), table.n_cols());
    for (std::size_t r = 0; r < table.n_rows(); ++r)
      for (std::size_t c = 0; c < table.n_cols(); ++c)
        EXPECT_EQ(back.cell(r, c), table.cell(r, c));
  }
}

TEST(CurveCsvTest, HeaderAndRowShape) {
  std::ostringstream out;
  WriteCurveCsv(out, {{"c1", 0.25, 0.5}, {"joint", 1.0, 1.0}});
  std::istringstream lines(out.str());
  std::string line;
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "label,t,exposure");
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "c1,0.25,0.5");
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "joint,1,1");
  EXPECT_FALSE(std::getline(lines, line));
}

TEST(EstimatorCsvTest, HeaderMatchesTheDocumentedColumns) {
  EstimatorSummary s;
  s.k_grid = {2};
  s.mean_exposure = {0.5};
  s.std_exposure = {0.0};
  s.mean_statexp = {0.25};
  s.std_statexp = {0.0};
  s.truth = {0.5};
  std::ostringstream out;
  WriteEstimatorSummaryCsv(out, s);
  std::istringstream lines(out.str());
  std::string line;
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "k,mean_exposure,std_exposure,mean_statexp,std_statexp,truth");
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "2,0.5,0,0.25,0,0.5");
}

TEST(CertificateJsonTest, SupportAndGeneralFields) {
  const auto d = DiscreteDistribution::Empirical({"0", "1"}, {2, 2});
  std::vector<MarginalSpec<Rational>> specs = {
      {MakeExposureCurve(d), MakeRational(2, 5), 2},
      {MakeExposureCurve(d), MakeRational(2, 5), 2}};
  const auto support = CertificateToJson(ComposeSupport(specs, 0));
  EXPECT_EQ(support.at("rule"), "support");
  EXPECT_EQ(support.at("j_star"), 0);
  EXPECT_TRUE(support.at("exact").get<bool>());
  EXPECT_EQ(support.at("thresholds_exact"),
            (std::vector<std::string>{"2/5", "2/5"}));
  EXPECT_EQ(support.at("joint_threshold_exact"), "4/25");
  EXPECT_EQ(support.at("bound_exact"), "4/5");
  EXPECT_FALSE(support.contains("c"));

  const auto general = CertificateToJson(ComposeGeneral(specs, MakeRational(1, 2)));
  EXPECT_EQ(general.at("rule"), "general");
  EXPECT_EQ(general.at("c_exact"), "1/2");
  EXPECT_EQ(general.at("joint_threshold_exact"), "2/25");
  EXPECT_EQ(general.at("bound_exact"), "1/2");
  EXPECT_FALSE(general.contains("j_star"));
}

TEST(CertificateJsonTest, RecordedParametersRecomputeTheBound) {
  // The certificate must be auditable: replaying the recorded rule with the
  // recorded thresholds (and c) reproduces the recorded bound exactly.
  Rng rng(311);
  for (int trial = 0; trial < 20; ++trial) {
    const auto table = testutil::RandomTable(rng, 16, 3);
    std::vector<MarginalCurve> marginals;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      const auto d = EmpiricalDistribution(table, std::vector<std::size_t>{c});
      marginals.push_back({MakeExposureCurve(d), d.size()});
    }
    const auto max_num =
        std::min<std::uint64_t>(3, static_cast<std::uint64_t>(table.n_rows()) - 1);
    const Rational target =
        MakeRational(1 + static_cast<std::int64_t>(rng.NextInt(0, max_num)),
                     static_cast<std::int64_t>(table.n_rows()));
    const auto cert = BestBound<Rational>(marginals, target);
    ASSERT_TRUE(cert.exact);

    std::vector<MarginalSpec<Rational>> specs;
    for (std::size_t j = 0; j < marginals.size(); ++j)
      specs.push_back({marginals[j].curve, cert.thresholds_r[j],
                       cert.support_sizes[j]});
    const auto replay = cert.rule == "support"
                            ? ComposeSupport(specs, static_cast<std::size_t>(cert.j_star))
                            : ComposeGeneral(specs, cert.c_r);
    EXPECT_EQ(replay.bound_r, cert.bound_r);
    EXPECT_EQ(replay.joint_threshold_r, cert.joint_threshold_r);
  }
}

TEST(DecisionJsonTest, EmbedsPolicyAndCertificateOrNull) {
  ReleaseDecision decision;
  decision.policy.mode = PolicyParams::Mode::kFixed;
  decision.policy.target_k = 2;
  decision.policy.budget = 0.25;
  const auto empty = DecisionToJson(decision);
  EXPECT_TRUE(empty.at("certificate").is_null());
  EXPECT_EQ(empty.at("released"), json::array());
  EXPECT_EQ(empty.at("policy").at("mode"), "fixed");
  EXPECT_EQ(empty.at("policy").at("target_k"), 2);

  decision.released = {0};
  decision.released_ids = {"x"};
  decision.has_stat_cert = true;
  decision.stat_cert.estimate = 0.1;
  decision.stat_cert.slack = 0.2;
  decision.stat_cert.bound = 0.3;
  decision.stat_cert.k = 4;
  const auto with_cert = DecisionToJson(decision);
  EXPECT_EQ(with_cert.at("certificate").at("rule"), "statistical");
  EXPECT_DOUBLE_EQ(with_cert.at("certificate").at("bound_reported").get<double>(), 0.3);
}

TEST(TranscriptLogTest, OneLinePerEventWithHexDigest) {
  std::vector<TableColumn> columns = {{"c", {"a", "b"}}};
  const auto table = CategoricalTable::Create(
      std::move(columns), std::vector<std::string>{"a", "b", "a"});
  XorStreamCipher cipher;
  const auto r1 = RunRoundOne(table, 3, cipher);
  const std::string log = TranscriptLog(r1.transcript);
  std::istringstream lines(log);
  std::string line;
  std::size_t n_lines = 0;
  while (std::getline(lines, line)) {
    ++n_lines;
    std::istringstream fields(line);
    std::string party, direction, hop, digest, extra;
    ASSERT_TRUE(fields >> party >> direction >> hop >> digest) << line;
    EXPECT_FALSE(fields >> extra) << line;
    EXPECT_TRUE(direction == "send" || direction == "recv");
    EXPECT_TRUE(hop == "0" || hop == "1");
    ASSERT_EQ(digest.size(), 16u);
    for (const char ch : digest) EXPECT_TRUE(std::isxdigit(static_cast<unsigned char>(ch)));
  }
  // n·d sends, n·d shuffler receipts, and send+recv per shuffled message.
  EXPECT_EQ(n_lines, 4u * table.n_rows() * table.n_cols());
  EXPECT_EQ(TranscriptLog(r1.transcript), log);  // purely a function of the transcript
}

TEST(ConfigTest, RationalTargetsParseExactly) {
  const auto p1 = PolicyFromJson(json::parse(R"({"target_t": "2/101"})"),
                                 PolicyParams::Mode::kFixed);
  ASSERT_TRUE(p1.target_t.has_value());
  EXPECT_EQ(*p1.target_t, MakeRational(2, 101));
  const auto p2 = PolicyFromJson(json::parse(R"({"target_t": 0.5})"),
                                 PolicyParams::Mode::kFixed);
  EXPECT_EQ(*p2.target_t, MakeRational(1, 2));  // dyadic doubles convert exactly
  const auto p3 = PolicyFromJson(json::parse(R"({"target_t": "0.25"})"),
                                 PolicyParams::Mode::kFixed);
  EXPECT_EQ(*p3.target_t, MakeRational(1, 4));
  EXPECT_THROW(PolicyFromJson(json::parse(R"({"budget": 0.5})"),
                              PolicyParams::Mode::kFixed),
               std::runtime_error);
}

TEST(ConfigTest, PolicyDefaultsAndModeOverride) {
  const auto p = PolicyFromJson(json::parse(R"({"target_k": 4})"),
                                PolicyParams::Mode::kStatistical);
  EXPECT_EQ(p.mode, PolicyParams::Mode::kStatistical);
  EXPECT_EQ(p.target_k, 4);
  EXPECT_DOUBLE_EQ(p.budget, 1.0);
  EXPECT_DOUBLE_EQ(p.delta, 0.05);
  const auto q = PolicyFromJson(json::parse(R"({"target_k": 4, "mode": "fixed"})"),
                                PolicyParams::Mode::kStatistical);
  EXPECT_EQ(q.mode, PolicyParams::Mode::kFixed);
  EXPECT_THROW(PolicyFromJson(json::parse(R"({"target_k": 4, "mode": "magic"})"),
                              PolicyParams::Mode::kFixed),
               std::runtime_error);
}

TEST(ConfigTest, DistributionDocuments) {
  const auto uniform = DistributionFromJson(json::parse(R"({"uniform": 4})"));
  ASSERT_EQ(uniform.size(), 4u);
  EXPECT_EQ(uniform.values()[0], "v0");
  EXPECT_DOUBLE_EQ(uniform.prob(3), 0.25);
  const auto listed = DistributionFromJson(json::parse(
      R"({"values": ["a", "b"], "probs": [0.75, 0.25]})"));
  EXPECT_DOUBLE_EQ(listed.prob(0), 0.75);
  const auto tuples = DistributionFromJson(json::parse(
      R"({"values": [["x", "p"], ["y", "q"]], "probs": [0.5, 0.5]})"));
  EXPECT_EQ(SplitTuple(tuples.values()[0]), (std::vector<std::string>{"x", "p"}));
}

TEST(ConfigTest, StatisticalDocumentParses) {
  const auto config = ParseProtocolConfig(json::parse(R"({
    "setting": "statistical",
    "seed": 11,
    "policy": {"target_k": 4, "budget": 1.0},
    "distribution": {"uniform": 4},
    "cohorts": [128, 64]
  })"),
                                          "");
  EXPECT_EQ(config.setting, ProtocolConfig::Setting::kStatistical);
  EXPECT_EQ(config.seed, 11u);
  EXPECT_EQ(config.policy.mode, PolicyParams::Mode::kStatistical);
  EXPECT_EQ(config.cohort1, 128);
  EXPECT_EQ(config.cohort2, 64);
  EXPECT_EQ(config.dist_columns, (std::vector<std::string>{"v"}));
  ASSERT_TRUE(config.distribution.has_value());
  EXPECT_EQ(config.distribution->size(), 4u);

  EXPECT_THROW(ParseProtocolConfig(json::parse(R"({
    "setting": "statistical",
    "policy": {"target_k": 4},
    "distribution": {"uniform": 4},
    "cohorts": [128]
  })"),
                                   ""),
               std::runtime_error);
  EXPECT_THROW(ParseProtocolConfig(json::parse(R"({
    "setting": "quantum",
    "policy": {"target_k": 4}
  })"),
                                   ""),
               std::runtime_error);
}

TEST(ConfigTest, FixedDocumentResolvesRelativePaths) {
  const std::string dir = ::testing::TempDir() + "statanon_io_cfg";
  std::filesystem::create_directories(dir);
  WriteFile(dir + "/tiny.csv", "x\na\nb\na\nb\n");
  WriteFile(dir + "/tiny_schema.json", R"({"columns": [{"name": "x"}]})");
  WriteFile(dir + "/config.json", R"({
    "setting": "fixed",
    "seed": 5,
    "policy": {"target_k": 2, "budget": 1.0},
    "table": {"path": "tiny.csv", "schema": "tiny_schema.json"}
  })");
  const auto config = LoadProtocolConfig(dir + "/config.json");
  EXPECT_EQ(config.setting, ProtocolConfig::Setting::kFixed);
  EXPECT_EQ(config.policy.mode, PolicyParams::Mode::kFixed);
  ASSERT_TRUE(config.table.has_value());
  EXPECT_EQ(config.table->n_rows(), 4u);
  EXPECT_EQ(config.table->cell(0, 0), "a");

  XorStreamCipher cipher;
  const auto outcome = RunProtocol(config, cipher);
  EXPECT_TRUE(outcome.sound);
  EXPECT_EQ(outcome.released.n_rows(), 4u);
}

}  // namespace
}  // namespace statanon
