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

// Command-line driver: exposure analysis, composition certificates,
// protocol simulation, estimator comparisons, and hard-pair emitters.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 certificate
// soundness violation (treated as a bug signal).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "statanon/statanon.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitUnsound = 3;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> SplitList(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto pos = csv.find(',', start);
    if (pos == std::string::npos) {
      if (start < csv.size()) out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

statanon::CategoricalTable LoadInput(const std::string& input, const std::string& schema) {
  try {
    return statanon::LoadCsvFile(input, statanon::LoadSchema(schema));
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

std::vector<std::string> ResolveColumns(const statanon::CategoricalTable& table,
                                        const std::string& columns_flag) {
  if (columns_flag.empty()) {
    std::vector<std::string> ids;
    for (const auto& col : table.columns()) ids.push_back(col.id);
    return ids;
  }
  auto ids = SplitList(columns_flag);
  for (const auto& id : ids) table.ColumnIndex(id);  // throws on unknown id
  return ids;
}

void WriteFileOrThrow(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// analyze: per-column, joint, and best-bound exposure curves over a t grid.
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  std::string schema;
  std::string columns;
  std::string out_dir;
  std::string t_grid;
  std::size_t grid_size = 200;
  std::string format = "csv";
};

int RunAnalyze(const AnalyzeArgs& args) {
  const auto table = LoadInput(args.input, args.schema);
  const auto ids = ResolveColumns(table, args.columns);
  const auto n = table.n_rows();

  std::vector<statanon::ExposureCurve> column_curves;
  std::vector<statanon::MarginalCurve> marginals;
  for (const auto& id : ids) {
    auto curve = statanon::MakeExposureCurve(
        statanon::EmpiricalDistribution(table, std::vector<std::string>{id}));
    marginals.push_back({curve, curve.value_count()});
    column_curves.push_back(std::move(curve));
  }
  const auto joint_curve =
      statanon::MakeExposureCurve(statanon::EmpiricalDistribution(table, ids));

  std::vector<double> grid;
  if (!args.t_grid.empty()) {
    for (const auto& tok : SplitList(args.t_grid)) grid.push_back(std::stod(tok));
  } else {
    for (const auto& pt : joint_curve.points()) grid.push_back(pt.level);
    const double lo = std::log(1.0 / static_cast<double>(n));
    const std::size_t m = std::max<std::size_t>(2, args.grid_size);
    for (std::size_t i = 0; i < m; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(m - 1);
      grid.push_back(std::exp(lo * (1.0 - f)));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(),
                            [](double t) { return !(t > 0.0) || t > 1.0; }),
             grid.end());
  if (grid.empty()) throw DataError("analyze: empty t grid");

  std::vector<statanon::CurvePoint> rows;
  for (std::size_t c = 0; c < ids.size(); ++c)
    for (const auto t : grid)
      rows.push_back({ids[c], t, column_curves[c].ValueAt(t)});
  for (const auto t : grid) rows.push_back({"joint", t, joint_curve.ValueAt(t)});
  for (const auto t : grid) {
    const auto cert = statanon::BestBound<double>(marginals, t);
    rows.push_back({"best_bound", t, cert.ReportedBound()});
  }

  std::filesystem::create_directories(args.out_dir);
  if (args.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows)
      j.push_back({{"label", row.label}, {"t", row.t}, {"exposure", row.exposure}});
    WriteFileOrThrow(args.out_dir + "/curves.json", j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    statanon::WriteCurveCsv(out, rows);
    WriteFileOrThrow(args.out_dir + "/curves.csv", out.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate: run the two-round protocol from a config document.
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  std::int64_t trials = 1;
  std::optional<std::uint64_t> seed;
};

nlohmann::json OutcomeToJson(const statanon::ProtocolOutcome& outcome,
                             std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["released"] = outcome.decision.released_ids;
  j["realized_exposure"] = outcome.realized_exposure;
  j["realized_exposure_exact"] = statanon::RationalString(outcome.realized_exposure_r);
  j["certified_bound"] = outcome.certified_bound;
  j["sound"] = outcome.sound;
  return j;
}

int RunSimulate(const SimulateArgs& args) {
  statanon::ProtocolConfig config;
  try {
    config = statanon::LoadProtocolConfig(args.config);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  if (args.seed.has_value()) config.seed = *args.seed;
  if (args.trials < 1) throw DataError("simulate: --trials must be >= 1");
  const statanon::XorStreamCipher cipher;
  std::filesystem::create_directories(args.out_dir);

  if (args.trials == 1) {
    const auto outcome = statanon::RunProtocol(config, cipher);
    {
      std::ostringstream out;
      statanon::WriteTableCsv(out, outcome.released);
      WriteFileOrThrow(args.out_dir + "/released.csv", out.str());
    }
    auto decision = statanon::DecisionToJson(outcome.decision);
    decision["outcome"] = OutcomeToJson(outcome, config.seed);
    WriteFileOrThrow(args.out_dir + "/decision.json", decision.dump(2) + "\n");
    WriteFileOrThrow(args.out_dir + "/transcript_round1.log",
                     statanon::TranscriptLog(outcome.round1));
    WriteFileOrThrow(args.out_dir + "/transcript_round2.log",
                     statanon::TranscriptLog(outcome.round2));
    return outcome.sound ? kExitOk : kExitUnsound;
  }

  // Batch mode: replicate with seeds base, base+1, … and summarize coverage.
  std::ostringstream runs;
  runs << "run,seed,realized_exposure,certified_bound,sound\n";
  runs.precision(17);
  std::int64_t sound_runs = 0;
  for (std::int64_t i = 0; i < args.trials; ++i) {
    auto trial_config = config;
    trial_config.seed = config.seed + static_cast<std::uint64_t>(i);
    const auto outcome = statanon::RunProtocol(trial_config, cipher);
    sound_runs += outcome.sound ? 1 : 0;
    runs << i << ',' << trial_config.seed << ',' << outcome.realized_exposure << ','
         << outcome.certified_bound << ',' << (outcome.sound ? 1 : 0) << '\n';
  }
  WriteFileOrThrow(args.out_dir + "/runs.csv", runs.str());
  nlohmann::json summary;
  summary["runs"] = args.trials;
  summary["sound_runs"] = sound_runs;
  summary["coverage"] =
      static_cast<double>(sound_runs) / static_cast<double>(args.trials);
  summary["base_seed"] = config.seed;
  WriteFileOrThrow(args.out_dir + "/coverage.json", summary.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fig3: estimator comparison sweep over k.
// ---------------------------------------------------------------------------

struct Fig3Args {
  std::int64_t trials = 1000;
  std::int64_t n_users = 128;
  std::string dist = "uniform:4";
  std::string k_grid;
  std::int64_t k_min = 2;
  std::int64_t k_max = 64;
  std::uint64_t seed = 1;
  std::string out_dir;
};

statanon::DiscreteDistribution ParseDistSpec(const std::string& spec) {
  if (spec.rfind("uniform:", 0) == 0) {
    const auto m = static_cast<std::size_t>(std::stoul(spec.substr(8)));
    nlohmann::json j;
    j["uniform"] = m;
    return statanon::DistributionFromJson(j);
  }
  std::vector<std::string> values;
  std::vector<double> probs;
  const auto parts = SplitList(spec);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    values.push_back("v" + std::to_string(i));
    probs.push_back(std::stod(parts[i]));
  }
  return statanon::DiscreteDistribution::Analytic(std::move(values), std::move(probs));
}

int RunFig3(const Fig3Args& args) {
  statanon::DiscreteDistribution dist = ParseDistSpec(args.dist);
  std::vector<std::int64_t> k_grid;
  if (!args.k_grid.empty()) {
    for (const auto& tok : SplitList(args.k_grid)) k_grid.push_back(std::stoll(tok));
  } else {
    for (std::int64_t k = args.k_min; k <= args.k_max; ++k) k_grid.push_back(k);
  }
  const auto summary = statanon::SimulateEstimators(dist, args.n_users, k_grid,
                                                    args.trials, args.seed);
  std::filesystem::create_directories(args.out_dir);
  std::ostringstream out;
  statanon::WriteEstimatorSummaryCsv(out, summary);
  WriteFileOrThrow(args.out_dir + "/estimator_summary.csv", out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds: direct certificate queries on a table.
// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string input;
  std::string schema;
  std::string columns;
  std::string t;
  std::int64_t k = 0;
  std::string rule = "best";
  std::string c;
  std::string thresholds;
  std::int64_t j_star = -1;
  std::string format = "json";
};

int RunBounds(const BoundsArgs& args) {
  const auto table = LoadInput(args.input, args.schema);
  const auto ids = ResolveColumns(table, args.columns);
  std::vector<statanon::MarginalCurve> marginals;
  for (const auto& id : ids) {
    auto curve = statanon::MakeExposureCurve(
        statanon::EmpiricalDistribution(table, std::vector<std::string>{id}));
    const auto support = curve.value_count();
    marginals.push_back({std::move(curve), support});
  }

  statanon::BoundCertificate cert;
  if (args.rule == "best") {
    if (args.t.empty() && args.k < 1)
      throw DataError("bounds: --rule best needs --t or -k");
    const statanon::Rational target =
        !args.t.empty() ? statanon::ParseRational(args.t)
                        : statanon::Rational(statanon::BigInt(args.k),
                                             statanon::BigInt(table.n_rows()));
    cert = statanon::BestBound<statanon::Rational>(marginals, target);
  } else {
    if (args.thresholds.empty())
      throw DataError("bounds: --rule " + args.rule + " needs --thresholds");
    const auto toks = SplitList(args.thresholds);
    if (toks.size() != marginals.size())
      throw DataError("bounds: need one threshold per column");
    std::vector<statanon::MarginalSpec<statanon::Rational>> specs;
    for (std::size_t i = 0; i < marginals.size(); ++i)
      specs.push_back({marginals[i].curve, statanon::ParseRational(toks[i]),
                       marginals[i].support_size});
    if (args.rule == "support") {
      std::size_t j_star = 0;
      if (args.j_star >= 0) {
        j_star = static_cast<std::size_t>(args.j_star);
        if (j_star >= specs.size()) throw DataError("bounds: --j-star out of range");
      } else {
        statanon::Rational best_slack{-1};
        for (std::size_t j = 0; j < specs.size(); ++j) {
          const statanon::Rational slack =
              specs[j].threshold * statanon::BigInt(specs[j].support_size);
          if (slack > best_slack) {
            best_slack = slack;
            j_star = j;
          }
        }
      }
      cert = statanon::ComposeSupport(specs, j_star);
    } else if (args.rule == "general") {
      if (args.c.empty()) throw DataError("bounds: --rule general needs --c");
      cert = statanon::ComposeGeneral(specs, statanon::ParseRational(args.c));
    } else {
      throw DataError("bounds: unknown rule: " + args.rule);
    }
  }

  const auto j = statanon::CertificateToJson(cert);
  if (args.format == "csv") {
    std::cout << "rule,joint_threshold,bound,bound_reported\n"
              << cert.rule << ',' << cert.joint_threshold << ',' << cert.bound << ','
              << cert.ReportedBound() << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// lecam: emit the two-point hard pair for a given (s, n).
// ---------------------------------------------------------------------------

struct LeCamArgs {
  std::int64_t s = 2;
  std::int64_t n = 100;
  std::string format = "json";
};

int RunLeCam(const LeCamArgs& args) {
  statanon::LeCamPair pair;
  try {
    pair = statanon::LeCamHardPair(args.s, args.n);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  const double kl = statanon::KlDivergence(pair.p0, pair.p1);
  if (args.format == "csv") {
    std::cout << "value,p0_count,p1_count,total\n";
    for (std::size_t i = 0; i < pair.p0.size(); ++i)
      std::cout << pair.p0.values()[i] << ',' << pair.p0.count(i) << ','
                << pair.p1.count(i) << ',' << pair.p0.total() << '\n';
    return kExitOk;
  }
  nlohmann::json j;
  j["s"] = args.s;
  j["n"] = args.n;
  j["q"] = statanon::RationalString(pair.q);
  j["epsilon"] = statanon::RationalString(pair.epsilon);
  j["gap"] = statanon::RationalString(pair.gap);
  j["kl_nats"] = kl;
  nlohmann::json p0;
  nlohmann::json p1;
  p0["values"] = pair.p0.values();
  p1["values"] = pair.p1.values();
  p0["counts"] = pair.p0.counts();
  p1["counts"] = pair.p1.counts();
  p0["total"] = static_cast<std::uint64_t>(pair.p0.total());
  p1["total"] = static_cast<std::uint64_t>(pair.p1.total());
  j["p0"] = p0;
  j["p1"] = p1;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statanon: statistical k-anonymity analysis and simulation"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Exposure and bound curves for a table");
  analyze->add_option("--input", analyze_args.input, "CSV input path")->required();
  analyze->add_option("--schema", analyze_args.schema, "Schema JSON path")->required();
  analyze->add_option("--columns", analyze_args.columns, "Comma-separated column subset");
  analyze->add_option("--out-dir", analyze_args.out_dir, "Output directory")->required();
  analyze->add_option("--t-grid", analyze_args.t_grid, "Explicit comma-separated t grid");
  analyze->add_option("--grid-size", analyze_args.grid_size, "Log-grid size (default 200)");
  analyze->add_option("--format", analyze_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Run the two-round release protocol");
  simulate->add_option("--config", simulate_args.config, "Config JSON path")->required();
  simulate->add_option("--out-dir", simulate_args.out_dir, "Output directory")->required();
  simulate->add_option("--trials", simulate_args.trials, "Batch size (default 1)");
  std::uint64_t simulate_seed = 0;
  auto* seed_opt = simulate->add_option("--seed", simulate_seed, "Override config seed");

  Fig3Args fig3_args;
  auto* fig3 = app.add_subcommand("fig3", "Estimator comparison sweep over k");
  fig3->add_option("--trials", fig3_args.trials, "Replicates per k (default 1000)");
  fig3->add_option("--n-users", fig3_args.n_users, "Users per replicate (default 128)");
  fig3->add_option("--dist", fig3_args.dist, "uniform:m or comma probabilities");
  fig3->add_option("--k-grid", fig3_args.k_grid, "Explicit comma-separated k grid");
  fig3->add_option("--k-min", fig3_args.k_min, "Grid start (default 2)");
  fig3->add_option("--k-max", fig3_args.k_max, "Grid end (default 64)");
  fig3->add_option("--seed", fig3_args.seed, "Base seed");
  fig3->add_option("--out-dir", fig3_args.out_dir, "Output directory")->required();

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Direct composition-certificate queries");
  bounds->add_option("--input", bounds_args.input, "CSV input path")->required();
  bounds->add_option("--schema", bounds_args.schema, "Schema JSON path")->required();
  bounds->add_option("--columns", bounds_args.columns, "Comma-separated column subset");
  bounds->add_option("--t", bounds_args.t, "Target threshold (rational or decimal)");
  bounds->add_option("-k,--k", bounds_args.k, "Target multiplicity (threshold k/n)");
  bounds->add_option("--rule", bounds_args.rule, "best, support, or general")
      ->check(CLI::IsMember({"best", "support", "general"}));
  bounds->add_option("--c", bounds_args.c, "General-rule constant");
  bounds->add_option("--thresholds", bounds_args.thresholds,
                     "Per-column thresholds (comma-separated)");
  bounds->add_option("--j-star", bounds_args.j_star, "Support-rule excluded column");
  bounds->add_option("--format", bounds_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  LeCamArgs lecam_args;
  auto* lecam = app.add_subcommand("lecam", "Emit the two-point estimation hard pair");
  lecam->add_option("--s", lecam_args.s, "Anonymity parameter s >= 2")->required();
  lecam->add_option("--n", lecam_args.n, "Scale parameter n >= 1")->required();
  lecam->add_option("--format", lecam_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return RunAnalyze(analyze_args);
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) simulate_args.seed = simulate_seed;
      return RunSimulate(simulate_args);
    }
    if (fig3->parsed()) return RunFig3(fig3_args);
    if (bounds->parsed()) return RunBounds(bounds_args);
    if (lecam->parsed()) return RunLeCam(lecam_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
