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

#ifndef STATANON_PROTOCOL_HPP_
#define STATANON_PROTOCOL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "statanon/binomial.hpp"
#include "statanon/composition.hpp"
#include "statanon/distribution.hpp"
#include "statanon/entropy.hpp"
#include "statanon/estimation.hpp"
#include "statanon/exposure.hpp"
#include "statanon/random.hpp"

namespace statanon {

using Bytes = std::vector<std::uint8_t>;

struct KeyPair {
  Bytes public_part;
  Bytes private_part;
};

// Pluggable encryption primitive. The simulation's confidentiality claims
// are structural (who can decode what), not cryptographic; implementations
// only need the round-trip identity and per-message randomization.
class CipherScheme {
 public:
  virtual ~CipherScheme() = default;
  virtual KeyPair KeyGen(Rng& rng) const = 0;
  virtual Bytes Encrypt(const Bytes& public_key, const Bytes& plaintext,
                        Rng& rng) const = 0;
  virtual Bytes Decrypt(const Bytes& private_key, const Bytes& ciphertext) const = 0;
};

// Deterministic keyed test cipher: a splitmix64 keystream keyed by
// key ⊕ nonce, with the 16-byte nonce prepended. Distinct nonces make equal
// plaintexts encrypt differently; not secure, and not meant to be.
class XorStreamCipher : public CipherScheme {
 public:
  static constexpr std::size_t kNonceLen = 16;

  KeyPair KeyGen(Rng& rng) const override {
    Bytes key = rng.NextBytes(32);
    return KeyPair{key, key};  // symmetric test cipher: both tokens equal
  }

  Bytes Encrypt(const Bytes& public_key, const Bytes& plaintext, Rng& rng) const override {
    Bytes out = rng.NextBytes(kNonceLen);
    out.reserve(kNonceLen + plaintext.size());
    ApplyStream(public_key, out, plaintext, &out);
    return out;
  }

  Bytes Decrypt(const Bytes& private_key, const Bytes& ciphertext) const override {
    if (ciphertext.size() < kNonceLen)
      throw std::runtime_error("XorStreamCipher: malformed ciphertext");
    const Bytes nonce(ciphertext.begin(), ciphertext.begin() + kNonceLen);
    const Bytes body(ciphertext.begin() + kNonceLen, ciphertext.end());
    Bytes out;
    ApplyStream(private_key, nonce, body, &out);
    return out;
  }

 private:
  static void ApplyStream(const Bytes& key, const Bytes& nonce, const Bytes& in,
                          Bytes* out) {
    Bytes seed_material = key;
    seed_material.insert(seed_material.end(), nonce.begin(), nonce.end());
    Rng stream(Fnv1a64(seed_material.data(), seed_material.size()));
    const std::size_t start = out->size();
    out->resize(start + in.size());
    Bytes pad = stream.NextBytes(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) (*out)[start + i] = in[i] ^ pad[i];
  }
};

// One wire event. Payloads are kept verbatim so tests can assert visibility
// and conservation; exports reduce them to digests.
struct TranscriptEntry {
  std::string party;
  std::string direction;  // "send" or "recv"
  int hop = 0;            // 0: users→shuffler, 1: shuffler→curator/analyst
  Bytes payload;
};

struct ProtocolTranscript {
  std::vector<TranscriptEntry> entries;
  std::vector<std::size_t> permutation;  // audit record of the shuffle
  std::uint64_t seed = 0;
};

namespace internal {

// Substream tags: every consumer of randomness derives its own stream so the
// message-level randomness is reproducible and order-independent.
inline constexpr std::uint64_t kCuratorKeyStream = 101;
inline constexpr std::uint64_t kShufflerKeyStream = 102;
inline constexpr std::uint64_t kAnalystKeyStream = 201;
inline constexpr std::uint64_t kRoundOneUserStream = 110;
inline constexpr std::uint64_t kRoundOneShuffleStream = 120;
inline constexpr std::uint64_t kRoundTwoUserStream = 210;
inline constexpr std::uint64_t kRoundTwoShuffleStream = 220;
inline constexpr std::uint64_t kCohortOneStream = 301;
inline constexpr std::uint64_t kCohortTwoStream = 302;

inline constexpr std::size_t kSaltLen = 16;

inline void CheckToken(const std::string& token, const char* what) {
  for (const char ch : token) {
    if (ch == '=' || ch == ';' || ch == '|' || ch == '\n')
      throw std::invalid_argument(std::string("protocol: ") + what +
                                  " contains a reserved delimiter: " + token);
  }
}

inline Bytes ToBytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

inline std::string BodyOf(const Bytes& plaintext) {
  if (plaintext.size() < kSaltLen + 1 ||
      plaintext[plaintext.size() - kSaltLen - 1] != static_cast<std::uint8_t>('|'))
    throw std::runtime_error("protocol: plaintext missing the salt suffix");
  return std::string(plaintext.begin(),
                     plaintext.end() - static_cast<std::ptrdiff_t>(kSaltLen) - 1);
}

inline Bytes Salted(const std::string& body, Rng& rng) {
  Bytes out = ToBytes(body);
  out.push_back(static_cast<std::uint8_t>('|'));
  const Bytes salt = rng.NextBytes(kSaltLen);
  out.insert(out.end(), salt.begin(), salt.end());
  return out;
}

inline std::pair<std::string, std::string> ParseFeatureBody(const std::string& body) {
  const auto eq = body.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("protocol: feature message lacks '='");
  return {body.substr(0, eq), body.substr(eq + 1)};
}

}  // namespace internal

struct RoundOneResult {
  std::vector<DiscreteDistribution> tallies;  // per column, original order
  ProtocolTranscript transcript;
  std::vector<Bytes> curator_plaintexts;  // post-decryption, received order
  KeyPair curator_keys;
  KeyPair shuffler_keys;
};

// Round one: every user sends one double-encrypted salted message per
// feature; the shuffler permutes the n·d pool and peels its layer; the
// curator peels the inner layer, strips salts, and tallies each feature.
// The tallies equal the per-column empirical distributions exactly.
inline RoundOneResult RunRoundOne(const CategoricalTable& table, std::uint64_t seed,
                                  const CipherScheme& cipher) {
  if (table.n_rows() == 0 || table.n_cols() == 0)
    throw std::invalid_argument("RunRoundOne: empty table");
  RoundOneResult result;
  result.transcript.seed = seed;

  Rng curator_rng = Rng::Substream(seed, internal::kCuratorKeyStream);
  Rng shuffler_rng = Rng::Substream(seed, internal::kShufflerKeyStream);
  result.curator_keys = cipher.KeyGen(curator_rng);
  result.shuffler_keys = cipher.KeyGen(shuffler_rng);

  Rng user_rng = Rng::Substream(seed, internal::kRoundOneUserStream);
  const std::size_t n = table.n_rows();
  const std::size_t d = table.n_cols();
  std::vector<Bytes> pool;  // outer ciphertexts, user-major order
  pool.reserve(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const std::string& id = table.columns()[c].id;
      const std::string& value = table.cell(r, c);
      internal::CheckToken(id, "feature id");
      internal::CheckToken(value, "value");
      const Bytes inner_plain = internal::Salted(id + "=" + value, user_rng);
      const Bytes inner = cipher.Encrypt(result.curator_keys.public_part, inner_plain, user_rng);
      const Bytes outer = cipher.Encrypt(result.shuffler_keys.public_part, inner, user_rng);
      result.transcript.entries.push_back(
          {"user" + std::to_string(r), "send", 0, outer});
      pool.push_back(outer);
    }
  }
  for (const auto& ct : pool)
    result.transcript.entries.push_back({"shuffler", "recv", 0, ct});

  Rng shuffle_rng = Rng::Substream(seed, internal::kRoundOneShuffleStream);
  result.transcript.permutation = shuffle_rng.Permutation(pool.size());

  std::vector<std::map<std::string, std::uint64_t>> tallies(d);
  for (const std::size_t src : result.transcript.permutation) {
    const Bytes inner = cipher.Decrypt(result.shuffler_keys.private_part, pool[src]);
    result.transcript.entries.push_back({"shuffler", "send", 1, inner});
    result.transcript.entries.push_back({"curator", "recv", 1, inner});
    const Bytes plain = cipher.Decrypt(result.curator_keys.private_part, inner);
    result.curator_plaintexts.push_back(plain);
    const auto [id, value] = internal::ParseFeatureBody(internal::BodyOf(plain));
    ++tallies[table.ColumnIndex(id)][value];
  }

  for (std::size_t c = 0; c < d; ++c) {
    std::vector<std::string> values;
    std::vector<std::uint64_t> counts;
    for (const auto& [v, cnt] : tallies[c]) {
      values.push_back(v);
      counts.push_back(cnt);
    }
    result.tallies.push_back(
        DiscreteDistribution::Empirical(std::move(values), std::move(counts)));
  }
  return result;
}

// Policy the curator applies when choosing the release set.
struct PolicyParams {
  enum class Mode { kFixed, kStatistical };
  Mode mode = Mode::kFixed;
  std::int64_t target_k = 0;     // used when target_t is unset
  std::optional<Rational> target_t;
  double budget = 1.0;           // Q_max
  double delta = 0.05;           // statistical mode failure probability
  std::vector<std::string> utility_order;  // empty: descending marginal entropy
};

// Statistical-setting certificate: plug-in statistical exposure of the
// product-of-marginals estimate, plus the error-bound constant at the
// round-2 cohort size scaled by the Hoeffding slack γ from the round-1
// cohort. The bound is stored unclamped.
struct StatisticalCertificate {
  double estimate = 0.0;
  double gamma = 0.0;
  double slack = 0.0;
  double bound = 0.0;
  std::int64_t k = 0;
  std::int64_t n_round1 = 0;
  std::int64_t n_round2 = 0;
  std::size_t joint_support = 0;
  double delta = 0.0;

  double ReportedBound() const { return std::min(1.0, bound); }
};

struct ReleaseDecision {
  std::vector<std::size_t> released;        // ascending column indices
  std::vector<std::string> released_ids;
  PolicyParams policy;
  bool has_fixed_cert = false;
  BoundCertificate fixed_cert;
  bool has_stat_cert = false;
  StatisticalCertificate stat_cert;

  // The certified exposure bound, clamped for reporting; 0 for an empty
  // release (nothing released, nothing exposed).
  double CertifiedBound() const {
    if (has_fixed_cert) return fixed_cert.ReportedBound();
    if (has_stat_cert) return stat_cert.ReportedBound();
    return 0.0;
  }
};

namespace internal {

// Product of per-column marginal estimates over the chosen columns: the
// curator never observes joints, so independence is the only available
// joint estimate. Analytic, over joined tuples.
inline DiscreteDistribution ProductDistribution(
    const std::vector<DiscreteDistribution>& tallies,
    const std::vector<std::size_t>& cols) {
  std::vector<std::string> values{""};
  std::vector<double> probs{1.0};
  bool first = true;
  for (const auto c : cols) {
    const auto& t = tallies[c];
    std::vector<std::string> next_values;
    std::vector<double> next_probs;
    next_values.reserve(values.size() * t.size());
    next_probs.reserve(values.size() * t.size());
    if (values.size() * t.size() > 1000000)
      throw std::invalid_argument("ProductDistribution: joint support exceeds 10^6");
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        next_values.push_back(first ? t.values()[j]
                                    : values[i] + kTupleSeparator + t.values()[j]);
        next_probs.push_back(probs[i] * t.prob(j));
      }
    }
    values = std::move(next_values);
    probs = std::move(next_probs);
    first = false;
  }
  // Renormalize the final cell to absorb float drift before validation.
  double sum = 0.0;
  for (const auto p : probs) sum += p;
  if (!probs.empty() && sum > 0.0)
    for (auto& p : probs) p /= sum;
  return DiscreteDistribution::Analytic(std::move(values), std::move(probs));
}

inline Rational FixedTarget(const PolicyParams& policy, std::int64_t n) {
  if (policy.target_t.has_value()) return *policy.target_t;
  if (policy.target_k < 1 || policy.target_k > n)
    throw std::invalid_argument("policy: target k outside [1, n]");
  return Rational(BigInt(policy.target_k), BigInt(n));
}

}  // namespace internal

// Greedy release selection over columns in utility order (descending
// marginal entropy by default): add a column when the certified bound of the
// enlarged set stays within budget. n is the size of the database the
// certificate speaks about (the round-2 cohort in the statistical setting);
// n_round1 is the tally sample size used for the Hoeffding slack.
inline ReleaseDecision SelectReleaseSet(const std::vector<DiscreteDistribution>& tallies,
                                        const std::vector<std::string>& column_ids,
                                        std::int64_t n, const PolicyParams& policy,
                                        std::int64_t n_round1 = 0) {
  if (tallies.size() != column_ids.size())
    throw std::invalid_argument("SelectReleaseSet: tallies/ids size mismatch");
  if (!(policy.budget >= 0.0 && policy.budget <= 1.0))
    throw std::invalid_argument("SelectReleaseSet: budget outside [0,1]");
  ReleaseDecision decision;
  decision.policy = policy;

  std::vector<std::size_t> order;
  if (!policy.utility_order.empty()) {
    for (const auto& id : policy.utility_order) {
      const auto it = std::find(column_ids.begin(), column_ids.end(), id);
      if (it == column_ids.end())
        throw std::invalid_argument("SelectReleaseSet: unknown column in utility order: " + id);
      order.push_back(static_cast<std::size_t>(it - column_ids.begin()));
    }
  } else {
    order.resize(tallies.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> ent(tallies.size());
    for (std::size_t i = 0; i < tallies.size(); ++i) ent[i] = Entropy(tallies[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ent[a] > ent[b]; });
  }

  for (const auto j : order) {
    std::vector<std::size_t> trial = decision.released;
    trial.push_back(j);
    std::sort(trial.begin(), trial.end());
    if (policy.mode == PolicyParams::Mode::kFixed) {
      const Rational target = internal::FixedTarget(policy, n);
      std::vector<MarginalCurve> marginals;
      for (const auto c : trial)
        marginals.push_back({MakeExposureCurve(tallies[c]), tallies[c].size()});
      const BoundCertificate cert = BestBound<Rational>(marginals, target);
      if (ToDouble(cert.ReportedBoundExact()) <= policy.budget + 1e-12) {
        decision.released = trial;
        decision.fixed_cert = cert;
        decision.has_fixed_cert = true;
      }
    } else {
      if (n_round1 < 1)
        throw std::invalid_argument("SelectReleaseSet: statistical mode needs n_round1");
      const std::int64_t k = policy.target_k;
      if (k < 1 || k > n)
        throw std::invalid_argument("SelectReleaseSet: target k outside [1, n]");
      const auto joint = internal::ProductDistribution(tallies, trial);
      std::size_t support = 1;
      for (const auto c : trial) support *= tallies[c].size();
      StatisticalCertificate cert;
      cert.estimate = StatisticalExposure(joint, n, k);
      cert.gamma = std::sqrt(std::log(static_cast<double>(support) / policy.delta) /
                             (2.0 * static_cast<double>(n_round1)));
      cert.slack = StatisticalExposureErrorBound(n, std::max<std::size_t>(2, support),
                                                 cert.gamma);
      cert.bound = cert.estimate + cert.slack;
      cert.k = k;
      cert.n_round1 = n_round1;
      cert.n_round2 = n;
      cert.joint_support = support;
      cert.delta = policy.delta;
      if (cert.ReportedBound() <= policy.budget + 1e-12) {
        decision.released = trial;
        decision.stat_cert = cert;
        decision.has_stat_cert = true;
      }
    }
  }
  for (const auto c : decision.released) decision.released_ids.push_back(column_ids[c]);
  return decision;
}

struct RoundTwoResult {
  CategoricalTable released;
  ProtocolTranscript transcript;
  std::vector<Bytes> analyst_plaintexts;  // post-decryption, received order
  KeyPair analyst_keys;
  KeyPair shuffler_keys;
};

// Round two: every user sends one salted, double-encrypted message encoding
// their row restricted to the released set; the shuffler permutes and peels;
// the analyst decrypts. The released table carries the rows in shuffler
// order, so the analyst's view is unlinkable to user indices.
inline RoundTwoResult RunRoundTwo(const CategoricalTable& table,
                                  const ReleaseDecision& decision, std::uint64_t seed,
                                  const CipherScheme& cipher) {
  if (table.n_rows() == 0) throw std::invalid_argument("RunRoundTwo: empty table");
  for (const auto c : decision.released)
    if (c >= table.n_cols())
      throw std::invalid_argument("RunRoundTwo: released column out of range");
  RoundTwoResult result;
  result.transcript.seed = seed;

  Rng analyst_rng = Rng::Substream(seed, internal::kAnalystKeyStream);
  Rng shuffler_rng = Rng::Substream(seed, internal::kShufflerKeyStream);
  result.analyst_keys = cipher.KeyGen(analyst_rng);
  result.shuffler_keys = cipher.KeyGen(shuffler_rng);

  Rng user_rng = Rng::Substream(seed, internal::kRoundTwoUserStream);
  const std::size_t n = table.n_rows();
  std::vector<Bytes> pool;
  pool.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::string body;
    bool first = true;
    for (const auto c : decision.released) {
      const std::string& id = table.columns()[c].id;
      const std::string& value = table.cell(r, c);
      internal::CheckToken(id, "feature id");
      internal::CheckToken(value, "value");
      if (!first) body.push_back(';');
      body += id + "=" + value;
      first = false;
    }
    const Bytes inner_plain = internal::Salted(body, user_rng);
    const Bytes inner = cipher.Encrypt(result.analyst_keys.public_part, inner_plain, user_rng);
    const Bytes outer = cipher.Encrypt(result.shuffler_keys.public_part, inner, user_rng);
    result.transcript.entries.push_back({"user" + std::to_string(r), "send", 0, outer});
    pool.push_back(outer);
  }
  for (const auto& ct : pool)
    result.transcript.entries.push_back({"shuffler", "recv", 0, ct});

  Rng shuffle_rng = Rng::Substream(seed, internal::kRoundTwoShuffleStream);
  result.transcript.permutation = shuffle_rng.Permutation(pool.size());

  std::vector<std::string> cells;
  cells.reserve(n * decision.released.size());
  for (const std::size_t src : result.transcript.permutation) {
    const Bytes inner = cipher.Decrypt(result.shuffler_keys.private_part, pool[src]);
    result.transcript.entries.push_back({"shuffler", "send", 1, inner});
    result.transcript.entries.push_back({"analyst", "recv", 1, inner});
    const Bytes plain = cipher.Decrypt(result.analyst_keys.private_part, inner);
    result.analyst_plaintexts.push_back(plain);
    const std::string body = internal::BodyOf(plain);
    if (decision.released.empty()) {
      if (!body.empty()) throw std::runtime_error("RunRoundTwo: unexpected payload body");
      continue;
    }
    std::size_t start = 0;
    std::size_t col_i = 0;
    while (true) {
      const auto sep = body.find(';', start);
      const std::string part =
          sep == std::string::npos ? body.substr(start) : body.substr(start, sep - start);
      const auto [id, value] = internal::ParseFeatureBody(part);
      if (col_i >= decision.released.size() ||
          id != table.columns()[decision.released[col_i]].id)
        throw std::runtime_error("RunRoundTwo: released row has unexpected columns");
      cells.push_back(value);
      ++col_i;
      if (sep == std::string::npos) break;
      start = sep + 1;
    }
    if (col_i != decision.released.size())
      throw std::runtime_error("RunRoundTwo: released row has missing columns");
  }

  std::vector<TableColumn> columns;
  for (const auto c : decision.released) columns.push_back(table.columns()[c]);
  result.released = CategoricalTable::CreateReleased(std::move(columns), n, std::move(cells));
  return result;
}

// Full protocol configuration: a concrete table (fixed setting) or a joint
// distribution with two cohort sizes (statistical setting).
struct ProtocolConfig {
  enum class Setting { kFixed, kStatistical };
  Setting setting = Setting::kFixed;
  std::uint64_t seed = 0;
  PolicyParams policy;
  std::optional<CategoricalTable> table;            // fixed setting
  std::optional<DiscreteDistribution> distribution; // statistical setting (joint tuples)
  std::vector<std::string> dist_columns;            // tuple component column ids
  std::int64_t cohort1 = 0;
  std::int64_t cohort2 = 0;
};

struct ProtocolOutcome {
  CategoricalTable released;
  ReleaseDecision decision;
  ProtocolTranscript round1;
  ProtocolTranscript round2;
  std::vector<DiscreteDistribution> tallies;
  Rational realized_exposure_r = 0;  // exact, on the released table
  double realized_exposure = 0.0;
  double certified_bound = 0.0;
  bool sound = true;
};

namespace internal {

// i.i.d. cohort sampled from a joint tuple distribution.
inline CategoricalTable SampleCohort(const DiscreteDistribution& dist,
                                     const std::vector<std::string>& column_ids,
                                     std::int64_t n_rows, Rng& rng) {
  if (n_rows < 1) throw std::invalid_argument("SampleCohort: cohort size < 1");
  if (column_ids.empty()) throw std::invalid_argument("SampleCohort: no columns");
  std::vector<std::vector<std::string>> tuples;
  tuples.reserve(dist.size());
  for (const auto& v : dist.values()) {
    tuples.push_back(SplitTuple(v));
    if (tuples.back().size() != column_ids.size())
      throw std::invalid_argument("SampleCohort: tuple arity mismatch");
  }
  std::vector<TableColumn> columns;
  for (std::size_t c = 0; c < column_ids.size(); ++c) {
    std::vector<std::string> alphabet;
    for (const auto& tup : tuples)
      if (tup[c] != Redacted() &&
          std::find(alphabet.begin(), alphabet.end(), tup[c]) == alphabet.end())
        alphabet.push_back(tup[c]);
    std::sort(alphabet.begin(), alphabet.end());
    columns.push_back({column_ids[c], std::move(alphabet)});
  }
  std::vector<double> cum(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist.prob(i);
    cum[i] = acc;
  }
  cum[dist.size() - 1] = 1.0;
  std::vector<std::string> cells;
  cells.reserve(static_cast<std::size_t>(n_rows) * column_ids.size());
  for (std::int64_t r = 0; r < n_rows; ++r) {
    const double u = rng.NextDouble();
    const std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u,
                         [](double cv, double uv) { return cv <= uv; }) -
        cum.begin());
    for (const auto& part : tuples[std::min(idx, tuples.size() - 1)])
      cells.push_back(part);
  }
  return CategoricalTable::Create(std::move(columns), std::move(cells));
}

// Exact exposure of the released joint at the policy target. An empty
// release exposes nothing.
inline Rational RealizedExposure(const CategoricalTable& released,
                                 const PolicyParams& policy) {
  if (released.n_cols() == 0) return Rational(0);
  const Rational target = FixedTarget(policy, static_cast<std::int64_t>(released.n_rows()));
  const auto joint = EmpiricalDistribution(released, AllColumns(released));
  return Exposure(joint, target);
}

}  // namespace internal

// Composes round one, release selection, and round two; computes the
// realized exposure of the released table at the policy target and checks it
// against the certificate. The statistical setting draws two disjoint i.i.d.
// cohorts from the configured distribution.
inline ProtocolOutcome RunProtocol(const ProtocolConfig& config,
                                   const CipherScheme& cipher) {
  std::optional<CategoricalTable> round1_table;
  std::optional<CategoricalTable> round2_table;
  if (config.setting == ProtocolConfig::Setting::kFixed) {
    if (!config.table.has_value())
      throw std::invalid_argument("RunProtocol: fixed setting requires a table");
    round1_table = config.table;
    round2_table = config.table;
  } else {
    if (!config.distribution.has_value())
      throw std::invalid_argument("RunProtocol: statistical setting requires a distribution");
    if (config.cohort1 < 1 || config.cohort2 < 1)
      throw std::invalid_argument("RunProtocol: statistical setting requires cohort sizes");
    Rng rng1 = Rng::Substream(config.seed, internal::kCohortOneStream);
    Rng rng2 = Rng::Substream(config.seed, internal::kCohortTwoStream);
    round1_table = internal::SampleCohort(*config.distribution, config.dist_columns,
                                          config.cohort1, rng1);
    round2_table = internal::SampleCohort(*config.distribution, config.dist_columns,
                                          config.cohort2, rng2);
  }

  ProtocolOutcome outcome;
  auto r1 = RunRoundOne(*round1_table, config.seed, cipher);
  std::vector<std::string> ids;
  for (const auto& col : round1_table->columns()) ids.push_back(col.id);

  const auto n2 = static_cast<std::int64_t>(round2_table->n_rows());
  outcome.decision =
      SelectReleaseSet(r1.tallies, ids, n2, config.policy,
                       static_cast<std::int64_t>(round1_table->n_rows()));

  auto r2 = RunRoundTwo(*round2_table, outcome.decision, config.seed, cipher);

  outcome.tallies = std::move(r1.tallies);
  outcome.round1 = std::move(r1.transcript);
  outcome.round2 = std::move(r2.transcript);
  outcome.released = std::move(r2.released);
  outcome.realized_exposure_r =
      internal::RealizedExposure(outcome.released, config.policy);
  outcome.realized_exposure = ToDouble(outcome.realized_exposure_r);
  outcome.certified_bound = outcome.decision.CertifiedBound();

  if (outcome.decision.has_fixed_cert) {
    outcome.sound = outcome.realized_exposure_r <=
                    outcome.decision.fixed_cert.ReportedBoundExact();
  } else if (outcome.decision.has_stat_cert) {
    outcome.sound =
        outcome.realized_exposure <= outcome.decision.stat_cert.ReportedBound() + 1e-12;
  } else {
    outcome.sound = true;  // nothing released, nothing certified
  }
  return outcome;
}

}  // namespace statanon

#endif  // STATANON_PROTOCOL_HPP_
