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

#ifndef STATANON_RANDOM_HPP_
#define STATANON_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace statanon {

// Deterministic splitmix64-based generator. Every simulation in this library
// draws from this generator (never from std::random_device or unseeded state)
// so that identical seeds give identical results on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(Mix(seed ^ kInit)) {}

  // Independent substream i of a root seed. Substreams derived from the same
  // (seed, i) are identical; distinct i give statistically independent
  // streams. Used so parallelizable loops are schedule-independent.
  static Rng Substream(std::uint64_t seed, std::uint64_t i) {
    return Rng(Mix(seed ^ kInit) + (i + 1) * kGamma);
  }

  std::uint64_t NextU64() {
    state_ += kGamma;
    return Mix(state_);
  }

  // Uniform on [0,1) with 53 random bits.
  double NextDouble() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], rejection-sampled so all values are
  // equally likely.
  std::uint64_t NextInt(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::NextInt: lo > hi");
    const std::uint64_t span = hi - lo + 1;  // wraps to 0 for the full range
    if (span == 0) return NextU64();
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t x;
    do {
      x = NextU64();
    } while (x >= limit);
    return lo + x % span;
  }

  std::vector<std::uint8_t> NextBytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 8 == 0) buf_ = NextU64();
      out[i] = static_cast<std::uint8_t>(buf_ >> (8 * (i % 8)));
    }
    return out;
  }

  // Standard exponential via inversion; argument of log is in (0,1].
  double NextExponential() { return -std::log(1.0 - NextDouble()); }

  // Symmetric Dirichlet(1) sample: uniform on the simplex.
  std::vector<double> NextSimplex(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("Rng::NextSimplex: dim == 0");
    std::vector<double> x(dim);
    double sum = 0.0;
    for (auto& v : x) {
      v = NextExponential();
      sum += v;
    }
    for (auto& v : x) v /= sum;
    return x;
  }

  // Fisher-Yates; identical element order in gives identical order out for a
  // fixed generator state.
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(NextInt(0, i - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // A uniformly random permutation of {0,...,n-1}.
  std::vector<std::size_t> Permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    Shuffle(p);
    return p;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kInit = 0xA076'1D64'78BD'642Full;

  static std::uint64_t Mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t buf_ = 0;
};

// Stable 64-bit content digest (FNV-1a) used for transcript exports.
inline std::uint64_t Fnv1a64(const std::uint8_t* data, std::size_t len) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::string DigestHex(const std::vector<std::uint8_t>& data) {
  static const char* kHex = "0123456789abcdef";
  std::uint64_t h = Fnv1a64(data.data(), data.size());
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return s;
}

}  // namespace statanon

#endif  // STATANON_RANDOM_HPP_
