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

#ifndef STATANON_RATIONAL_HPP_
#define STATANON_RATIONAL_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace statanon {

// Exact arithmetic backs every strict-inequality threshold comparison; the
// anonymity semantics hinge on ties being excluded, which floating point
// cannot promise.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational MakeRational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("MakeRational: zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline double ToDouble(const Rational& r) { return r.template convert_to<double>(); }

// "num/den" with both parts in lowest terms; "num" alone when den == 1.
inline std::string RationalString(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Strict base-10 integer parse. The bignum string constructor applies C++
// literal prefix rules ("025" is octal, "09" is ill-formed), which is wrong
// for user-facing decimal text.
inline BigInt ParseDecimalInt(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size())
    throw std::invalid_argument("ParseRational: no digits in: " + text);
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9')
      throw std::invalid_argument("ParseRational: not a number: " + text);
    value = value * 10 + (text[i] - '0');
  }
  return negative ? BigInt(-value) : value;
}

// Parses "a/b", "a" (integer) or a plain decimal like "0.25" into an exact
// rational. Decimal parsing is exact (digits over a power of ten).
inline Rational ParseRational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("ParseRational: empty input");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt num = ParseDecimalInt(text.substr(0, slash));
    const BigInt den = ParseDecimalInt(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("ParseRational: zero denominator");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(ParseDecimalInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0) return Rational(ParseDecimalInt(digits));
  BigInt den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  return Rational(ParseDecimalInt(digits), den);
}

}  // namespace statanon

#endif  // STATANON_RATIONAL_HPP_
