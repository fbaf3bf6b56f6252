// Copyright 2026 The branchlab authors
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

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "branchlab/errors.hpp"

namespace branchlab {

// All core results are exact: arbitrary-precision integers and rationals,
// no floating point anywhere on the main path. cpp_rational keeps values
// canonical (numerator and denominator coprime, denominator positive).
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// base^exponent by exponentiating numerator and denominator separately.
/// 0^0 is 1 (empty product).
inline Rational pow_rational(const Rational& base, std::uint64_t exponent) {
  if (exponent == 0) return Rational(1);
  if (base.is_zero()) return Rational(0);
  const unsigned e = static_cast<unsigned>(exponent);
  return Rational(boost::multiprecision::pow(numerator(base), e),
                  boost::multiprecision::pow(denominator(base), e));
}

/// C(n, k), exactly; 0 outside the Pascal triangle.
inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt result(1);
  for (std::int64_t i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;  // exact at every step: result is C(n-k+i, i)
  }
  return result;
}

/// Canonical "p/q" form, q >= 1, p carries the sign. Integers render as "p/1"
/// so every rational field has one fixed shape.
inline std::string to_fraction_string(const Rational& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

/// Parses "p" or "p/q" with an optional leading sign on p. Throws ParseError
/// on anything else (including a zero or signed denominator).
inline Rational parse_rational(std::string_view text) {
  const auto fail = [&](const char* why) -> Rational {
    throw ParseError("bad rational '" + std::string(text) + "': " + why);
  };
  if (text.empty()) return fail("empty");
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  const std::size_t digits_begin = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == digits_begin) return fail("missing numerator digits");
  BigInt num(std::string(text.substr(digits_begin, pos - digits_begin)));
  if (negative) num = -num;
  if (pos == text.size()) return Rational(num);
  if (text[pos] != '/') return fail("unexpected character");
  ++pos;
  std::size_t den_begin = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == den_begin || pos != text.size()) return fail("bad denominator");
  BigInt den(std::string(text.substr(den_begin)));
  if (den.is_zero()) return fail("zero denominator");
  return Rational(num, den);
}

inline double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace branchlab
