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

#include <stdexcept>
#include <string>

namespace branchlab {

/// Failure categories raised by the library. The CLI maps each category
/// onto a fixed process exit code (see `exit_code_for`).
enum class ErrorKind {
  parse,                     // malformed scenario text or rational literal
  schema,                    // missing, extra, or duplicate scenario field
  not_normalized,            // probability weights do not sum to exactly 1
  negative_weight,           // a probability weight below zero
  empty_distribution,        // no outcomes at all
  cap_exceeded,              // enumeration or search budget exceeded
  dimension_mismatch,        // outcome counts of different arity combined
  empty_assignment,          // a validity assignment with no valid branch
  same_distribution,         // joint certificate requested for equal inputs
  malformed_certificate,     // structurally inconsistent certificate
  undefined_on_basis,        // rewrite rule missing a basis term it was applied to
  index_out_of_range,        // outcome index outside [1, n]
  expected_count_too_small,  // chi-square applicability floor violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorKind::parse, m) {}
};
struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error(ErrorKind::schema, m) {}
};
struct NotNormalizedError : Error {
  explicit NotNormalizedError(const std::string& m)
      : Error(ErrorKind::not_normalized, m) {}
};
struct NegativeWeightError : Error {
  explicit NegativeWeightError(const std::string& m)
      : Error(ErrorKind::negative_weight, m) {}
};
struct EmptyDistributionError : Error {
  explicit EmptyDistributionError(const std::string& m)
      : Error(ErrorKind::empty_distribution, m) {}
};
struct CapExceededError : Error {
  explicit CapExceededError(const std::string& m)
      : Error(ErrorKind::cap_exceeded, m) {}
};
struct DimensionMismatchError : Error {
  explicit DimensionMismatchError(const std::string& m)
      : Error(ErrorKind::dimension_mismatch, m) {}
};
struct EmptyAssignmentError : Error {
  explicit EmptyAssignmentError(const std::string& m)
      : Error(ErrorKind::empty_assignment, m) {}
};
struct SameDistributionError : Error {
  explicit SameDistributionError(const std::string& m)
      : Error(ErrorKind::same_distribution, m) {}
};
struct MalformedCertificateError : Error {
  explicit MalformedCertificateError(const std::string& m)
      : Error(ErrorKind::malformed_certificate, m) {}
};
struct UndefinedOnBasisError : Error {
  explicit UndefinedOnBasisError(const std::string& m)
      : Error(ErrorKind::undefined_on_basis, m) {}
};
struct IndexOutOfRangeError : Error {
  explicit IndexOutOfRangeError(const std::string& m)
      : Error(ErrorKind::index_out_of_range, m) {}
};
struct ExpectedCountTooSmallError : Error {
  explicit ExpectedCountTooSmallError(const std::string& m)
      : Error(ErrorKind::expected_count_too_small, m) {}
};

/// CLI exit codes: 2 input parse/validation failure, 3 cap exceeded,
/// 4 operation precondition violated. An infeasible verdict is a result,
/// not an error, and exits 0.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::schema:
    case ErrorKind::not_normalized:
    case ErrorKind::negative_weight:
    case ErrorKind::empty_distribution:
      return 2;
    case ErrorKind::cap_exceeded:
      return 3;
    default:
      return 4;
  }
}

}  // namespace branchlab
