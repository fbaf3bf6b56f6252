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

#include <string>
#include <vector>

#include <json.hpp>

#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"
#include "branchlab/validity.hpp"

namespace branchlab {

// Canonical JSON conventions: objects carry sorted keys (the default
// nlohmann object is ordered by key), every exact rational is a "p/q"
// string with p and q coprime and q >= 1, and floating-point values appear
// only under keys suffixed "_float".

inline nlohmann::json rational_to_json(const Rational& value) {
  return to_fraction_string(value);
}

inline Rational rational_from_json(const nlohmann::json& node) {
  if (!node.is_string()) {
    throw ParseError("expected a \"p/q\" string, got " + node.dump());
  }
  return parse_rational(node.get<std::string>());
}

inline nlohmann::json rationals_to_json(const std::vector<Rational>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const Rational& value : values) out.push_back(rational_to_json(value));
  return out;
}

inline std::vector<Rational> rationals_from_json(const nlohmann::json& node) {
  if (!node.is_array()) {
    throw ParseError("expected an array of \"p/q\" strings");
  }
  std::vector<Rational> out;
  out.reserve(node.size());
  for (const auto& item : node) out.push_back(rational_from_json(item));
  return out;
}

inline nlohmann::json certificate_to_json(const InfeasibilityCertificate& cert) {
  nlohmann::json out;
  out["claim"] = cert.claim;
  out["equal_validity_frequency"] = rationals_to_json(cert.equal_validity_freq);
  out["num_outcomes"] = cert.num_outcomes;
  out["num_runs"] = cert.num_runs;
  out["target_a"] = rationals_to_json(cert.target_a);
  out["target_b"] = rationals_to_json(cert.target_b);
  return out;
}

inline InfeasibilityCertificate certificate_from_json(const nlohmann::json& node) {
  try {
    InfeasibilityCertificate cert;
    cert.claim = node.at("claim").get<std::string>();
    cert.equal_validity_freq = rationals_from_json(node.at("equal_validity_frequency"));
    cert.num_outcomes = node.at("num_outcomes").get<int>();
    cert.num_runs = node.at("num_runs").get<std::int64_t>();
    cert.target_a = rationals_from_json(node.at("target_a"));
    cert.target_b = rationals_from_json(node.at("target_b"));
    return cert;
  } catch (const nlohmann::json::exception& error) {
    throw MalformedCertificateError(std::string("bad certificate JSON: ") +
                                    error.what());
  } catch (const ParseError& error) {
    throw MalformedCertificateError(std::string("bad certificate JSON: ") +
                                    error.what());
  }
}

}  // namespace branchlab
