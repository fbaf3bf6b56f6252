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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

// A symbolic engine for labeled product kets under deterministic basis
// rewrites. States carry exact rational squared-magnitude weights; phases
// never enter any quantity computed here, so amplitudes are not stored.

enum class FactorRole { system, detector, observer };

inline std::string to_string(FactorRole role) {
  switch (role) {
    case FactorRole::system: return "system";
    case FactorRole::detector: return "detector";
    default: return "observer";
  }
}

struct Label {
  FactorRole role;
  std::string tag;

  auto operator<=>(const Label&) const = default;
};

/// One basis ket of the product space: an ordered label per factor.
using BasisProduct = std::vector<Label>;

inline Label system_label(int outcome) {
  return Label{FactorRole::system, "i=" + std::to_string(outcome)};
}

inline Label detector_label(int outcome) {
  return Label{FactorRole::detector, "D:" + std::to_string(outcome)};
}

inline Label observer_ready_label() {
  return Label{FactorRole::observer, "Obs perceives no reading"};
}

/// Observer tags follow one fixed grammar so version number and awareness
/// stay machine-readable:
///   "ver. <i> of the obs. perceives reading <i>"
///   "ver. <i> of the obs. perceives and is aware of reading <i>"
inline Label observer_version_label(int outcome, bool aware) {
  const std::string i = std::to_string(outcome);
  return Label{FactorRole::observer,
               aware ? "ver. " + i + " of the obs. perceives and is aware of reading " + i
                     : "ver. " + i + " of the obs. perceives reading " + i};
}

inline std::optional<int> observer_version(const Label& label) {
  if (label.role != FactorRole::observer) return std::nullopt;
  constexpr std::string_view prefix = "ver. ";
  if (label.tag.rfind(prefix, 0) != 0) return std::nullopt;
  std::size_t pos = prefix.size();
  int value = 0;
  bool any = false;
  while (pos < label.tag.size() && std::isdigit(static_cast<unsigned char>(label.tag[pos]))) {
    value = value * 10 + (label.tag[pos] - '0');
    ++pos;
    any = true;
  }
  if (!any) return std::nullopt;
  return value;
}

inline bool observer_is_aware(const Label& label) {
  return label.role == FactorRole::observer &&
         label.tag.find(" and is aware of reading ") != std::string::npos;
}

/// Sparse linear combination of basis products with exact rational weights.
/// Zero-weight terms are never stored, and every term must share the arity
/// and factor-role order of the first one inserted.
class TensorState {
 public:
  TensorState() = default;

  void add_term(BasisProduct basis, const Rational& weight) {
    require_shape(basis);
    if (weight.is_zero()) {
      return;
    }
    auto [it, inserted] = terms_.try_emplace(std::move(basis), weight);
    if (!inserted) {
      it->second += weight;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const std::map<BasisProduct, Rational>& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }

  /// Sum of the stored squared-magnitude weights; exactly 1 for a
  /// normalized state.
  Rational weight_sum() const {
    Rational sum(0);
    for (const auto& [basis, weight] : terms_) sum += weight;
    return sum;
  }

  friend bool operator==(const TensorState&, const TensorState&) = default;

 private:
  void require_shape(const BasisProduct& basis) const {
    if (basis.empty()) throw std::invalid_argument("basis product with no factors");
    if (terms_.empty()) return;
    const BasisProduct& reference = terms_.begin()->first;
    if (basis.size() != reference.size()) {
      throw std::invalid_argument("basis product arity mismatch");
    }
    for (std::size_t f = 0; f < basis.size(); ++f) {
      if (basis[f].role != reference[f].role) {
        throw std::invalid_argument("basis product role-order mismatch");
      }
    }
  }

  std::map<BasisProduct, Rational> terms_;
};

inline TensorState combined(const TensorState& left, const Rational& left_weight,
                            const TensorState& right, const Rational& right_weight) {
  TensorState out;
  for (const auto& [basis, weight] : left.terms()) {
    out.add_term(basis, left_weight * weight);
  }
  for (const auto& [basis, weight] : right.terms()) {
    out.add_term(basis, right_weight * weight);
  }
  return out;
}

/// Deterministic rewrite of basis products: the action of the interaction
/// step on each basis ket. Construction enforces injectivity, so two
/// distinct inputs can never land on one output and branches cannot merge.
class BranchingRule {
 public:
  void add_mapping(BasisProduct from, BasisProduct to) {
    if (images_.contains(to)) {
      throw std::invalid_argument("rule image already taken: not injective");
    }
    auto [it, inserted] = domain_.try_emplace(std::move(from), to);
    if (!inserted) {
      throw std::invalid_argument("rule already defined on this basis product");
    }
    images_.insert(std::move(to));
  }

  bool defined_on(const BasisProduct& basis) const {
    return domain_.contains(basis);
  }

  const BasisProduct& image_of(const BasisProduct& basis) const {
    const auto it = domain_.find(basis);
    if (it == domain_.end()) {
      throw UndefinedOnBasisError("rule has no entry for a basis product of the state");
    }
    return it->second;
  }

  const std::map<BasisProduct, BasisProduct>& mappings() const { return domain_; }

 private:
  std::map<BasisProduct, BasisProduct> domain_;
  std::set<BasisProduct> images_;
};

/// Rewrites every term independently, weights carried unchanged. Linearity
/// is the definition of the operation, not a property to switch on.
inline TensorState apply_rule(const BranchingRule& rule, const TensorState& state) {
  TensorState out;
  for (const auto& [basis, weight] : state.terms()) {
    out.add_term(rule.image_of(basis), weight);
  }
  return out;
}

/// apply_rule(w1 s1 + w2 s2) == w1 apply_rule(s1) + w2 apply_rule(s2),
/// exactly. Any false return is an implementation defect, never physics.
inline bool linearity_check(const BranchingRule& rule, const TensorState& left,
                            const TensorState& right, const Rational& left_weight,
                            const Rational& right_weight) {
  const TensorState mixed = apply_rule(rule, combined(left, left_weight, right, right_weight));
  const TensorState split =
      combined(apply_rule(rule, left), left_weight, apply_rule(rule, right), right_weight);
  return mixed == split;
}

/// One measurement step: the state after detection but before the observer
/// looks, the look rule, and the post-look state with one observer version
/// per outcome.
struct MeasurementChain {
  TensorState before;
  BranchingRule look;
  TensorState after;
};

/// Builds the chain for a distribution. The before state has every nonzero
/// outcome paired with the not-yet-looking observer; the rule is total on
/// the measurement basis (zero-weight outcomes included); the after state is
/// produced by the rule, so weights are carried unchanged.
inline MeasurementChain build_measurement_chain(const OutcomeDistribution& dist) {
  MeasurementChain chain;
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    const int outcome = j + 1;
    BasisProduct before_basis{system_label(outcome), detector_label(outcome),
                              observer_ready_label()};
    BasisProduct after_basis{system_label(outcome), detector_label(outcome),
                             observer_version_label(outcome, /*aware=*/true)};
    chain.look.add_mapping(before_basis, std::move(after_basis));
    chain.before.add_term(std::move(before_basis), dist.weight(j));
  }
  chain.after = apply_rule(chain.look, chain.before);
  return chain;
}

/// The mechanized form of the equal-validity argument: the post-look state
/// derived by the rewrite equals the directly constructed one term for term,
/// and every observer version carries the aware tag.
struct EqualValidityReport {
  MeasurementChain chain;
  TensorState direct_after;
  bool states_match = false;
  int num_versions = 0;
  bool all_versions_aware = false;
  Rational weight_sum;
};

inline EqualValidityReport equal_validity_demonstration(const OutcomeDistribution& dist) {
  EqualValidityReport report;
  report.chain = build_measurement_chain(dist);
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    const int outcome = j + 1;
    report.direct_after.add_term({system_label(outcome), detector_label(outcome),
                                  observer_version_label(outcome, /*aware=*/true)},
                                 dist.weight(j));
  }
  report.states_match = report.chain.after == report.direct_after;
  report.num_versions = static_cast<int>(report.chain.after.num_terms());
  report.all_versions_aware = true;
  for (const auto& [basis, weight] : report.chain.after.terms()) {
    bool term_aware = false;
    for (const Label& label : basis) {
      if (label.role == FactorRole::observer && observer_is_aware(label)) {
        term_aware = true;
      }
    }
    report.all_versions_aware = report.all_versions_aware && term_aware;
  }
  report.weight_sum = report.chain.after.weight_sum();
  return report;
}

}  // namespace branchlab
