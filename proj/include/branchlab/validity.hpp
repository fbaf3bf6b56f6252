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

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "branchlab/branch_classes.hpp"
#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

/// Average perceived count of each outcome over the valid branches; entries
/// sum to exactly N.
using FrequencyVector = std::vector<Rational>;

/// Marks, per branch class, how many of its sequences count as valid
/// (perception-bearing). Deliberately carries no distribution: validity is a
/// function of the outcome sequence alone, and a sequence-level marking is
/// losslessly compressed to per-class totals because every sequence in a
/// class has the same count vector.
class ValidityAssignment {
 public:
  ValidityAssignment(int n, std::int64_t num_runs,
                     std::vector<BigInt> valid_counts,
                     std::int64_t class_cap = kDefaultClassCap)
      : ensemble_(enumerate_classes(n, num_runs, class_cap)),
        valid_counts_(std::move(valid_counts)) {
    if (valid_counts_.size() != ensemble_.classes.size()) {
      throw DimensionMismatchError(
          "expected " + std::to_string(ensemble_.classes.size()) +
          " per-class counts, got " + std::to_string(valid_counts_.size()));
    }
    for (std::size_t c = 0; c < valid_counts_.size(); ++c) {
      if (valid_counts_[c] < 0 ||
          valid_counts_[c] > class_multiplicity(ensemble_.classes[c])) {
        throw std::invalid_argument(
            "valid count for class " + branchlab::to_string(ensemble_.classes[c]) +
            " outside [0, multiplicity]");
      }
      total_valid_ += valid_counts_[c];
    }
    if (total_valid_.is_zero()) {
      throw EmptyAssignmentError("no branch marked valid");
    }
  }

  /// The marking with every sequence valid: k_class = multiplicity.
  static ValidityAssignment all_sequences_valid(
      int n, std::int64_t num_runs, std::int64_t class_cap = kDefaultClassCap) {
    BranchEnsemble ensemble = enumerate_classes(n, num_runs, class_cap);
    std::vector<BigInt> counts;
    counts.reserve(ensemble.classes.size());
    for (const BranchClass& cls : ensemble.classes) {
      counts.push_back(class_multiplicity(cls));
    }
    return ValidityAssignment(n, num_runs, std::move(counts), class_cap);
  }

  /// k sequences valid in one class, none elsewhere.
  static ValidityAssignment single_class(int n, std::int64_t num_runs,
                                         const BranchClass& cls, BigInt k,
                                         std::int64_t class_cap = kDefaultClassCap) {
    BranchEnsemble ensemble = enumerate_classes(n, num_runs, class_cap);
    std::vector<BigInt> counts(ensemble.classes.size(), BigInt(0));
    for (std::size_t c = 0; c < ensemble.classes.size(); ++c) {
      if (ensemble.classes[c] == cls) {
        counts[c] = std::move(k);
        return ValidityAssignment(n, num_runs, std::move(counts), class_cap);
      }
    }
    throw DimensionMismatchError("class " + branchlab::to_string(cls) +
                                 " does not belong to (n, N)");
  }

  int num_outcomes() const { return ensemble_.num_outcomes; }
  std::int64_t num_runs() const { return ensemble_.num_runs; }
  const std::vector<BranchClass>& classes() const { return ensemble_.classes; }
  const std::vector<BigInt>& valid_counts() const { return valid_counts_; }
  const BigInt& total_valid() const { return total_valid_; }

 private:
  BranchEnsemble ensemble_;
  std::vector<BigInt> valid_counts_;
  BigInt total_valid_{0};
};

/// Per outcome j: (sum_class m_j k_class) / (sum_class k_class), exact.
inline FrequencyVector weighted_average_counts(const ValidityAssignment& assignment) {
  const BigInt& denominator = assignment.total_valid();
  if (denominator.is_zero()) {
    throw EmptyAssignmentError("average over zero valid branches");
  }
  const int n = assignment.num_outcomes();
  std::vector<BigInt> numerators(static_cast<std::size_t>(n), BigInt(0));
  for (std::size_t c = 0; c < assignment.classes().size(); ++c) {
    const BigInt& k = assignment.valid_counts()[c];
    if (k.is_zero()) continue;
    for (int j = 0; j < n; ++j) {
      numerators[static_cast<std::size_t>(j)] +=
          k * assignment.classes()[c].count(j);
    }
  }
  FrequencyVector values;
  values.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    values.emplace_back(numerators[static_cast<std::size_t>(j)], denominator);
  }
  return values;
}

/// The frequency vector of the everything-valid marking: exactly N/n per
/// outcome, for any n and N. No distribution enters anywhere.
inline FrequencyVector equal_validity_frequency(int n, std::int64_t num_runs) {
  if (n < 1 || num_runs < 1) throw std::invalid_argument("need n >= 1 and N >= 1");
  return FrequencyVector(static_cast<std::size_t>(n), Rational(num_runs, n));
}

inline constexpr std::int64_t kDefaultFeasibilityNodeBudget = 20'000'000;
inline constexpr std::int64_t kDefaultAssignmentCap = 1'000'000;

namespace detail {

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  const BigInt r = a % b;
  if (!r.is_zero() && ((r < 0) != (b < 0))) --q;
  return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  const BigInt r = a % b;
  if (!r.is_zero() && ((r < 0) == (b < 0))) ++q;
  return q;
}

/// Integer constraint system for Born feasibility at (dist, N): with q_j =
/// p_j / D over a common denominator D, row j demands
///   sum_c (D m_j(c) - N p_j) k_c = 0.
/// Any k meeting all rows with 0 < sum k makes the validity-weighted average
/// equal N q exactly.
struct BornSystem {
  std::vector<std::vector<BigInt>> rows;   // [n][num_classes]
  std::vector<BigInt> multiplicities;      // per class
};

inline BornSystem build_born_system(const OutcomeDistribution& dist,
                                    const BranchEnsemble& ensemble) {
  const int n = dist.num_outcomes();
  BigInt common_den(1);
  for (int j = 0; j < n; ++j) {
    common_den = boost::multiprecision::lcm(common_den, denominator(dist.weight(j)));
  }
  std::vector<BigInt> scaled_weights;  // p_j = q_j * D
  scaled_weights.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    scaled_weights.push_back(numerator(dist.weight(j)) *
                             (common_den / denominator(dist.weight(j))));
  }
  BornSystem system;
  system.rows.assign(static_cast<std::size_t>(n), {});
  for (auto& row : system.rows) row.reserve(ensemble.classes.size());
  system.multiplicities.reserve(ensemble.classes.size());
  for (const BranchClass& cls : ensemble.classes) {
    for (int j = 0; j < n; ++j) {
      system.rows[static_cast<std::size_t>(j)].push_back(
          common_den * cls.count(j) -
          ensemble.num_runs * scaled_weights[static_cast<std::size_t>(j)]);
    }
    system.multiplicities.push_back(class_multiplicity(cls));
  }
  return system;
}

/// The relaxation of the system over nonnegative rationals is satisfiable by
/// construction: putting weight q_j on the single-outcome class N e_j writes
/// N q as a convex combination of classes, and those classes have
/// multiplicity 1 >= q_j. Integrality is the only possible obstruction, so
/// this filter only ever reports feasible; it is kept as a checked statement
/// of that fact.
inline bool rational_relaxation_feasible(const OutcomeDistribution& dist,
                                         const BranchEnsemble& ensemble,
                                         const BornSystem& system) {
  const int n = dist.num_outcomes();
  std::vector<Rational> relaxed(ensemble.classes.size(), Rational(0));
  for (int j = 0; j < n; ++j) {
    if (dist.weight(j).is_zero()) continue;
    std::vector<std::int64_t> extreme(static_cast<std::size_t>(n), 0);
    extreme[static_cast<std::size_t>(j)] = ensemble.num_runs;
    const BranchClass target(extreme);
    const auto it = std::lower_bound(ensemble.classes.begin(),
                                     ensemble.classes.end(), target);
    if (it == ensemble.classes.end() || *it != target) return false;
    relaxed[static_cast<std::size_t>(it - ensemble.classes.begin())] =
        dist.weight(j);
  }
  for (int j = 0; j < n; ++j) {
    Rational residual(0);
    for (std::size_t c = 0; c < relaxed.size(); ++c) {
      if (relaxed[c].is_zero()) continue;
      residual += relaxed[c] * Rational(system.rows[static_cast<std::size_t>(j)][c]);
    }
    if (!residual.is_zero()) return false;
  }
  return true;
}

}  // namespace detail

/// Searches for integer per-class valid counts whose weighted average equals
/// N q exactly; empty result means no such assignment exists (every branch
/// of the exhaustive search refuted). Depth-first over classes in canonical
/// order with ascending counts, so the first solution found is the
/// lexicographically smallest. Pruning is interval propagation to a
/// fixpoint: per-class count boxes are tightened row against row until
/// stable, and a partial assignment survives only while every row can still
/// pull its running sum back to zero within the boxes. Each tightening is
/// implied by one row plus the current boxes, so no integer-feasible
/// completion is ever cut and the search stays exhaustive. The returned
/// assignment is re-verified through weighted_average_counts before being
/// handed out.
inline std::optional<ValidityAssignment> born_feasibility(
    const OutcomeDistribution& dist, std::int64_t num_runs,
    std::int64_t class_cap = kDefaultClassCap,
    std::int64_t node_budget = kDefaultFeasibilityNodeBudget) {
  if (num_runs < 1) throw std::invalid_argument("need N >= 1");
  const int n = dist.num_outcomes();
  const BranchEnsemble ensemble = enumerate_classes(n, num_runs, class_cap);
  const std::size_t num_classes = ensemble.classes.size();
  const detail::BornSystem system = detail::build_born_system(dist, ensemble);

  if (!detail::rational_relaxation_feasible(dist, ensemble, system)) {
    return std::nullopt;
  }

  std::vector<BigInt> chosen(num_classes, BigInt(0));
  std::vector<BigInt> running(static_cast<std::size_t>(n), BigInt(0));
  std::vector<BigInt> lower(num_classes), upper(num_classes);
  std::int64_t nodes = 0;
  std::optional<std::vector<BigInt>> solution;
  constexpr int kMaxPropagationPasses = 16;

  // Tightens [lower, upper] for classes first..end to a fixpoint given the
  // current running sums. Returns false when some row's target falls
  // outside its reachable window, i.e. the node is refuted.
  const auto propagate = [&](std::size_t first) -> bool {
    for (std::size_t c = first; c < num_classes; ++c) {
      lower[c] = 0;
      upper[c] = system.multiplicities[c];
    }
    for (int pass = 0; pass < kMaxPropagationPasses; ++pass) {
      bool changed = false;
      for (int j = 0; j < n; ++j) {
        const auto& row = system.rows[static_cast<std::size_t>(j)];
        const BigInt target = -running[static_cast<std::size_t>(j)];
        BigInt lo(0), hi(0);
        for (std::size_t c = first; c < num_classes; ++c) {
          if (row[c] > 0) {
            lo += row[c] * lower[c];
            hi += row[c] * upper[c];
          } else if (row[c] < 0) {
            lo += row[c] * upper[c];
            hi += row[c] * lower[c];
          }
        }
        if (target < lo || target > hi) return false;
        for (std::size_t c = first; c < num_classes; ++c) {
          const BigInt& coeff = row[c];
          if (coeff.is_zero() || lower[c] == upper[c]) continue;
          // Contribution window left for this class once all others sit at
          // their extremes: coeff * k must land in [win_lo, win_hi].
          BigInt self_lo, self_hi;
          if (coeff > 0) {
            self_lo = coeff * lower[c];
            self_hi = coeff * upper[c];
          } else {
            self_lo = coeff * upper[c];
            self_hi = coeff * lower[c];
          }
          const BigInt win_lo = target - (hi - self_hi);
          const BigInt win_hi = target - (lo - self_lo);
          BigInt new_lower = lower[c];
          BigInt new_upper = upper[c];
          if (coeff > 0) {
            new_lower = std::max(new_lower, detail::ceil_div(win_lo, coeff));
            new_upper = std::min(new_upper, detail::floor_div(win_hi, coeff));
          } else {
            new_lower = std::max(new_lower, detail::ceil_div(win_hi, coeff));
            new_upper = std::min(new_upper, detail::floor_div(win_lo, coeff));
          }
          if (new_lower > new_upper) return false;
          if (new_lower != lower[c] || new_upper != upper[c]) {
            if (coeff > 0) {
              lo += coeff * (new_lower - lower[c]);
              hi += coeff * (new_upper - upper[c]);
            } else {
              lo += coeff * (new_upper - upper[c]);
              hi += coeff * (new_lower - lower[c]);
            }
            lower[c] = new_lower;
            upper[c] = new_upper;
            changed = true;
            if (target < lo || target > hi) return false;
          }
        }
      }
      if (!changed) break;
    }
    return true;
  };

  std::function<void(std::size_t, bool)> descend = [&](std::size_t c,
                                                       bool any_positive) {
    if (solution) return;
    if (++nodes > node_budget) {
      throw CapExceededError("feasibility search exceeded " +
                             std::to_string(node_budget) + " nodes");
    }
    if (c == num_classes) {
      if (!any_positive) return;
      for (int j = 0; j < n; ++j) {
        if (!running[static_cast<std::size_t>(j)].is_zero()) return;
      }
      solution = chosen;
      return;
    }
    if (!propagate(c)) return;
    const BigInt k_lo = lower[c];
    const BigInt k_hi = upper[c];
    for (BigInt k = k_lo; k <= k_hi && !solution; ++k) {
      chosen[c] = k;
      for (int j = 0; j < n; ++j) {
        running[static_cast<std::size_t>(j)] +=
            system.rows[static_cast<std::size_t>(j)][c] * k;
      }
      descend(c + 1, any_positive || !k.is_zero());
      for (int j = 0; j < n; ++j) {
        running[static_cast<std::size_t>(j)] -=
            system.rows[static_cast<std::size_t>(j)][c] * k;
      }
      chosen[c] = 0;
    }
  };
  descend(0, false);

  if (!solution) return std::nullopt;
  ValidityAssignment assignment(n, num_runs, std::move(*solution), class_cap);
  const FrequencyVector achieved = weighted_average_counts(assignment);
  for (int j = 0; j < n; ++j) {
    if (achieved[static_cast<std::size_t>(j)] !=
        Rational(num_runs) * dist.weight(j)) {
      throw std::logic_error("solver produced an assignment that fails re-verification");
    }
  }
  return assignment;
}

/// Every frequency vector reachable by an admissible assignment with
/// k_class <= k_cap, sorted and deduplicated. Depends only on (n, N, k_cap):
/// no distribution occurs in the signature or the computation.
inline std::vector<FrequencyVector> achievable_set(
    int n, std::int64_t num_runs, std::int64_t k_cap,
    std::int64_t class_cap = kDefaultClassCap,
    std::int64_t assignment_cap = kDefaultAssignmentCap) {
  if (k_cap < 1) throw std::invalid_argument("need k_cap >= 1");
  const BranchEnsemble ensemble = enumerate_classes(n, num_runs, class_cap);
  const std::size_t num_classes = ensemble.classes.size();

  std::vector<BigInt> bounds;
  bounds.reserve(num_classes);
  BigInt search_space(1);
  for (const BranchClass& cls : ensemble.classes) {
    BigInt bound = class_multiplicity(cls);
    if (bound > k_cap) bound = k_cap;
    search_space *= bound + 1;
    bounds.push_back(std::move(bound));
  }
  if (search_space > assignment_cap) {
    throw CapExceededError("achievable-set search space " + search_space.str() +
                           " exceeds cap " + std::to_string(assignment_cap));
  }

  std::set<FrequencyVector> reachable;
  std::vector<BigInt> numerators(static_cast<std::size_t>(n), BigInt(0));
  BigInt denominator(0);
  std::function<void(std::size_t)> descend = [&](std::size_t c) {
    if (c == num_classes) {
      if (denominator.is_zero()) return;
      FrequencyVector values;
      values.reserve(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        values.emplace_back(numerators[static_cast<std::size_t>(j)], denominator);
      }
      reachable.insert(std::move(values));
      return;
    }
    for (BigInt k(0); k <= bounds[c]; ++k) {
      descend(c + 1);
      denominator += 1;
      for (int j = 0; j < n; ++j) {
        numerators[static_cast<std::size_t>(j)] += ensemble.classes[c].count(j);
      }
    }
    denominator -= bounds[c] + 1;
    for (int j = 0; j < n; ++j) {
      numerators[static_cast<std::size_t>(j)] -=
          (bounds[c] + 1) * ensemble.classes[c].count(j);
    }
  };
  descend(0);

  return std::vector<FrequencyVector>(reachable.begin(), reachable.end());
}

inline constexpr const char kCertificateClaim[] =
    "one-achieved-frequency-vector-cannot-equal-two-distinct-targets";

/// Machine-checkable record that a single coefficient-independent validity
/// assignment cannot satisfy the Born condition for two distributions at
/// once: its weighted average is one fixed vector, while the condition
/// demands it equal both N q_A and N q_B, which differ. The exhibited
/// vector is the everything-valid average (N/n per outcome).
struct InfeasibilityCertificate {
  int num_outcomes = 0;
  std::int64_t num_runs = 0;
  FrequencyVector target_a;
  FrequencyVector target_b;
  FrequencyVector equal_validity_freq;
  std::string claim;

  friend bool operator==(const InfeasibilityCertificate&,
                         const InfeasibilityCertificate&) = default;
};

/// Builds the certificate for two distinct distributions over the same
/// outcomes. Throws SameDistribution when the weights coincide (the targets
/// would too, and no contradiction follows).
inline InfeasibilityCertificate joint_infeasibility(
    const OutcomeDistribution& dist_a, const OutcomeDistribution& dist_b,
    std::int64_t num_runs) {
  if (dist_a.num_outcomes() != dist_b.num_outcomes()) {
    throw DimensionMismatchError("distributions have different outcome counts");
  }
  if (num_runs < 1) throw std::invalid_argument("need N >= 1");
  if (dist_a == dist_b) {
    throw SameDistributionError("identical weights admit no joint contradiction");
  }
  InfeasibilityCertificate cert;
  cert.num_outcomes = dist_a.num_outcomes();
  cert.num_runs = num_runs;
  for (int j = 0; j < cert.num_outcomes; ++j) {
    cert.target_a.push_back(Rational(num_runs) * dist_a.weight(j));
    cert.target_b.push_back(Rational(num_runs) * dist_b.weight(j));
  }
  cert.equal_validity_freq = equal_validity_frequency(cert.num_outcomes, num_runs);
  cert.claim = kCertificateClaim;
  return cert;
}

/// Re-derives every checkable fact in the certificate. Structural breakage
/// (sizes, ranges, totals) throws MalformedCertificate; a structurally sound
/// certificate whose logic does not hold (equal targets, wrong claim, wrong
/// exhibited vector) returns false.
inline bool verify_certificate(const InfeasibilityCertificate& cert) {
  const int n = cert.num_outcomes;
  const std::int64_t num_runs = cert.num_runs;
  if (n < 1 || num_runs < 1) {
    throw MalformedCertificateError("nonpositive n or N");
  }
  const auto check_vector = [&](const FrequencyVector& values, const char* name) {
    if (values.size() != static_cast<std::size_t>(n)) {
      throw MalformedCertificateError(std::string(name) + " has wrong arity");
    }
    Rational sum(0);
    for (const Rational& v : values) {
      if (v < 0 || v > num_runs) {
        throw MalformedCertificateError(std::string(name) + " entry outside [0, N]");
      }
      sum += v;
    }
    if (sum != num_runs) {
      throw MalformedCertificateError(std::string(name) + " does not sum to N");
    }
  };
  check_vector(cert.target_a, "target_a");
  check_vector(cert.target_b, "target_b");
  check_vector(cert.equal_validity_freq, "equal_validity_freq");

  if (cert.claim != kCertificateClaim) return false;
  const Rational expected_share(num_runs, n);
  for (const Rational& v : cert.equal_validity_freq) {
    if (v != expected_share) return false;
  }
  return cert.target_a != cert.target_b;
}

}  // namespace branchlab
