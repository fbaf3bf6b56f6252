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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

/// Per-outcome tally [m_1..m_n] of one branch class: all outcome sequences
/// of length N that are permutations of each other share one class. The
/// canonical order over classes is lexicographic ascending on the counts.
class BranchClass {
 public:
  explicit BranchClass(std::vector<std::int64_t> counts)
      : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("branch class with no outcomes");
    for (std::int64_t c : counts_) {
      if (c < 0) throw std::invalid_argument("negative outcome count");
      total_ += c;
    }
    if (total_ < 1) throw std::invalid_argument("branch class with zero runs");
  }

  int num_outcomes() const { return static_cast<int>(counts_.size()); }
  std::int64_t num_runs() const { return total_; }
  std::int64_t count(int outcome) const {
    return counts_[static_cast<std::size_t>(outcome)];
  }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  friend auto operator<=>(const BranchClass& a, const BranchClass& b) {
    return a.counts_ <=> b.counts_;
  }
  friend bool operator==(const BranchClass& a, const BranchClass& b) {
    return a.counts_ == b.counts_;
  }

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

inline std::string to_string(const BranchClass& cls) {
  std::string out = "[";
  for (int j = 0; j < cls.num_outcomes(); ++j) {
    if (j > 0) out += ",";
    out += std::to_string(cls.count(j));
  }
  return out + "]";
}

/// Number of classes for (n, N): compositions of N into n parts,
/// C(N+n-1, n-1).
inline BigInt count_classes(int n, std::int64_t num_runs) {
  return binomial(num_runs + n - 1, n - 1);
}

/// Sequences in the class: N! / (m_1! ... m_n!), computed as a product of
/// binomials so every intermediate stays integral.
inline BigInt class_multiplicity(const BranchClass& cls) {
  BigInt result(1);
  std::int64_t remaining = cls.num_runs();
  for (int j = 0; j < cls.num_outcomes(); ++j) {
    result *= binomial(remaining, cls.count(j));
    remaining -= cls.count(j);
  }
  return result;
}

/// Total squared norm of all sequences in the class:
/// multiplicity * prod_j q_j^{m_j}, exact.
inline Rational class_weight(const BranchClass& cls,
                             const OutcomeDistribution& dist) {
  if (cls.num_outcomes() != dist.num_outcomes()) {
    throw DimensionMismatchError(
        "class has " + std::to_string(cls.num_outcomes()) +
        " outcomes, distribution has " + std::to_string(dist.num_outcomes()));
  }
  Rational product(1);
  for (int j = 0; j < cls.num_outcomes(); ++j) {
    if (cls.count(j) == 0) continue;
    if (dist.weight(j).is_zero()) return Rational(0);
    product *= pow_rational(dist.weight(j),
                            static_cast<std::uint64_t>(cls.count(j)));
  }
  return Rational(class_multiplicity(cls)) * product;
}

namespace detail {

/// In-place lexicographic successor of a count vector with fixed sum.
/// Returns false when `counts` is already the last vector, (N,0,...,0).
inline bool next_class_counts(std::vector<std::int64_t>& counts) {
  const int n = static_cast<int>(counts.size());
  std::int64_t suffix = counts[static_cast<std::size_t>(n - 1)];
  for (int i = n - 2; i >= 0; --i) {
    if (suffix > 0) {
      counts[static_cast<std::size_t>(i)] += 1;
      for (int k = i + 1; k < n - 1; ++k) counts[static_cast<std::size_t>(k)] = 0;
      counts[static_cast<std::size_t>(n - 1)] = suffix - 1;
      return true;
    }
    suffix += counts[static_cast<std::size_t>(i)];
  }
  return false;
}

/// Count vector at `index` (0-based) in canonical order, by unranking:
/// fixing m_1 = v uses up a block of C(N-v+n-2, n-2) later positions.
inline std::vector<std::int64_t> class_counts_at(int n, std::int64_t num_runs,
                                                 BigInt index) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  std::int64_t remaining = num_runs;
  for (int pos = 0; pos < n - 1; ++pos) {
    const int parts_after = n - pos - 1;
    std::int64_t v = 0;
    for (;; ++v) {
      const BigInt block = binomial(remaining - v + parts_after - 1, parts_after - 1);
      if (index < block) break;
      index -= block;
    }
    counts[static_cast<std::size_t>(pos)] = v;
    remaining -= v;
  }
  counts[static_cast<std::size_t>(n - 1)] = remaining;
  return counts;
}

}  // namespace detail

/// All classes for (n, N) in canonical order plus their shared shape.
struct BranchEnsemble {
  int num_outcomes = 0;
  std::int64_t num_runs = 0;
  std::vector<BranchClass> classes;
};

inline constexpr std::int64_t kDefaultClassCap = 5'000'000;

inline void require_class_count_within_cap(int n, std::int64_t num_runs,
                                           std::int64_t class_cap) {
  const BigInt total = count_classes(n, num_runs);
  if (total > class_cap) {
    throw CapExceededError("(n=" + std::to_string(n) +
                           ", N=" + std::to_string(num_runs) + ") has " +
                           total.str() + " classes, cap is " +
                           std::to_string(class_cap));
  }
}

/// Streams every class for (n, N) in canonical order as a counts vector.
/// The visitor borrows the vector; it must copy what it keeps.
template <typename Fn>
void for_each_class(int n, std::int64_t num_runs, Fn&& visit) {
  if (n < 1 || num_runs < 1) throw std::invalid_argument("need n >= 1 and N >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  counts.back() = num_runs;
  do {
    visit(static_cast<const std::vector<std::int64_t>&>(counts));
  } while (detail::next_class_counts(counts));
}

/// Materializes the full canonical class list. Throws CapExceeded when the
/// class count is over `class_cap`; the per-class operations above remain
/// usable past the cap.
inline BranchEnsemble enumerate_classes(int n, std::int64_t num_runs,
                                        std::int64_t class_cap = kDefaultClassCap) {
  if (n < 1 || num_runs < 1) throw std::invalid_argument("need n >= 1 and N >= 1");
  require_class_count_within_cap(n, num_runs, class_cap);
  BranchEnsemble ensemble;
  ensemble.num_outcomes = n;
  ensemble.num_runs = num_runs;
  for_each_class(n, num_runs, [&](const std::vector<std::int64_t>& counts) {
    ensemble.classes.emplace_back(counts);
  });
  return ensemble;
}

}  // namespace branchlab
