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
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "branchlab/branch_classes.hpp"
#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/parallel.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

/// Exact split of the total branch weight for N runs into the part whose
/// empirical frequencies sit within epsilon of every q_j and the exact
/// complement, plus the maximum-weight class.
struct TypicalityReport {
  std::int64_t num_runs;
  Rational epsilon;
  Rational weight_inside;
  Rational weight_outside;
  BranchClass mode_class;
};

namespace detail {

struct WindowScanPartial {
  Rational inside{0};
  Rational outside{0};
  Rational best_weight{-1};
  std::int64_t best_index = -1;
  std::vector<std::int64_t> best_counts;
};

/// One deterministic pass over all classes of (n, N): exact inside/outside
/// weight sums for the window |m_j - N q_j| <= N epsilon (every class inside
/// when no window is given) and the canonical-first maximum-weight class.
inline WindowScanPartial scan_window(const OutcomeDistribution& dist,
                                     std::int64_t num_runs,
                                     const std::optional<Rational>& epsilon,
                                     int num_threads) {
  const int n = dist.num_outcomes();
  std::vector<Rational> targets;
  targets.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) targets.push_back(Rational(num_runs) * dist.weight(j));
  std::optional<Rational> tolerance;
  if (epsilon) tolerance = Rational(num_runs) * *epsilon;

  const std::int64_t total =
      count_classes(n, num_runs).convert_to<std::int64_t>();
  auto partials = chunked_scan<WindowScanPartial>(
      total, num_threads,
      [&](std::int64_t begin, std::int64_t end) {
        WindowScanPartial part;
        std::vector<std::int64_t> counts =
            class_counts_at(n, num_runs, BigInt(begin));
        for (std::int64_t index = begin; index < end; ++index) {
          const BranchClass cls(counts);
          const Rational weight = class_weight(cls, dist);
          bool inside = true;
          if (tolerance) {
            for (int j = 0; j < n && inside; ++j) {
              Rational gap = Rational(counts[static_cast<std::size_t>(j)]) -
                             targets[static_cast<std::size_t>(j)];
              if (gap < 0) gap = -gap;
              inside = gap <= *tolerance;
            }
          }
          (inside ? part.inside : part.outside) += weight;
          if (weight > part.best_weight) {
            part.best_weight = weight;
            part.best_index = index;
            part.best_counts = counts;
          }
          if (index + 1 < end) next_class_counts(counts);
        }
        return part;
      });

  WindowScanPartial merged;
  for (const auto& part : partials) {
    merged.inside += part.inside;
    merged.outside += part.outside;
    if (part.best_weight > merged.best_weight ||
        (part.best_weight == merged.best_weight &&
         part.best_index < merged.best_index)) {
      merged.best_weight = part.best_weight;
      merged.best_index = part.best_index;
      merged.best_counts = part.best_counts;
    }
  }
  return merged;
}

}  // namespace detail

/// Exact weight of the classes whose per-outcome frequencies all satisfy
/// |m_j/N - q_j| <= epsilon (boundary inclusive), its complement, and the
/// maximum-weight class. Both sums are accumulated independently and must
/// recombine to exactly 1.
inline TypicalityReport weight_in_window(const OutcomeDistribution& dist,
                                         std::int64_t num_runs,
                                         const Rational& epsilon,
                                         std::int64_t class_cap = kDefaultClassCap,
                                         int num_threads = 1) {
  if (num_runs < 1) throw std::invalid_argument("need N >= 1");
  if (epsilon <= 0) throw std::invalid_argument("need epsilon > 0");
  require_class_count_within_cap(dist.num_outcomes(), num_runs, class_cap);
  auto scan = detail::scan_window(dist, num_runs, epsilon, num_threads);
  if (scan.inside + scan.outside != 1) {
    throw std::logic_error("window scan lost weight");
  }
  return TypicalityReport{num_runs, epsilon, scan.inside, scan.outside,
                          BranchClass(scan.best_counts)};
}

/// The class maximizing class_weight; exact ties resolve to the first class
/// in canonical order.
inline BranchClass sharp_max(const OutcomeDistribution& dist,
                             std::int64_t num_runs,
                             std::int64_t class_cap = kDefaultClassCap,
                             int num_threads = 1) {
  if (num_runs < 1) throw std::invalid_argument("need N >= 1");
  require_class_count_within_cap(dist.num_outcomes(), num_runs, class_cap);
  auto scan = detail::scan_window(dist, num_runs, std::nullopt, num_threads);
  return BranchClass(scan.best_counts);
}

/// Smallest N <= max_runs whose outside weight is at most delta, scanning N
/// upward one step at a time; the outside weight is not monotone in N at
/// lattice granularity, so no bisection. Empty result means not reached.
inline std::optional<std::int64_t> min_sample_size(
    const OutcomeDistribution& dist, const Rational& epsilon,
    const Rational& delta, std::int64_t max_runs,
    std::int64_t class_cap = kDefaultClassCap, int num_threads = 1) {
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("need 0 < delta < 1");
  for (std::int64_t num_runs = 1; num_runs <= max_runs; ++num_runs) {
    const TypicalityReport report =
        weight_in_window(dist, num_runs, epsilon, class_cap, num_threads);
    if (report.weight_outside <= delta) return num_runs;
  }
  return std::nullopt;
}

/// Exact outside weight for each requested N (ascending).
inline std::vector<std::pair<std::int64_t, Rational>> concentration_curve(
    const OutcomeDistribution& dist, const Rational& epsilon,
    const std::vector<std::int64_t>& run_counts,
    std::int64_t class_cap = kDefaultClassCap, int num_threads = 1) {
  for (std::size_t i = 1; i < run_counts.size(); ++i) {
    if (run_counts[i] <= run_counts[i - 1]) {
      throw std::invalid_argument("N values must be strictly ascending");
    }
  }
  std::vector<std::pair<std::int64_t, Rational>> curve;
  curve.reserve(run_counts.size());
  for (std::int64_t num_runs : run_counts) {
    curve.emplace_back(num_runs,
                       weight_in_window(dist, num_runs, epsilon, class_cap,
                                        num_threads)
                           .weight_outside);
  }
  return curve;
}

}  // namespace branchlab
