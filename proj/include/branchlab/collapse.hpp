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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

// Seeded single-outcome sampler: the collapse baseline the branch-counting
// results are contrasted with. Everything here is bit-reproducible; the
// only floating point is the chi-square statistic itself.

/// splitmix64. Fixed by name so an independent reimplementation in any
/// language reproduces the streams bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

struct SampleRun {
  std::uint64_t seed = 0;
  std::int64_t num_runs = 0;
  std::vector<int> outcomes;  // 1-based outcome indices, length num_runs
};

/// N independent draws. A raw 64-bit word k is read as the rational k/2^64
/// and classified against the cumulative weights by exact integer
/// comparison: outcome j is the first with k/2^64 < C_j, i.e.
/// k <= floor((c_j 2^64 - 1) / d) for C_j = c_j/d. No weight is ever
/// rounded to a float threshold.
inline SampleRun sample_runs(const OutcomeDistribution& dist,
                             std::int64_t num_runs, std::uint64_t seed) {
  if (num_runs < 1) throw std::invalid_argument("need N >= 1");
  const int n = dist.num_outcomes();

  BigInt common_den(1);
  for (int j = 0; j < n; ++j) {
    common_den = boost::multiprecision::lcm(common_den, denominator(dist.weight(j)));
  }
  // Inclusive upper bound per cumulative weight; a zero cumulative admits
  // no draw at all, which an unsigned bound cannot express, hence the flag.
  std::vector<std::pair<bool, std::uint64_t>> upper_bounds;
  upper_bounds.reserve(static_cast<std::size_t>(n));
  BigInt cumulative(0);
  const BigInt two_to_64 = BigInt(1) << 64;
  for (int j = 0; j < n; ++j) {
    cumulative += numerator(dist.weight(j)) * (common_den / denominator(dist.weight(j)));
    if (cumulative.is_zero()) {
      upper_bounds.emplace_back(false, 0);
    } else {
      const BigInt bound = (cumulative * two_to_64 - 1) / common_den;
      upper_bounds.emplace_back(true, bound.convert_to<std::uint64_t>());
    }
  }

  SampleRun run;
  run.seed = seed;
  run.num_runs = num_runs;
  run.outcomes.reserve(static_cast<std::size_t>(num_runs));
  SplitMix64 rng(seed);
  for (std::int64_t i = 0; i < num_runs; ++i) {
    const std::uint64_t word = rng.next();
    int outcome = n;  // the final cumulative bound is 2^64 - 1, always hit
    for (int j = 0; j < n; ++j) {
      const auto& [reachable, bound] = upper_bounds[static_cast<std::size_t>(j)];
      if (reachable && word <= bound) {
        outcome = j + 1;
        break;
      }
    }
    run.outcomes.push_back(outcome);
  }
  return run;
}

/// count_j / N per outcome, exact; the entries sum to 1.
inline std::vector<Rational> empirical_frequencies(const SampleRun& run, int n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  for (int outcome : run.outcomes) {
    if (outcome < 1 || outcome > n) {
      throw IndexOutOfRangeError("outcome " + std::to_string(outcome) +
                                 " outside [1, " + std::to_string(n) + "]");
    }
    ++counts[static_cast<std::size_t>(outcome - 1)];
  }
  std::vector<Rational> frequencies;
  frequencies.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    frequencies.emplace_back(counts[static_cast<std::size_t>(j)], run.num_runs);
  }
  return frequencies;
}

/// sum_j (count_j - N q_j)^2 / (N q_j), accumulated exactly and converted
/// once at the end. Requires every expected count N q_j >= 5, the standard
/// applicability floor.
inline double chi_square_statistic(const SampleRun& run,
                                   const OutcomeDistribution& dist) {
  const int n = dist.num_outcomes();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  for (int outcome : run.outcomes) {
    if (outcome < 1 || outcome > n) {
      throw IndexOutOfRangeError("outcome " + std::to_string(outcome) +
                                 " outside [1, " + std::to_string(n) + "]");
    }
    ++counts[static_cast<std::size_t>(outcome - 1)];
  }
  Rational statistic(0);
  for (int j = 0; j < n; ++j) {
    const Rational expected = Rational(run.num_runs) * dist.weight(j);
    if (expected < 5) {
      throw ExpectedCountTooSmallError(
          "expected count for outcome " + std::to_string(j + 1) + " is " +
          to_fraction_string(expected) + ", below the floor of 5");
    }
    const Rational residual = Rational(counts[static_cast<std::size_t>(j)]) - expected;
    statistic += residual * residual / expected;
  }
  return to_double(statistic);
}

/// 95th-percentile chi-square critical values, 1 through 9 degrees of
/// freedom, from the standard table.
inline double chi_square_critical_95(int degrees_of_freedom) {
  static constexpr std::array<double, 9> table = {
      3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507, 16.919};
  if (degrees_of_freedom < 1 || degrees_of_freedom > 9) {
    throw std::invalid_argument("critical values tabulated for 1..9 degrees of freedom");
  }
  return table[static_cast<std::size_t>(degrees_of_freedom - 1)];
}

}  // namespace branchlab
