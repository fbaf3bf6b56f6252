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
#include <utility>
#include <vector>

#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

class OutcomeDistribution;
inline OutcomeDistribution validate_distribution(std::vector<Rational> weights);

/// The squared-magnitude weights of an n-outcome measurement, as exact
/// rationals. Instances only exist in validated form: nonempty, every
/// weight >= 0, weights summing to exactly 1. Phases are not represented;
/// every quantity computed downstream depends on the weights alone.
class OutcomeDistribution {
 public:
  int num_outcomes() const { return static_cast<int>(weights_.size()); }

  /// Weight of outcome `index` (0-based).
  const Rational& weight(int index) const {
    return weights_[static_cast<std::size_t>(index)];
  }

  const std::vector<Rational>& weights() const { return weights_; }

  friend bool operator==(const OutcomeDistribution&,
                         const OutcomeDistribution&) = default;

 private:
  explicit OutcomeDistribution(std::vector<Rational> weights)
      : weights_(std::move(weights)) {}

  friend OutcomeDistribution validate_distribution(std::vector<Rational>);

  std::vector<Rational> weights_;
};

/// Checks the probability-vector contract and returns the distribution.
/// Throws EmptyDistribution, NegativeWeight, or NotNormalized.
inline OutcomeDistribution validate_distribution(std::vector<Rational> weights) {
  if (weights.empty()) {
    throw EmptyDistributionError("distribution has no outcomes");
  }
  Rational sum(0);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0) {
      throw NegativeWeightError("weight " + std::to_string(j + 1) + " is " +
                                to_fraction_string(weights[j]));
    }
    sum += weights[j];
  }
  if (sum != 1) {
    throw NotNormalizedError("weights sum to " + to_fraction_string(sum) +
                             ", expected exactly 1");
  }
  return OutcomeDistribution(std::move(weights));
}

inline std::string to_string(const OutcomeDistribution& dist) {
  std::string out = "[";
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    if (j > 0) out += ", ";
    out += to_fraction_string(dist.weight(j));
  }
  out += "]";
  return out;
}

}  // namespace branchlab
