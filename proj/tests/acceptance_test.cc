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

// End-to-end acceptance suite. Each test is one release criterion and
// prints a single PASS/FAIL line; run via `ctest` or directly.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "branchlab/branchlab.hpp"
#include "gtest/gtest.h"
#include "oracle_helpers.hpp"

using namespace branchlab;

namespace {

class Acceptance : public ::testing::Test {
 protected:
  void label(int index, std::string slug) {
    index_ = index;
    slug_ = std::move(slug);
  }

  void TearDown() override {
    std::cout << "[ACCEPTANCE] criterion " << index_ << " (" << slug_
              << "): " << (HasFailure() ? "FAIL" : "PASS") << std::endl;
  }

 private:
  int index_ = 0;
  std::string slug_;
};

OutcomeDistribution random_distribution(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> pick(0, 1000);
  std::vector<std::int64_t> raw(static_cast<std::size_t>(n));
  std::int64_t total = 0;
  do {
    total = 0;
    for (auto& value : raw) total += value = pick(rng);
  } while (total == 0);
  std::vector<Rational> q;
  q.reserve(raw.size());
  for (std::int64_t value : raw) q.emplace_back(value, total);
  return validate_distribution(std::move(q));
}

std::string frequency_key(const FrequencyVector& values) {
  std::string out;
  for (const Rational& value : values) out += to_fraction_string(value) + ";";
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.good()) << "missing " << path;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& arguments) {
  const std::string command =
      std::string(BRANCHLAB_CLI_PATH) + " " + arguments + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_F(Acceptance, Criterion01NormalizationConservation) {
  label(1, "normalization-conservation");
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> pick_n(1, 4);
  std::uniform_int_distribution<std::int64_t> pick_runs(1, 50);
  for (int trial = 0; trial < 20; ++trial) {
    // Pin the largest shape once so the bound case is always exercised.
    const int n = trial == 0 ? 4 : pick_n(rng);
    const std::int64_t num_runs = trial == 0 ? 50 : pick_runs(rng);
    const OutcomeDistribution dist = random_distribution(n, rng);
    Rational total(0);
    for_each_class(n, num_runs, [&](const std::vector<std::int64_t>& counts) {
      total += class_weight(BranchClass(counts), dist);
    });
    EXPECT_EQ(total, Rational(1)) << "n=" << n << " N=" << num_runs;
  }
  const double elapsed = seconds_since(start);
  EXPECT_LT(elapsed, 10.0);
  std::cout << "  criterion 1 ran in " << elapsed << " s" << std::endl;
}

TEST_F(Acceptance, Criterion02EqualValidityNoProbability) {
  label(2, "equal-validity-coefficient-independence");
  std::mt19937_64 rng(202);
  for (int n = 1; n <= 4; ++n) {
    for (std::int64_t num_runs = 1; num_runs <= 12; ++num_runs) {
      const FrequencyVector expected(static_cast<std::size_t>(n),
                                     Rational(num_runs, n));
      // The computation takes no distribution; five pairwise-distinct
      // ambient distributions come and go while it reproduces bit-identical
      // output. (Over one outcome only a single distribution exists.)
      std::set<std::string> distinct;
      std::string first;
      for (int round = 0; round < 5; ++round) {
        OutcomeDistribution ambient = random_distribution(n, rng);
        while (n > 1 && !distinct.insert(frequency_key(ambient.weights())).second) {
          ambient = random_distribution(n, rng);
        }
        (void)ambient;
        const FrequencyVector average = weighted_average_counts(
            ValidityAssignment::all_sequences_valid(n, num_runs));
        EXPECT_EQ(average, expected);
        EXPECT_EQ(average, equal_validity_frequency(n, num_runs));
        const std::string key = frequency_key(average);
        if (round == 0) {
          first = key;
        } else {
          EXPECT_EQ(key, first);
        }
      }
    }
  }
}

TEST_F(Acceptance, Criterion03ClassAverageMatchesSequenceAverage) {
  label(3, "class-compression-reduction-oracle");
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> pick_n(1, 3);
  std::uniform_int_distribution<std::int64_t> pick_runs(1, 6);
  std::uniform_int_distribution<int> pick_count(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = pick_n(rng);
    const std::int64_t num_runs = pick_runs(rng);
    const BranchEnsemble ensemble = enumerate_classes(n, num_runs);
    std::vector<BigInt> counts;
    bool any = false;
    for (const BranchClass& cls : ensemble.classes) {
      BigInt k(pick_count(rng));
      const BigInt multiplicity = class_multiplicity(cls);
      if (k > multiplicity) k = multiplicity;
      any = any || !k.is_zero();
      counts.push_back(std::move(k));
    }
    if (!any) {
      counts.back() = 1;
    }
    const ValidityAssignment assignment(n, num_runs, counts);
    std::map<std::vector<std::int64_t>, BigInt> per_class;
    for (std::size_t c = 0; c < ensemble.classes.size(); ++c) {
      per_class[ensemble.classes[c].counts()] = counts[c];
    }
    EXPECT_EQ(weighted_average_counts(assignment),
              oracle::sequence_level_average(n, static_cast<int>(num_runs),
                                             per_class));
  }
}

TEST_F(Acceptance, Criterion04JointImpossibilityCertificates) {
  label(4, "impossibility-certificates");
  std::mt19937_64 rng(404);

  // Ten pairwise-distinct rational distributions over three outcomes.
  std::vector<OutcomeDistribution> distributions;
  std::set<std::string> seen;
  while (distributions.size() < 10) {
    const OutcomeDistribution dist = random_distribution(3, rng);
    if (seen.insert(frequency_key(dist.weights())).second) {
      distributions.push_back(dist);
    }
  }

  const std::vector<std::int64_t> run_choices{1, 4, 12};
  int pair_index = 0;
  for (std::size_t a = 0; a < distributions.size(); ++a) {
    for (std::size_t b = a + 1; b < distributions.size(); ++b, ++pair_index) {
      const std::int64_t num_runs =
          run_choices[static_cast<std::size_t>(pair_index % 3)];
      const InfeasibilityCertificate cert =
          joint_infeasibility(distributions[a], distributions[b], num_runs);
      EXPECT_TRUE(verify_certificate(cert));

      // One single-field mutation per certificate must be rejected:
      // either verify returns false or the structure check throws.
      InfeasibilityCertificate mutated = cert;
      switch (pair_index % 5) {
        case 0: mutated.target_b = mutated.target_a; break;
        case 1: mutated.target_a[0] += 1; break;
        case 2: mutated.claim = "tampered"; break;
        case 3: mutated.equal_validity_freq[0] += Rational(1, 2); break;
        default: mutated.num_runs += 1; break;
      }
      bool rejected = false;
      try {
        rejected = !verify_certificate(mutated);
      } catch (const MalformedCertificateError&) {
        rejected = true;
      }
      EXPECT_TRUE(rejected) << "mutation " << pair_index % 5 << " slipped through";
    }
  }
  EXPECT_EQ(pair_index, 45);

  // Achievable sets for n=2, N <= 3, k_cap=2 against exhaustive brute force;
  // the call accepts no distribution, and its output is byte-stable while
  // ambient distributions change.
  for (std::int64_t num_runs = 1; num_runs <= 3; ++num_runs) {
    const auto vectors = achievable_set(2, num_runs, 2);
    const BranchEnsemble ensemble = enumerate_classes(2, num_runs);
    std::vector<std::vector<std::int64_t>> classes;
    std::vector<BigInt> multiplicities;
    for (const BranchClass& cls : ensemble.classes) {
      classes.push_back(cls.counts());
      multiplicities.push_back(class_multiplicity(cls));
    }
    const auto expected = oracle::brute_force_achievable(2, classes, multiplicities, 2);
    EXPECT_EQ(std::vector<FrequencyVector>(expected.begin(), expected.end()),
              vectors);

    std::string first;
    for (int round = 0; round < 3; ++round) {
      const OutcomeDistribution ambient = random_distribution(2, rng);
      (void)ambient;
      std::string key;
      for (const FrequencyVector& vec : achievable_set(2, num_runs, 2)) {
        key += frequency_key(vec) + "\n";
      }
      if (round == 0) {
        first = key;
      } else {
        EXPECT_EQ(key, first);
      }
    }
  }
}

TEST_F(Acceptance, Criterion05FeasibilityMatchesExhaustiveSearch) {
  label(5, "born-feasibility-sanity");
  const std::vector<std::vector<Rational>> distributions = {
      {Rational(1, 2), Rational(1, 2)},
      {Rational(1, 3), Rational(2, 3)},
      {Rational(2, 3), Rational(1, 3)},
      {Rational(1, 4), Rational(3, 4)},
      {Rational(3, 4), Rational(1, 4)},
  };
  for (const auto& q : distributions) {
    for (std::int64_t num_runs = 1; num_runs <= 4; ++num_runs) {
      const OutcomeDistribution dist = validate_distribution(q);
      const BranchEnsemble ensemble = enumerate_classes(2, num_runs);
      std::vector<std::vector<std::int64_t>> classes;
      std::vector<BigInt> multiplicities;
      for (const BranchClass& cls : ensemble.classes) {
        classes.push_back(cls.counts());
        multiplicities.push_back(class_multiplicity(cls));
      }
      const auto expected = oracle::brute_force_feasibility(
          q, static_cast<int>(num_runs), classes, multiplicities);
      const auto assignment = born_feasibility(dist, num_runs);
      EXPECT_EQ(assignment.has_value(), expected.feasible)
          << to_string(dist) << " N=" << num_runs;
      if (assignment) {
        const FrequencyVector achieved = weighted_average_counts(*assignment);
        for (int j = 0; j < 2; ++j) {
          EXPECT_EQ(achieved[static_cast<std::size_t>(j)],
                    Rational(num_runs) * dist.weight(j));
        }
      }
    }
  }
}

TEST_F(Acceptance, Criterion06TypicalityAgainstBinomialOracle) {
  label(6, "typicality-binomial-oracle");
  const auto start = std::chrono::steady_clock::now();
  const OutcomeDistribution fair =
      validate_distribution({Rational(1, 2), Rational(1, 2)});
  Rational previous(2);
  for (int num_runs : {4, 16, 64, 256}) {
    const TypicalityReport report =
        weight_in_window(fair, num_runs, Rational(1, 10));
    const Rational expected =
        oracle::binomial_outside_weight(Rational(1, 2), num_runs, Rational(1, 10));
    EXPECT_EQ(report.weight_outside, expected);
    EXPECT_EQ(to_fraction_string(report.weight_outside),
              to_fraction_string(expected));
    EXPECT_LT(report.weight_outside, previous);
    previous = report.weight_outside;
  }
  const double elapsed = seconds_since(start);
  EXPECT_LT(elapsed, 30.0);
  std::cout << "  criterion 6 ran in " << elapsed << " s" << std::endl;
}

TEST_F(Acceptance, Criterion07FiniteRunResidueNeverVanishes) {
  label(7, "finite-run-residue");
  const OutcomeDistribution fair =
      validate_distribution({Rational(1, 2), Rational(1, 2)});
  for (std::int64_t num_runs = 4; num_runs <= 256; ++num_runs) {
    const TypicalityReport report =
        weight_in_window(fair, num_runs, Rational(1, 10));
    EXPECT_GT(report.weight_outside, Rational(0)) << "N=" << num_runs;
  }
}

TEST_F(Acceptance, Criterion08LinearityAndChainDerivation) {
  label(8, "linearity-and-chain");
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::int64_t> numerator(-5, 5);
  std::uniform_int_distribution<std::int64_t> denominator(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    constexpr int alphabet = 4;
    std::vector<BasisProduct> domain;
    for (int i = 0; i < alphabet; ++i) {
      domain.push_back({system_label(i + 1), detector_label(i + 1),
                        observer_ready_label()});
    }
    std::vector<BasisProduct> images = domain;
    for (std::size_t i = images.size(); i-- > 1;) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(images[i], images[pick(rng)]);
    }
    BranchingRule rule;
    for (std::size_t i = 0; i < domain.size(); ++i) {
      rule.add_mapping(domain[i], images[i]);
    }
    TensorState left, right;
    for (const BasisProduct& basis : domain) {
      left.add_term(basis, Rational(numerator(rng), denominator(rng)));
      right.add_term(basis, Rational(numerator(rng), denominator(rng)));
    }
    EXPECT_TRUE(linearity_check(rule, left, right,
                                Rational(numerator(rng), denominator(rng)),
                                Rational(numerator(rng), denominator(rng))));
  }

  const std::vector<std::vector<Rational>> distributions = {
      {Rational(1)},
      {Rational(1, 2), Rational(1, 2)},
      {Rational(1, 6), Rational(1, 3), Rational(1, 2)},
      {Rational(1, 15), Rational(2, 15), Rational(3, 15), Rational(4, 15),
       Rational(5, 15)},
  };
  for (const auto& q : distributions) {
    const EqualValidityReport report =
        equal_validity_demonstration(validate_distribution(q));
    EXPECT_TRUE(report.states_match);
    EXPECT_TRUE(report.all_versions_aware);
    EXPECT_EQ(report.weight_sum, Rational(1));
    int nonzero = 0;
    for (const Rational& w : q) nonzero += w.is_zero() ? 0 : 1;
    EXPECT_EQ(report.num_versions, nonzero);
  }
}

TEST_F(Acceptance, Criterion09CollapseBaselineStatistics) {
  label(9, "collapse-baseline");
  const OutcomeDistribution fair =
      validate_distribution({Rational(1, 2), Rational(1, 2)});
  int exceedances = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const SampleRun first = sample_runs(fair, 1000, seed);
    const SampleRun second = sample_runs(fair, 1000, seed);
    EXPECT_EQ(first.outcomes, second.outcomes);
    if (chi_square_statistic(first, fair) > 3.84) ++exceedances;
  }
  EXPECT_GE(exceedances, 2);
  EXPECT_LE(exceedances, 20);
  std::cout << "  criterion 9 exceedances: " << exceedances << "/200" << std::endl;
}

TEST_F(Acceptance, Criterion10CliDeterminism) {
  label(10, "cli-determinism");
  const std::filesystem::path scenario_dir(BRANCHLAB_SCENARIO_DIR);
  const std::filesystem::path work =
      std::filesystem::temp_directory_path() / "branchlab_acceptance";
  std::filesystem::remove_all(work);

  std::vector<std::filesystem::path> scenarios;
  for (const auto& entry : std::filesystem::directory_iterator(scenario_dir)) {
    if (entry.path().extension() == ".scenario") scenarios.push_back(entry.path());
  }
  std::sort(scenarios.begin(), scenarios.end());
  ASSERT_GE(scenarios.size(), 7u);

  for (const auto& scenario : scenarios) {
    const std::string command =
        to_string(parse_scenario(read_file(scenario)).command);
    const std::filesystem::path base = work / scenario.stem();
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"first", "--threads 1"},
        {"second", "--threads 1"},
        {"parallel", "--threads 2"},
    };
    for (const auto& [tag, extra] : runs) {
      const std::filesystem::path out = base / tag;
      const int status =
          run_cli(command + " --scenario " + scenario.string() + " --out-dir " +
                  out.string() + " " + extra);
      EXPECT_EQ(status, 0) << scenario << " (" << tag << ")";
    }
    for (const char* artifact : {"results.csv", "results.json", "plot.svg"}) {
      const auto first = base / "first" / artifact;
      if (!std::filesystem::exists(first)) continue;
      const std::string reference = read_file(first);
      EXPECT_EQ(reference, read_file(base / "second" / artifact))
          << scenario << " " << artifact << " differs across runs";
      EXPECT_EQ(reference, read_file(base / "parallel" / artifact))
          << scenario << " " << artifact << " differs across thread counts";
    }
  }

  // Precondition violations surface as exit 4 at the process boundary.
  EXPECT_EQ(run_cli("validity-joint --q 1/2,1/2 --q-b 1/2,1/2 --n-runs 4 "
                    "--out-dir " + (work / "same_dist").string()),
            4);
}
