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

#include "branchlab/runner.hpp"

#include <string>

#include "gtest/gtest.h"

using namespace branchlab;

namespace {

ResultBundle run_text(const std::string& text, int threads = 1) {
  RunOptions options;
  options.num_threads = threads;
  return run_scenario(parse_scenario(text), options);
}

}  // namespace

TEST(Runner, TypicalityCsvMatchesConcentrationCurve) {
  const ResultBundle bundle = run_text(
      "command = typicality\n"
      "q = 1/2, 1/2\n"
      "N = 4, 16, 64\n"
      "epsilon = 1/10\n");
  EXPECT_EQ(bundle.csv,
            "N,weight_inside,weight_outside,weight_outside_float,mode_class\n"
            "4,3/8,5/8,0.625,2|2\n"
            "16,17875/32768,14893/32768,0.454498291015625,8|8\n"
            "64,8269473576395238067/9223372036854775808,"
            "953898460459537741/9223372036854775808,"
            "0.10342187831608089,32|32\n");
  EXPECT_TRUE(bundle.svg.has_value());
  EXPECT_NE(bundle.svg->find("branchlab plot v1"), std::string::npos);
  EXPECT_EQ(bundle.results.at("results").at("points").size(), 3u);
}

TEST(Runner, TypicalityWithDeltaReportsMinSampleSize) {
  const ResultBundle bundle = run_text(
      "command = typicality\n"
      "q = 1/2, 1/2\n"
      "N = 155\n"
      "epsilon = 1/10\n"
      "delta = 1/100\n");
  EXPECT_EQ(bundle.results.at("results").at("min_sample_size").get<int>(), 155);
}

TEST(Runner, BranchStatsTotalsAreExact) {
  const ResultBundle bundle = run_text(
      "command = branch-stats\n"
      "q = 1/6, 1/3, 1/2\n"
      "N = 4\n");
  const auto& results = bundle.results.at("results");
  EXPECT_EQ(results.at("num_classes").get<int>(), 15);
  EXPECT_EQ(results.at("total_weight").get<std::string>(), "1/1");
  EXPECT_EQ(results.at("total_multiplicity").get<std::string>(), "81");
}

TEST(Runner, ValidityFeasibilityVerdictsInJson) {
  const ResultBundle feasible = run_text(
      "command = validity-feasibility\n"
      "q = 1/2, 1/2\n"
      "N = 4\n");
  EXPECT_TRUE(feasible.results.at("results").at("feasible").get<bool>());
  EXPECT_EQ(feasible.results.at("results").at("achieved_frequency")[0]
                .get<std::string>(),
            "2/1");

  const ResultBundle infeasible = run_text(
      "command = validity-feasibility\n"
      "q = 1/3, 2/3\n"
      "N = 1\n");
  EXPECT_FALSE(infeasible.results.at("results").at("feasible").get<bool>());
  EXPECT_TRUE(infeasible.results.at("results").at("assignment").is_null());
}

TEST(Runner, ValidityJointEmitsVerifiedCertificate) {
  const ResultBundle bundle = run_text(
      "command = validity-joint\n"
      "q = 1/2, 1/2\n"
      "q_b = 1/3, 2/3\n"
      "N = 6\n");
  EXPECT_TRUE(bundle.results.at("results").at("verified").get<bool>());
  const InfeasibilityCertificate cert =
      certificate_from_json(bundle.results.at("results").at("certificate"));
  EXPECT_TRUE(verify_certificate(cert));
  EXPECT_EQ(bundle.csv,
            "outcome,target_a,target_b,equal_validity_frequency\n"
            "1,3/1,2/1,3/1\n"
            "2,3/1,4/1,3/1\n");
}

TEST(Runner, ValidityJointSameDistributionIsAPreconditionError) {
  EXPECT_THROW(run_text("command = validity-joint\n"
                        "q = 1/2, 1/2\n"
                        "q_b = 1/2, 1/2\n"
                        "N = 4\n"),
               SameDistributionError);
}

TEST(Runner, AchievableSetCsv) {
  const ResultBundle bundle = run_text(
      "command = achievable-set\n"
      "n_outcomes = 2\n"
      "N = 1\n"
      "k_cap = 1\n");
  EXPECT_EQ(bundle.csv,
            "f1,f2\n"
            "0/1,1/1\n"
            "1/2,1/2\n"
            "1/1,0/1\n");
  EXPECT_TRUE(bundle.svg.has_value());
}

TEST(Runner, CollapseSampleAggregates) {
  const ResultBundle bundle = run_text(
      "command = collapse-sample\n"
      "q = 1/2, 1/2\n"
      "N = 1000\n"
      "seed = 1\n");
  const auto& results = bundle.results.at("results");
  EXPECT_EQ(results.at("num_runs").get<int>(), 1000);
  EXPECT_TRUE(results.at("chi_square_float").is_number());
  EXPECT_DOUBLE_EQ(results.at("chi_square_critical_95_float").get<double>(), 3.841);
}

TEST(Runner, ChainDemoTranscriptNamesAwareVersions) {
  const ResultBundle bundle = run_text(
      "command = chain-demo\n"
      "q = 1/2, 1/2\n");
  EXPECT_EQ(bundle.results.at("results").at("num_versions").get<int>(), 2);
  EXPECT_TRUE(bundle.results.at("results").at("all_versions_aware").get<bool>());
  EXPECT_TRUE(bundle.results.at("results").at("derived_equals_direct").get<bool>());
  // Two aware observer versions appear in the transcript.
  std::size_t aware_mentions = 0;
  std::size_t cursor = 0;
  const std::string needle = " and is aware of reading ";
  while ((cursor = bundle.summary.find(needle, cursor)) != std::string::npos) {
    ++aware_mentions;
    cursor += needle.size();
  }
  EXPECT_EQ(aware_mentions, 4u);  // two in the rule table, two in the state
  EXPECT_EQ(bundle.csv,
            "version,aware,weight\n"
            "1,1,1/2\n"
            "2,1,1/2\n");
}

TEST(Runner, BundlesAreByteIdenticalAcrossRunsAndThreadCounts) {
  const std::string scenario =
      "command = typicality\n"
      "q = 1/6, 1/3, 1/2\n"
      "N = 4, 16\n"
      "epsilon = 1/10\n";
  const ResultBundle first = run_text(scenario, 1);
  const ResultBundle again = run_text(scenario, 1);
  const ResultBundle threaded = run_text(scenario, 2);
  EXPECT_EQ(first.csv, again.csv);
  EXPECT_EQ(first.csv, threaded.csv);
  EXPECT_EQ(first.results.dump(2), again.results.dump(2));
  EXPECT_EQ(first.results.dump(2), threaded.results.dump(2));
  EXPECT_EQ(first.svg, threaded.svg);
}

TEST(Runner, JsonRoundTripReparsesToSameValues) {
  const ResultBundle bundle = run_text(
      "command = typicality\n"
      "q = 1/2, 1/2\n"
      "N = 4, 16\n"
      "epsilon = 1/10\n");
  const nlohmann::json reparsed = nlohmann::json::parse(bundle.results.dump(2));
  EXPECT_EQ(reparsed, bundle.results);
  EXPECT_EQ(rational_from_json(reparsed.at("results").at("points")[0]
                                   .at("weight_outside")),
            Rational(5, 8));
  EXPECT_EQ(rationals_from_json(reparsed.at("inputs").at("q")),
            (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
}

TEST(Runner, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::parse), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::schema), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::not_normalized), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::cap_exceeded), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::same_distribution), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::expected_count_too_small), 4);
}
