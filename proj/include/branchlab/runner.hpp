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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "branchlab/branch_classes.hpp"
#include "branchlab/chain.hpp"
#include "branchlab/collapse.hpp"
#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/scenario.hpp"
#include "branchlab/serialization.hpp"
#include "branchlab/typicality.hpp"
#include "branchlab/validity.hpp"

namespace branchlab {

struct RunOptions {
  int num_threads = 1;
  std::int64_t class_cap = kDefaultClassCap;
};

/// Everything one scenario produces: the canonical JSON document, the CSV
/// table, an optional plot, and the human-readable summary printed to
/// stdout. File bytes are a pure function of the scenario and nothing else.
struct ResultBundle {
  nlohmann::json results;
  std::string csv;
  std::optional<std::string> svg;
  std::string summary;
};

namespace detail {

// CSV fields never contain commas or quotes: rationals are "p/q", classes
// use "|" between counts, everything else is a plain number.
inline std::string csv_class_key(const BranchClass& cls) {
  std::string out;
  for (int j = 0; j < cls.num_outcomes(); ++j) {
    if (j > 0) out += "|";
    out += std::to_string(cls.count(j));
  }
  return out;
}

inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline std::string format_coordinate(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

inline std::string format_axis_value(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

inline constexpr const char kSvgGeneratorTag[] = "<!-- branchlab plot v1 -->";

/// Minimal deterministic SVG: one polyline or point cloud on a framed
/// canvas, corner labels for the data range.
inline std::string render_svg(const std::string& title,
                              const std::vector<std::pair<double, double>>& points,
                              const std::string& x_label,
                              const std::string& y_label, bool connect) {
  constexpr double width = 640, height = 480;
  constexpr double left = 70, right = 610, top = 50, bottom = 430;
  double x_min = points.front().first, x_max = points.front().first;
  double y_min = points.front().second, y_max = points.front().second;
  for (const auto& [x, y] : points) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;
  const double y_span = y_max > y_min ? y_max - y_min : 1.0;
  const auto px = [&](double x) {
    return left + (x - x_min) / x_span * (right - left);
  };
  const auto py = [&](double y) {
    return bottom - (y - y_min) / y_span * (bottom - top);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         format_axis_value(width) + "\" height=\"" + format_axis_value(height) +
         "\" viewBox=\"0 0 640 480\">\n";
  svg += std::string(kSvgGeneratorTag) + "\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  svg += "<line x1=\"70\" y1=\"430\" x2=\"610\" y2=\"430\" stroke=\"black\"/>\n";
  svg += "<line x1=\"70\" y1=\"50\" x2=\"70\" y2=\"430\" stroke=\"black\"/>\n";
  svg += "<text x=\"340\" y=\"465\" text-anchor=\"middle\" font-size=\"12\">" +
         x_label + "</text>\n";
  svg += "<text x=\"20\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" "
         "transform=\"rotate(-90 20 240)\">" + y_label + "</text>\n";
  svg += "<text x=\"70\" y=\"445\" font-size=\"10\">" + format_axis_value(x_min) +
         "</text>\n";
  svg += "<text x=\"610\" y=\"445\" text-anchor=\"end\" font-size=\"10\">" +
         format_axis_value(x_max) + "</text>\n";
  svg += "<text x=\"65\" y=\"433\" text-anchor=\"end\" font-size=\"10\">" +
         format_axis_value(y_min) + "</text>\n";
  svg += "<text x=\"65\" y=\"55\" text-anchor=\"end\" font-size=\"10\">" +
         format_axis_value(y_max) + "</text>\n";
  if (connect && points.size() > 1) {
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i > 0) svg += " ";
      svg += format_coordinate(px(points[i].first)) + "," +
             format_coordinate(py(points[i].second));
    }
    svg += "\"/>\n";
  }
  for (const auto& [x, y] : points) {
    svg += "<circle cx=\"" + format_coordinate(px(x)) + "\" cy=\"" +
           format_coordinate(py(y)) + "\" r=\"3\" fill=\"firebrick\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline nlohmann::json state_to_json(const TensorState& state) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [basis, weight] : state.terms()) {
    nlohmann::json labels = nlohmann::json::array();
    for (const Label& label : basis) {
      labels.push_back({{"role", to_string(label.role)}, {"tag", label.tag}});
    }
    terms.push_back({{"labels", std::move(labels)},
                     {"weight", rational_to_json(weight)}});
  }
  return terms;
}

inline nlohmann::json scenario_inputs_to_json(const ScenarioConfig& config) {
  nlohmann::json inputs;
  inputs["command"] = to_string(config.command);
  inputs["name"] = config.name;
  if (!config.q.empty()) inputs["q"] = rationals_to_json(config.q);
  if (!config.q_b.empty()) inputs["q_b"] = rationals_to_json(config.q_b);
  if (config.n_outcomes) inputs["n_outcomes"] = *config.n_outcomes;
  if (!config.run_counts.empty()) inputs["N"] = config.run_counts;
  if (config.epsilon) inputs["epsilon"] = rational_to_json(*config.epsilon);
  if (config.delta) inputs["delta"] = rational_to_json(*config.delta);
  if (config.seed) inputs["seed"] = *config.seed;
  if (config.k_cap) inputs["k_cap"] = *config.k_cap;
  return inputs;
}

inline ResultBundle run_typicality(const ScenarioConfig& config,
                                   const RunOptions& options) {
  const OutcomeDistribution dist = validate_distribution(config.q);
  ResultBundle bundle;
  bundle.csv = "N,weight_inside,weight_outside,weight_outside_float,mode_class\n";
  nlohmann::json points = nlohmann::json::array();
  std::vector<std::pair<double, double>> plot_points;
  for (std::int64_t num_runs : config.run_counts) {
    const TypicalityReport report = weight_in_window(
        dist, num_runs, *config.epsilon, options.class_cap, options.num_threads);
    const double outside_float = to_double(report.weight_outside);
    bundle.csv += std::to_string(num_runs) + "," +
                  to_fraction_string(report.weight_inside) + "," +
                  to_fraction_string(report.weight_outside) + "," +
                  format_double(outside_float) + "," +
                  csv_class_key(report.mode_class) + "\n";
    points.push_back({{"N", num_runs},
                      {"mode_class", report.mode_class.counts()},
                      {"weight_inside", rational_to_json(report.weight_inside)},
                      {"weight_outside", rational_to_json(report.weight_outside)},
                      {"weight_outside_float", outside_float}});
    plot_points.emplace_back(static_cast<double>(num_runs), outside_float);
    bundle.summary += "N=" + std::to_string(num_runs) + ": weight outside |m/N - q| <= " +
                      to_fraction_string(*config.epsilon) + " window is " +
                      to_fraction_string(report.weight_outside) + " (~" +
                      format_axis_value(outside_float) + "), mode class " +
                      branchlab::to_string(report.mode_class) + "\n";
  }
  nlohmann::json results;
  results["points"] = std::move(points);
  if (config.delta) {
    const auto reached = min_sample_size(dist, *config.epsilon, *config.delta,
                                         config.run_counts.back(),
                                         options.class_cap, options.num_threads);
    results["min_sample_size"] =
        reached ? nlohmann::json(*reached) : nlohmann::json(nullptr);
    bundle.summary += reached ? "smallest N with outside weight <= " +
                                    to_fraction_string(*config.delta) + ": " +
                                    std::to_string(*reached) + "\n"
                              : "no N up to " +
                                    std::to_string(config.run_counts.back()) +
                                    " pushes the outside weight under " +
                                    to_fraction_string(*config.delta) + "\n";
  }
  bundle.results = std::move(results);
  if (config.run_counts.size() >= 2) {
    bundle.svg = render_svg("branch weight outside the frequency window",
                            plot_points, "N (runs)", "weight outside", true);
  }
  return bundle;
}

inline ResultBundle run_branch_stats(const ScenarioConfig& config,
                                     const RunOptions& options) {
  const OutcomeDistribution dist = validate_distribution(config.q);
  const std::int64_t num_runs = config.run_counts.front();
  const BranchEnsemble ensemble =
      enumerate_classes(dist.num_outcomes(), num_runs, options.class_cap);
  ResultBundle bundle;
  bundle.csv = "class,multiplicity,weight,weight_float\n";
  nlohmann::json classes = nlohmann::json::array();
  Rational total_weight(0);
  BigInt total_multiplicity(0);
  for (const BranchClass& cls : ensemble.classes) {
    const BigInt multiplicity = class_multiplicity(cls);
    const Rational weight = class_weight(cls, dist);
    total_weight += weight;
    total_multiplicity += multiplicity;
    bundle.csv += csv_class_key(cls) + "," + multiplicity.str() + "," +
                  to_fraction_string(weight) + "," +
                  format_double(to_double(weight)) + "\n";
    classes.push_back({{"class", cls.counts()},
                       {"multiplicity", multiplicity.str()},
                       {"weight", rational_to_json(weight)},
                       {"weight_float", to_double(weight)}});
  }
  bundle.results["classes"] = std::move(classes);
  bundle.results["num_classes"] = ensemble.classes.size();
  bundle.results["total_multiplicity"] = total_multiplicity.str();
  bundle.results["total_weight"] = rational_to_json(total_weight);
  bundle.summary += std::to_string(ensemble.classes.size()) + " classes for (n=" +
                    std::to_string(dist.num_outcomes()) + ", N=" +
                    std::to_string(num_runs) + "); total multiplicity " +
                    total_multiplicity.str() + ", total weight " +
                    to_fraction_string(total_weight) + "\n";
  return bundle;
}

inline ResultBundle run_validity_feasibility(const ScenarioConfig& config,
                                             const RunOptions& options) {
  const OutcomeDistribution dist = validate_distribution(config.q);
  const std::int64_t num_runs = config.run_counts.front();
  const auto assignment = born_feasibility(dist, num_runs, options.class_cap);
  ResultBundle bundle;
  bundle.csv = "class,multiplicity,valid_count\n";
  nlohmann::json results;
  nlohmann::json target = nlohmann::json::array();
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    target.push_back(rational_to_json(Rational(num_runs) * dist.weight(j)));
  }
  results["target"] = std::move(target);
  results["feasible"] = assignment.has_value();
  if (assignment) {
    nlohmann::json marked = nlohmann::json::array();
    for (std::size_t c = 0; c < assignment->classes().size(); ++c) {
      const BigInt& k = assignment->valid_counts()[c];
      if (k.is_zero()) continue;
      const BranchClass& cls = assignment->classes()[c];
      bundle.csv += csv_class_key(cls) + "," + class_multiplicity(cls).str() +
                    "," + k.str() + "\n";
      marked.push_back({{"class", cls.counts()}, {"valid_count", k.str()}});
    }
    results["assignment"] = std::move(marked);
    results["achieved_frequency"] =
        rationals_to_json(weighted_average_counts(*assignment));
    bundle.summary += "feasible: a validity assignment reaches the Born target exactly\n";
  } else {
    results["assignment"] = nullptr;
    results["achieved_frequency"] = nullptr;
    bundle.summary +=
        "infeasible: no admissible validity assignment reaches the Born target\n";
  }
  bundle.results = std::move(results);
  return bundle;
}

inline ResultBundle run_validity_joint(const ScenarioConfig& config,
                                       const RunOptions& options) {
  (void)options;
  const OutcomeDistribution dist_a = validate_distribution(config.q);
  const OutcomeDistribution dist_b = validate_distribution(config.q_b);
  const std::int64_t num_runs = config.run_counts.front();
  const InfeasibilityCertificate cert =
      joint_infeasibility(dist_a, dist_b, num_runs);
  const bool verified = verify_certificate(cert);
  ResultBundle bundle;
  bundle.csv = "outcome,target_a,target_b,equal_validity_frequency\n";
  for (int j = 0; j < cert.num_outcomes; ++j) {
    bundle.csv += std::to_string(j + 1) + "," +
                  to_fraction_string(cert.target_a[static_cast<std::size_t>(j)]) + "," +
                  to_fraction_string(cert.target_b[static_cast<std::size_t>(j)]) + "," +
                  to_fraction_string(cert.equal_validity_freq[static_cast<std::size_t>(j)]) +
                  "\n";
  }
  bundle.results["certificate"] = certificate_to_json(cert);
  bundle.results["verified"] = verified;
  bundle.summary +=
      "certificate: one coefficient-independent assignment cannot average to both " +
      std::string("N*q_A and N*q_B (verified: ") + (verified ? "yes" : "no") + ")\n";
  return bundle;
}

inline ResultBundle run_achievable_set(const ScenarioConfig& config,
                                       const RunOptions& options) {
  const int n = config.n_outcomes ? *config.n_outcomes
                                  : static_cast<int>(config.q.size());
  const std::int64_t num_runs = config.run_counts.front();
  const std::vector<FrequencyVector> vectors =
      achievable_set(n, num_runs, *config.k_cap, options.class_cap);
  ResultBundle bundle;
  std::string header;
  for (int j = 0; j < n; ++j) {
    header += (j > 0 ? ",f" : "f") + std::to_string(j + 1);
  }
  bundle.csv = header + "\n";
  nlohmann::json list = nlohmann::json::array();
  std::vector<std::pair<double, double>> plot_points;
  for (const FrequencyVector& vec : vectors) {
    std::string row;
    for (int j = 0; j < n; ++j) {
      if (j > 0) row += ",";
      row += to_fraction_string(vec[static_cast<std::size_t>(j)]);
    }
    bundle.csv += row + "\n";
    list.push_back(rationals_to_json(vec));
    if (n == 2) {
      plot_points.emplace_back(to_double(vec[0]), to_double(vec[1]));
    }
  }
  bundle.results["count"] = vectors.size();
  bundle.results["vectors"] = std::move(list);
  bundle.summary += std::to_string(vectors.size()) +
                    " distinct frequency vectors reachable at (n=" +
                    std::to_string(n) + ", N=" + std::to_string(num_runs) +
                    ", k_cap=" + std::to_string(*config.k_cap) +
                    "); no distribution entered the computation\n";
  if (n == 2 && !plot_points.empty()) {
    bundle.svg = render_svg("achievable average counts", plot_points,
                            "outcome 1 average", "outcome 2 average", false);
  }
  return bundle;
}

inline ResultBundle run_collapse_sample(const ScenarioConfig& config,
                                        const RunOptions& options) {
  (void)options;
  const OutcomeDistribution dist = validate_distribution(config.q);
  const std::int64_t num_runs = config.run_counts.front();
  const SampleRun run = sample_runs(dist, num_runs, *config.seed);
  const std::vector<Rational> frequencies =
      empirical_frequencies(run, dist.num_outcomes());
  ResultBundle bundle;
  bundle.csv = "outcome,count,frequency,expected\n";
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    const Rational count = frequencies[static_cast<std::size_t>(j)] * num_runs;
    bundle.csv += std::to_string(j + 1) + "," + numerator(count).str() + "," +
                  to_fraction_string(frequencies[static_cast<std::size_t>(j)]) +
                  "," + to_fraction_string(Rational(num_runs) * dist.weight(j)) +
                  "\n";
  }
  bundle.results["frequencies"] = rationals_to_json(frequencies);
  bundle.results["num_runs"] = num_runs;
  bundle.results["seed"] = run.seed;

  bool chi_applicable = true;
  for (int j = 0; j < dist.num_outcomes(); ++j) {
    chi_applicable = chi_applicable && Rational(num_runs) * dist.weight(j) >= 5;
  }
  const int degrees = dist.num_outcomes() - 1;
  if (chi_applicable && degrees >= 1) {
    const double statistic = chi_square_statistic(run, dist);
    bundle.results["chi_square_float"] = statistic;
    if (degrees <= 9) {
      const double critical = chi_square_critical_95(degrees);
      bundle.results["chi_square_critical_95_float"] = critical;
      bundle.results["chi_square_exceeds_critical"] = statistic > critical;
    } else {
      bundle.results["chi_square_critical_95_float"] = nullptr;
      bundle.results["chi_square_exceeds_critical"] = nullptr;
    }
    bundle.summary += "chi-square " + format_axis_value(statistic) + " on " +
                      std::to_string(degrees) + " degree(s) of freedom\n";
  } else {
    bundle.results["chi_square_float"] = nullptr;
    bundle.results["chi_square_critical_95_float"] = nullptr;
    bundle.results["chi_square_exceeds_critical"] = nullptr;
    bundle.summary += "chi-square skipped: an expected count is below 5\n";
  }
  bundle.summary += "sampled " + std::to_string(num_runs) + " runs with seed " +
                    std::to_string(run.seed) + "\n";
  return bundle;
}

inline ResultBundle run_chain_demo(const ScenarioConfig& config,
                                   const RunOptions& options) {
  (void)options;
  const OutcomeDistribution dist = validate_distribution(config.q);
  const EqualValidityReport report = equal_validity_demonstration(dist);
  ResultBundle bundle;
  bundle.csv = "version,aware,weight\n";
  for (const auto& [basis, weight] : report.chain.after.terms()) {
    int version = 0;
    bool aware = false;
    for (const Label& label : basis) {
      if (label.role == FactorRole::observer) {
        version = observer_version(label).value_or(0);
        aware = observer_is_aware(label);
      }
    }
    bundle.csv += std::to_string(version) + "," + (aware ? "1" : "0") + "," +
                  to_fraction_string(weight) + "\n";
  }
  bundle.results["after"] = state_to_json(report.chain.after);
  bundle.results["all_versions_aware"] = report.all_versions_aware;
  bundle.results["before"] = state_to_json(report.chain.before);
  bundle.results["derived_equals_direct"] = report.states_match;
  bundle.results["num_versions"] = report.num_versions;
  bundle.results["weight_sum"] = rational_to_json(report.weight_sum);

  bundle.summary += "state after detection, before the observer looks:\n";
  for (const auto& [basis, weight] : report.chain.before.terms()) {
    std::string line = "  ";
    for (const Label& label : basis) line += "|" + label.tag + "> ";
    bundle.summary += line + " weight " + to_fraction_string(weight) + "\n";
  }
  bundle.summary += "the look step rewrites each term independently:\n";
  for (const auto& [from, to] : report.chain.look.mappings()) {
    std::string line = "  ";
    for (const Label& label : from) line += "|" + label.tag + "> ";
    line += " -> ";
    for (const Label& label : to) line += "|" + label.tag + "> ";
    bundle.summary += line + "\n";
  }
  bundle.summary += "state after the observer looks:\n";
  for (const auto& [basis, weight] : report.chain.after.terms()) {
    std::string line = "  ";
    for (const Label& label : basis) line += "|" + label.tag + "> ";
    bundle.summary += line + " weight " + to_fraction_string(weight) + "\n";
  }
  bundle.summary += "observer versions: " + std::to_string(report.num_versions) +
                    ", all aware: " + (report.all_versions_aware ? "yes" : "no") +
                    ", derived state equals direct construction: " +
                    (report.states_match ? "yes" : "no") + ", weight sum " +
                    to_fraction_string(report.weight_sum) + "\n";
  return bundle;
}

}  // namespace detail

/// Dispatches a validated scenario to its module and assembles the result
/// bundle. Identical scenarios produce byte-identical bundles for every
/// thread count.
inline ResultBundle run_scenario(const ScenarioConfig& config,
                                 const RunOptions& options = {}) {
  ResultBundle bundle;
  switch (config.command) {
    case Command::typicality:
      bundle = detail::run_typicality(config, options);
      break;
    case Command::branch_stats:
      bundle = detail::run_branch_stats(config, options);
      break;
    case Command::validity_feasibility:
      bundle = detail::run_validity_feasibility(config, options);
      break;
    case Command::validity_joint:
      bundle = detail::run_validity_joint(config, options);
      break;
    case Command::achievable_set:
      bundle = detail::run_achievable_set(config, options);
      break;
    case Command::collapse_sample:
      bundle = detail::run_collapse_sample(config, options);
      break;
    case Command::chain_demo:
      bundle = detail::run_chain_demo(config, options);
      break;
  }
  nlohmann::json document;
  document["command"] = to_string(config.command);
  document["generator"] = {{"name", "branchlab"}, {"format_version", 1}};
  document["inputs"] = detail::scenario_inputs_to_json(config);
  document["name"] = config.name;
  document["results"] = std::move(bundle.results);
  bundle.results = std::move(document);
  return bundle;
}

/// Writes results.csv, results.json, and plot.svg (when present) under
/// `out_dir`, creating the directory if needed.
inline void write_result_files(const ResultBundle& bundle,
                               const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    csv << bundle.csv;
  }
  {
    std::ofstream json_file(dir / "results.json", std::ios::binary);
    json_file << bundle.results.dump(2) << "\n";
  }
  if (bundle.svg) {
    std::ofstream svg(dir / "plot.svg", std::ios::binary);
    svg << *bundle.svg;
  }
}

}  // namespace branchlab
