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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "branchlab/distribution.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/rational.hpp"

namespace branchlab {

enum class Command {
  typicality,
  branch_stats,
  validity_feasibility,
  validity_joint,
  achievable_set,
  collapse_sample,
  chain_demo,
};

inline std::string to_string(Command command) {
  switch (command) {
    case Command::typicality: return "typicality";
    case Command::branch_stats: return "branch-stats";
    case Command::validity_feasibility: return "validity-feasibility";
    case Command::validity_joint: return "validity-joint";
    case Command::achievable_set: return "achievable-set";
    case Command::collapse_sample: return "collapse-sample";
    default: return "chain-demo";
  }
}

inline std::optional<Command> parse_command(std::string_view text) {
  for (Command command :
       {Command::typicality, Command::branch_stats, Command::validity_feasibility,
        Command::validity_joint, Command::achievable_set, Command::collapse_sample,
        Command::chain_demo}) {
    if (text == to_string(command)) return command;
  }
  return std::nullopt;
}

/// Raw field values as read from scenario text or command-line flags,
/// before any per-command completeness check.
struct ScenarioFields {
  std::optional<std::string> name;
  std::optional<Command> command;
  std::optional<std::vector<Rational>> q;
  std::optional<std::vector<Rational>> q_b;
  std::optional<int> n_outcomes;
  std::optional<std::vector<std::int64_t>> run_counts;
  std::optional<Rational> epsilon;
  std::optional<Rational> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> k_cap;
};

/// A validated experiment description: the command plus exactly the fields
/// that command consumes, with q already checked as a distribution.
struct ScenarioConfig {
  std::string name;
  Command command = Command::typicality;
  std::vector<Rational> q;
  std::vector<Rational> q_b;
  std::optional<int> n_outcomes;
  std::vector<std::int64_t> run_counts;
  std::optional<Rational> epsilon;
  std::optional<Rational> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> k_cap;
};

namespace detail {

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

inline std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) {
      items.push_back(trim(value.substr(start)));
      break;
    }
    items.push_back(trim(value.substr(start, comma - start)));
    start = comma + 1;
  }
  return items;
}

}  // namespace detail

/// Comma-separated rationals, e.g. "1/6, 1/3, 1/2".
inline std::vector<Rational> parse_rational_values(std::string_view text) {
  std::vector<Rational> out;
  for (std::string_view item : detail::split_list(text)) {
    out.push_back(parse_rational(item));
  }
  return out;
}

inline std::int64_t parse_positive_value(std::string_view text, const char* field) {
  const auto fail = [&]() -> std::int64_t {
    throw ParseError("bad " + std::string(field) + " '" + std::string(text) + "'");
  };
  if (text.empty() || text.size() > 18) return fail();
  std::int64_t out = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return fail();
    out = out * 10 + (ch - '0');
  }
  if (out < 1) {
    throw ParseError(std::string(field) + " must be positive, got '" +
                     std::string(text) + "'");
  }
  return out;
}

/// Comma-separated positive integers, e.g. "4, 16, 64".
inline std::vector<std::int64_t> parse_run_values(std::string_view text) {
  std::vector<std::int64_t> out;
  for (std::string_view item : detail::split_list(text)) {
    out.push_back(parse_positive_value(item, "N"));
  }
  return out;
}

inline std::uint64_t parse_seed_value(std::string_view text) {
  const auto fail = [&]() -> std::uint64_t {
    throw ParseError("bad seed '" + std::string(text) + "'");
  };
  if (text.empty() || text.size() > 20) return fail();
  std::uint64_t out = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return fail();
    const std::uint64_t digit = static_cast<std::uint64_t>(ch - '0');
    if (out > (UINT64_MAX - digit) / 10) {
      throw ParseError("seed overflows 64 bits");
    }
    out = out * 10 + digit;
  }
  return out;
}

namespace detail {

template <typename Fn>
auto at_line(int line, Fn&& parse) {
  try {
    return parse();
  } catch (const ParseError& error) {
    throw ParseError("line " + std::to_string(line) + ": " + error.what());
  }
}

}  // namespace detail

/// Reads the flat key=value scenario format. Lines are `key = value`; blank
/// lines and `#` comments are ignored. Unknown and duplicate keys are
/// rejected here; which keys a command requires is checked by
/// validate_scenario.
inline ScenarioFields parse_scenario_fields(std::string_view text) {
  ScenarioFields fields;
  std::set<std::string> seen;
  int line_number = 0;
  std::size_t cursor = 0;
  while (cursor <= text.size()) {
    const std::size_t newline = text.find('\n', cursor);
    std::string_view line = text.substr(
        cursor, newline == std::string_view::npos ? std::string_view::npos
                                                  : newline - cursor);
    cursor = newline == std::string_view::npos ? text.size() + 1 : newline + 1;
    ++line_number;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t equals = line.find('=');
    if (equals == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_number) +
                       ": expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, equals)));
    const std::string_view value = detail::trim(line.substr(equals + 1));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_number) + ": empty key");
    }
    if (value.empty()) {
      throw ParseError("line " + std::to_string(line_number) +
                       ": empty value for '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw SchemaError("duplicate key '" + key + "'");
    }

    if (key == "name") {
      fields.name = std::string(value);
    } else if (key == "command") {
      fields.command = parse_command(value);
      if (!fields.command) {
        throw ParseError("line " + std::to_string(line_number) +
                         ": unknown command '" + std::string(value) + "'");
      }
    } else if (key == "q") {
      fields.q = detail::at_line(line_number,
                                 [&] { return parse_rational_values(value); });
    } else if (key == "q_b") {
      fields.q_b = detail::at_line(line_number,
                                   [&] { return parse_rational_values(value); });
    } else if (key == "n_outcomes") {
      fields.n_outcomes = static_cast<int>(detail::at_line(
          line_number, [&] { return parse_positive_value(value, "n_outcomes"); }));
    } else if (key == "N") {
      fields.run_counts =
          detail::at_line(line_number, [&] { return parse_run_values(value); });
    } else if (key == "epsilon" || key == "delta") {
      const Rational parsed =
          detail::at_line(line_number, [&] { return parse_rational(value); });
      (key == "epsilon" ? fields.epsilon : fields.delta) = parsed;
    } else if (key == "seed") {
      fields.seed =
          detail::at_line(line_number, [&] { return parse_seed_value(value); });
    } else if (key == "k_cap") {
      fields.k_cap = detail::at_line(
          line_number, [&] { return parse_positive_value(value, "k_cap"); });
    } else {
      throw SchemaError("unknown key '" + key + "'");
    }
  }
  return fields;
}

/// Applies the per-command schema: every required field present, no field
/// the command does not consume, values in range, q a valid distribution.
inline ScenarioConfig validate_scenario(const ScenarioFields& fields) {
  if (!fields.command) throw SchemaError("missing required field 'command'");
  const Command command = *fields.command;

  struct FieldRule {
    const char* key;
    bool present;
    bool required;
    bool allowed;
  };
  const bool needs_q = command != Command::achievable_set;
  const bool q_allowed = true;
  const std::vector<FieldRule> rules = {
      {"q", fields.q.has_value(), needs_q, q_allowed},
      {"q_b", fields.q_b.has_value(), command == Command::validity_joint,
       command == Command::validity_joint},
      {"n_outcomes", fields.n_outcomes.has_value(), false,
       command == Command::achievable_set},
      {"N", fields.run_counts.has_value(), command != Command::chain_demo,
       command != Command::chain_demo},
      {"epsilon", fields.epsilon.has_value(), command == Command::typicality,
       command == Command::typicality},
      {"delta", fields.delta.has_value(), false, command == Command::typicality},
      {"seed", fields.seed.has_value(), command == Command::collapse_sample,
       command == Command::collapse_sample},
      {"k_cap", fields.k_cap.has_value(), command == Command::achievable_set,
       command == Command::achievable_set},
  };
  for (const FieldRule& rule : rules) {
    if (rule.required && !rule.present) {
      throw SchemaError("command '" + to_string(command) +
                        "' requires field '" + rule.key + "'");
    }
    if (rule.present && !rule.allowed) {
      throw SchemaError("command '" + to_string(command) +
                        "' does not take field '" + rule.key + "'");
    }
  }

  ScenarioConfig config;
  config.command = command;
  config.name = fields.name.value_or(to_string(command));

  if (command == Command::achievable_set) {
    if (fields.n_outcomes && fields.q) {
      throw SchemaError("give either 'n_outcomes' or 'q', not both");
    }
    if (!fields.n_outcomes && !fields.q) {
      throw SchemaError("command 'achievable-set' requires 'n_outcomes' (or 'q')");
    }
  }
  if (fields.q) {
    config.q = validate_distribution(*fields.q).weights();
  }
  if (fields.q_b) {
    config.q_b = validate_distribution(*fields.q_b).weights();
  }
  config.n_outcomes = fields.n_outcomes;

  if (fields.run_counts) {
    config.run_counts = *fields.run_counts;
    if (config.run_counts.empty()) {
      throw SchemaError("field 'N' must hold at least one value");
    }
    if (command == Command::typicality) {
      for (std::size_t i = 1; i < config.run_counts.size(); ++i) {
        if (config.run_counts[i] <= config.run_counts[i - 1]) {
          throw SchemaError("field 'N' must be strictly ascending");
        }
      }
    } else if (config.run_counts.size() != 1) {
      throw SchemaError("command '" + to_string(command) +
                        "' takes a single N");
    }
  }

  if (fields.epsilon && *fields.epsilon <= 0) {
    throw SchemaError("epsilon must be positive");
  }
  if (fields.delta && (*fields.delta <= 0 || *fields.delta >= 1)) {
    throw SchemaError("delta must lie strictly between 0 and 1");
  }
  config.epsilon = fields.epsilon;
  config.delta = fields.delta;
  config.seed = fields.seed;
  config.k_cap = fields.k_cap;
  return config;
}

/// Full parse of scenario text: field syntax plus per-command schema.
inline ScenarioConfig parse_scenario(std::string_view text) {
  return validate_scenario(parse_scenario_fields(text));
}

}  // namespace branchlab
