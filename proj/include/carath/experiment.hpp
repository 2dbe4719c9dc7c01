#pragma once

// Config-driven experiment runner behind the command line tool.
//
// A config is line based: `key = value`, `#` starts a comment. Every config
// names its `schema_version` (currently 1) and an `experiment`; the keys an
// experiment accepts come from one table (experiment_specs) that also drives
// the command line options. Fields are declared with `field.<name> = <sexpr>`
// and referenced by name, by a built-in `@name`, or written inline.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carath {

enum class ValueType {
  number,
  integer,
  boolean,
  choice,
  text,
  field,
  field_list,
  number_list,
  interval,
  interval_list,
  point,
  point_list,
};

const char* to_string(ValueType t);

struct KeySpec {
  std::string key;
  ValueType type = ValueType::number;
  /// Used when the key is absent; empty with `required` means no default.
  std::string default_value;
  std::string help;
  std::vector<std::string> choices;
  bool required = false;
};

struct ExperimentSpec {
  std::string name;
  std::string summary;
  std::vector<KeySpec> keys;

  const KeySpec* find(std::string_view key) const;
};

const std::vector<ExperimentSpec>& experiment_specs();
/// nullptr when unknown.
const ExperimentSpec* find_experiment(std::string_view name);

/// Value as written plus where it came from (config line, or 0 with an
/// origin such as "--dt" for command line values).
struct ConfigEntry {
  std::string value;
  int line = 0;
  std::string origin;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output = "out";
  std::map<std::string, ConfigEntry> fields;
  std::map<std::string, ConfigEntry> values;
  /// Anchors of the reserved keys, for messages.
  std::map<std::string, ConfigEntry> reserved;
};

/// Parses and checks keys against the experiment's table. ParseError with the
/// offending line for syntax errors, duplicates, unknown keys and bad types.
ExperimentConfig parse_config(std::string_view text);

/// Sets or replaces a value given on the command line; checked by validate.
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value, const std::string& origin);

/// Resolves every key (types, field references, dimensions, ranges) without
/// computing anything. Throws ParseError (config lines) or ConfigError.
void validate(const ExperimentConfig& cfg);

/// Canonical text of a config; parse_config(print_config(c)) gives c back.
std::string print_config(const ExperimentConfig& cfg);

struct Artifact {
  std::string name;
  std::string content;
};

struct VerdictLine {
  enum class Kind { pass, fail, info };
  Kind kind = Kind::info;
  std::string name;
  std::string detail;
};

struct ExperimentResult {
  std::vector<Artifact> artifacts;
  std::vector<VerdictLine> verdicts;

  bool pass() const;
  /// One `PASS|FAIL|INFO name: detail` line per verdict.
  std::string summary() const;
};

/// Validates, then computes every artifact in memory.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the artifacts and summary.txt under `dir` (created if needed).
void write_result(const ExperimentResult& result, const std::string& dir);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();
/// Config text of a preset; IndexError when unknown.
std::string preset_text(std::string_view name);

}  // namespace carath
