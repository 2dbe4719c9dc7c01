#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "carath/bounds.hpp"
#include "carath/experiment.hpp"
#include "carath/field.hpp"
#include "carath/solver.hpp"
#include "carath/topology.hpp"

namespace carath::detail {

/// Typed view of a config; every accessor falls back to the table default and
/// reports problems against the line (or option) the value came from.
class Params {
 public:
  explicit Params(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const ExperimentSpec& spec() const { return *spec_; }
  std::uint64_t seed() const { return cfg_.seed; }

  /// True when the value (given or default) is non-empty.
  bool present(std::string_view key) const;
  double number(std::string_view key) const;
  long integer(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::string text(std::string_view key) const;
  FieldDescriptor field(std::string_view key) const;
  std::vector<FieldDescriptor> fields(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;
  Interval interval(std::string_view key) const;
  std::vector<Interval> intervals(std::string_view key) const;
  std::vector<double> point(std::string_view key) const;
  std::vector<std::vector<double>> points(std::string_view key) const;
  /// Comma-separated words.
  std::vector<std::string> words(std::string_view key) const;

  [[noreturn]] void fail(std::string_view key, const std::string& msg) const;

  /// Parses every key of the table once (type check).
  void check_types() const;

  StepPolicy policy() const;
  Resolution resolution() const;
  BoundGrid grid() const;
  SearchOptions search() const;
  MetricConfig metric() const;
  SeminormKind kind() const;

 private:
  struct Raw {
    std::string value;
    int line = 0;
    std::string origin;
  };
  Raw raw(std::string_view key) const;
  FieldDescriptor resolve_field(std::string_view key, const std::string& ref) const;

  const ExperimentConfig& cfg_;
  const ExperimentSpec* spec_;
};

/// Experiment bodies live in runners.cpp.
struct Runner {
  std::string name;
  void (*check)(const Params&);
  ExperimentResult (*run)(const Params&);
};
const std::vector<Runner>& runners();

/// Number with an optional `p/q` rational form; nullopt when malformed.
std::optional<double> parse_number(std::string_view s);

}  // namespace carath::detail
