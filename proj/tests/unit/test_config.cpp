#include <doctest.h>

#include <algorithm>

#include "carath/errors.hpp"
#include "carath/experiment.hpp"

using namespace carath;

namespace {

int parse_error_line(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

int validate_error_line(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

const char* solve_cfg =
    "schema_version = 1\n"
    "experiment = solve\n"
    "# comment\n"
    "field.lin = (linear 1 1 1)\n"
    "f = lin\n"
    "x0 = 1\n"
    "t1 = 1/2   # rational\n";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("a well-formed config parses and validates") {
    const auto cfg = parse_config(solve_cfg);
    CHECK(cfg.experiment == "solve");
    CHECK(cfg.seed == 0);
    CHECK(cfg.output == "out");
    CHECK(cfg.values.at("t1").value == "1/2");
    CHECK(cfg.values.at("t1").line == 7);
    CHECK_NOTHROW(validate(cfg));
  }

  TEST_CASE("print_config round trips") {
    auto cfg = parse_config(solve_cfg);
    set_option(cfg, "dt", "1e-4", "--dt");
    const auto text = print_config(cfg);
    const auto again = parse_config(text);
    CHECK(print_config(again) == text);
    CHECK(again.values.at("dt").value == "1e-4");
  }

  TEST_CASE("errors are anchored at their line") {
    CHECK(parse_error_line("schema_version = 1\nexperiment = solve\nf = (linear 1 1 1)\nbogus = 1\n") == 4);
    CHECK(parse_error_line("schema_version = 1\nexperiment = solve\nf = a\nf = b\n") == 4);
    CHECK(parse_error_line("schema_version = 1\nexperiment = solve\nno equals sign\n") == 3);
    CHECK(parse_error_line("schema_version = 2\nexperiment = solve\n") == 1);
    CHECK(parse_error_line("experiment = solve\n") == 1);
    CHECK(parse_error_line("schema_version = 1\nexperiment = nope\n") == 2);
    CHECK(parse_error_line("schema_version = 1\nexperiment = solve\nfield.a = (linear 1\n") == 3);
    CHECK(validate_error_line("schema_version = 1\nexperiment = solve\nf = (linear 1 1 1)\ndt = fast\n") == 4);
    CHECK(validate_error_line("schema_version = 1\nexperiment = solve\nf = (linear 1 1 1)\nx0 = 1 2\n") == 4);
    CHECK(validate_error_line("schema_version = 1\nexperiment = solve\nf = missing\n") == 3);
    CHECK(validate_error_line("schema_version = 1\nexperiment = seminorm\nf = (linear 1 1 1)\nkind = tt\n") == 4);
    // a required key that is absent points at the experiment line
    CHECK(validate_error_line("schema_version = 1\nexperiment = solve\n") == 2);
  }

  TEST_CASE("command line values raise ConfigError naming the option") {
    auto cfg = parse_config(solve_cfg);
    CHECK_THROWS_AS(set_option(cfg, "nope", "1", "--nope"), ConfigError);
    set_option(cfg, "dt", "-1", "--dt");
    try {
      validate(cfg);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("--dt") != std::string::npos);
    }
  }

  TEST_CASE("every experiment has a runner and a consistent table") {
    for (const auto& spec : experiment_specs()) {
      CHECK(find_experiment(spec.name) == &spec);
      for (const auto& k : spec.keys) {
        CHECK(spec.find(k.key) == &k);
        if (k.type == ValueType::choice) CHECK(!k.choices.empty());
      }
    }
    CHECK(find_experiment("nope") == nullptr);
  }

  TEST_CASE("presets parse and validate") {
    const auto list = list_presets();
    for (const char* want : {"example6-full", "ordering-audit", "hull-compactness"})
      CHECK(std::any_of(list.begin(), list.end(), [&](const PresetInfo& p) { return p.name == want; }));
    for (const auto& p : list) {
      CAPTURE(p.name);
      CHECK(!p.description.empty());
      CHECK_NOTHROW(validate(parse_config(preset_text(p.name))));
    }
    CHECK_THROWS_AS(preset_text("nope"), IndexError);
  }

  TEST_CASE("results: verdict summary and pass") {
    auto cfg = parse_config(solve_cfg);
    const auto r = run_experiment(cfg);
    CHECK(r.pass());
    CHECK(r.summary().rfind("PASS solve", 0) == 0);
    CHECK(r.artifacts.size() == 1);
    CHECK(r.artifacts[0].name == "trajectory.csv");
  }
}
