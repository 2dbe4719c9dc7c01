#include <omp.h>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carath/errors.hpp"
#include "carath/experiment.hpp"

namespace {

using namespace carath;

std::string dashed(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Options every experiment-running subcommand shares.
struct Common {
  std::string config;
  std::vector<std::string> fields;
  std::string out;
  std::string seed;
  int jobs = 0;
  bool print_config = false;

  void attach(CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config, "config file; options given here override it");
    sub->add_option("--field", fields, "define a field: name=<sexpr> (repeatable)");
    sub->add_option("--out", out, "output directory (overrides the config's output)");
    sub->add_option("--seed", seed, "random seed (overrides the config's seed)");
    sub->add_option("--jobs", jobs, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--print-config", print_config, "print the resolved config and exit without computing");
  }

  void apply(ExperimentConfig& cfg) const {
    for (const auto& def : fields) {
      const auto eq = def.find('=');
      if (eq == std::string::npos) throw ConfigError("--field: expected name=<sexpr>, got '" + def + "'");
      set_option(cfg, "field." + def.substr(0, eq), def.substr(eq + 1), "--field " + def.substr(0, eq));
    }
    if (!seed.empty()) set_option(cfg, "seed", seed, "--seed");
    if (!out.empty()) cfg.output = out;
  }
};

int execute(const ExperimentConfig& cfg, const Common& common, const std::string& source) {
  try {
    validate(cfg);
  } catch (const ParseError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (common.jobs > 0) omp_set_num_threads(common.jobs);
  if (common.print_config) {
    std::cout << print_config(cfg);
    return 0;
  }
  // Everything is computed before the first file is written.
  const ExperimentResult result = run_experiment(cfg);
  write_result(result, cfg.output);
  std::cout << result.summary();
  std::cout << (result.pass() ? "PASS" : "FAIL") << " " << cfg.experiment << " -> " << cfg.output << "\n";
  return result.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on nonautonomous Caratheodory systems"};
  app.require_subcommand(1);
  std::function<int()> action;

  // One subcommand per experiment, with one --option per key of its table.
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, Common> commons;
  for (const auto& spec : experiment_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.summary);
    auto& vals = values[spec.name];
    auto& common = commons[spec.name];
    common.attach(sub, true);
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    for (const auto& k : spec.keys) {
      std::string help = k.help;
      if (k.required)
        help += " (required)";
      else if (!k.default_value.empty())
        help += " [default: " + k.default_value + "]";
      if (!k.choices.empty()) {
        help += " {";
        for (std::size_t i = 0; i < k.choices.size(); ++i) help += (i ? "," : "") + k.choices[i];
        help += "}";
      }
      CLI::Option* o = sub->add_option("--" + dashed(k.key), vals[k.key], help)->type_name(to_string(k.type));
      opts.emplace_back(k.key, o);
    }
    sub->callback([&, opts, name = spec.name] {
      action = [&, opts, name] {
        const Common& c = commons[name];
        ExperimentConfig cfg;
        if (!c.config.empty()) {
          cfg = load(c.config);
          if (cfg.experiment != name)
            throw ConfigError(c.config + ": config is for experiment '" + cfg.experiment + "', not '" + name + "'");
        } else {
          cfg.experiment = name;
        }
        for (const auto& [key, o] : opts)
          if (o->count() > 0) set_option(cfg, key, values[name][key], "--" + dashed(key));
        c.apply(cfg);
        return execute(cfg, c, c.config.empty() ? "options" : c.config);
      };
    });
  }

  CLI::App* run = app.add_subcommand("run", "run the experiment a config file describes");
  std::string run_path;
  Common run_common;
  run->add_option("config", run_path, "config file")->required();
  run_common.attach(run, false);
  run->callback([&] {
    action = [&] {
      ExperimentConfig cfg = load(run_path);
      run_common.apply(cfg);
      return execute(cfg, run_common, run_path);
    };
  });

  CLI::App* preset = app.add_subcommand("preset", "run a built-in preset (see list-presets)");
  std::string preset_name;
  bool show = false;
  Common preset_common;
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_flag("--show", show, "print the preset's config text and exit");
  preset_common.attach(preset, false);
  preset->callback([&] {
    action = [&] {
      const std::string text = preset_text(preset_name);
      if (show) {
        std::cout << text;
        return 0;
      }
      ExperimentConfig cfg = parse_config(text);
      preset_common.apply(cfg);
      return execute(cfg, preset_common, "preset " + preset_name);
    };
  });

  CLI::App* list = app.add_subcommand("list-presets", "list the built-in presets");
  list->callback([&] {
    action = [] {
      for (const auto& p : list_presets()) std::cout << p.name << "  " << p.description << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
