#include "carath/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "carath/errors.hpp"
#include "carath/field_io.hpp"
#include "params.hpp"

namespace carath {

const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::number: return "number";
    case ValueType::integer: return "integer";
    case ValueType::boolean: return "boolean";
    case ValueType::choice: return "choice";
    case ValueType::text: return "text";
    case ValueType::field: return "field";
    case ValueType::field_list: return "field list";
    case ValueType::number_list: return "number list";
    case ValueType::interval: return "interval";
    case ValueType::interval_list: return "interval list";
    case ValueType::point: return "point";
    case ValueType::point_list: return "point list";
  }
  return "?";
}

namespace {

KeySpec key(std::string name, ValueType type, std::string def, std::string help) {
  return {std::move(name), type, std::move(def), std::move(help), {}, false};
}

KeySpec required(std::string name, ValueType type, std::string help) {
  return {std::move(name), type, "", std::move(help), {}, true};
}

KeySpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
  return {std::move(name), ValueType::choice, std::move(def), std::move(help), std::move(choices), false};
}

using Keys = std::vector<KeySpec>;

Keys operator+(Keys a, const Keys& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Keys solver_keys(std::string dt = "1e-3") {
  using V = ValueType;
  return {key("dt", V::number, std::move(dt), "time step"),
          choice("scheme", "heun", {"euler", "heun"}, "averaged_euler (order 1) or averaged_heun (order 2)"),
          key("subsamples", V::integer, "4", "midpoint samples per breakpoint-free piece of a step"),
          key("rmax", V::number, "1e6", "blow-up threshold on |x|"),
          key("exit_radius", V::number, "", "stop when |x| exceeds this radius (off when empty)"),
          key("allow_non_lc", V::boolean, "false", "integrate fields that only claim SC")};
}

Keys dp_keys() {
  using V = ValueType;
  return {key("theta_slope", V::number, "2", "modulus theta(s) = slope * s"),
          key("n_t", V::integer, "64", "DP time cells"),
          key("n_x", V::integer, "61", "DP state nodes on [-j, j]"),
          key("slack_cells", V::integer, "0", "extra cells a DP step may move"),
          key("restarts", V::integer, "16", "random restarts of the curve search (N >= 2)"),
          key("iterations", V::integer, "400", "hill-climbing moves per restart (N >= 2)")};
}

Keys grid_keys(std::string x_cells = "64") {
  using V = ValueType;
  return {key("t_steps", V::integer, "1024", "time samples of m-bounds"),
          key("x_cells", V::integer, std::move(x_cells), "lattice cells per axis for sampled suprema")};
}

Keys metric_keys() {
  using V = ValueType;
  return {choice("kind", "ttheta", {"tb", "td", "ttheta"}, "seminorm family"),
          key("n_max", V::integer, "4", "intervals [-n, n], n = 1..n_max"),
          key("j_max", V::integer, "4", "ball radii j = 1..j_max"),
          key("d_count", V::integer, "4", "points of the dense set D per interval (td)")};
}

std::vector<ExperimentSpec> build_specs() {
  using V = ValueType;
  const std::string eps_ladder = "0.1 0.03 0.01 0.003 0.001";
  std::vector<ExperimentSpec> s;
  s.push_back({"seminorm", "one seminorm p_{I,j} (tb, ttheta) or p_{I,x} (td) of a field",
               Keys{required("f", V::field, "field"),
                    choice("kind", "ttheta", {"tb", "td", "ttheta"}, "seminorm family"),
                    key("interval", V::interval, "0 4", "interval I"),
                    key("radius", V::integer, "1", "ball radius j (tb, ttheta)"),
                    key("x_point", V::point, "0", "point x (td)")} +
                   dp_keys() + grid_keys()});
  s.push_back({"metric", "capped weighted sum of seminorms of f - g",
               Keys{required("f", V::field, "first field"), required("g", V::field, "second field")} + metric_keys() +
                   dp_keys() + grid_keys()});
  s.push_back({"converge", "metric distance from translates f_{shift k} to a limit, k = 1..k_max",
               Keys{required("f", V::field, "field whose translates form the sequence"),
                    required("limit", V::field, "candidate limit"),
                    key("shift", V::number, "4", "translation step"),
                    key("k_max", V::integer, "10", "sequence length")} +
                   metric_keys() + dp_keys() + grid_keys()});
  s.push_back({"bounds", "optimal m- and l-bounds on a ball, and moduli theta^I_j from m-bounds",
               Keys{required("f", V::field, "field"), key("radius", V::number, "1", "ball radius"),
                    key("window", V::interval, "0 4", "time window"),
                    key("pair_samples", V::integer, "64", "random pairs per time for sampled Lipschitz quotients"),
                    key("intervals", V::interval_list, "", "intervals I for theta^I_j (none when empty)"),
                    key("radii", V::number_list, "1", "radii j for theta^I_j"),
                    key("s_knots", V::integer, "256", "knots of the theta grid")} +
                   grid_keys()});
  s.push_back({"equicont", "L^1_loc equicontinuity profile delta(eps) of a family of m-bounds",
               Keys{key("family", V::field_list, "", "fields of the family"),
                    key("f", V::field, "", "or: generate the family from translates of this field"),
                    key("shift", V::number, "4", "translation step of the generated family"),
                    key("count", V::integer, "10", "members of the generated family"),
                    key("radius", V::number, "1", "ball radius of the m-bounds"),
                    key("r", V::number, "8", "windows range over [-r, r]"),
                    key("eps", V::number_list, "0.5 0.25 0.125", "eps values"),
                    choice("expect", "equicontinuous", {"equicontinuous", "not-equicontinuous"}, "expected verdict")} +
                   grid_keys()});
  s.push_back({"solve", "trajectory of x' = f(t, x)",
               Keys{required("f", V::field, "field"), key("x0", V::point, "0", "initial state"),
                    key("t0", V::number, "0", "initial time"), key("t1", V::number, "1", "final time")} +
                   solver_keys()});
  s.push_back({"triangular", "trajectory of x' = f(t, x), y' = F(t, x) y + k(t, x)",
               Keys{required("f", V::field, "state field"), required("F", V::field, "matrix field"),
                    key("k", V::field, "", "forcing (zero when empty)"), key("x0", V::point, "0", "initial x"),
                    key("y0", V::point, "1", "initial y"), key("t0", V::number, "0", "initial time"),
                    key("t1", V::number, "1", "final time")} +
                   solver_keys()});
  s.push_back({"flow", "skew-product flow Phi_1(t, f, x0) at several times, with identity and cocycle checks",
               Keys{required("f", V::field, "field"), key("x0", V::point, "0", "initial state"),
                    key("times", V::number_list, "0.5 1 1.5 2", "times t")} +
                   solver_keys()});
  s.push_back({"continuity", "sup-distance of solutions along translates f_{shift k} to the solution of a limit",
               Keys{required("f", V::field, "field whose translates form the sequence"),
                    required("limit", V::field, "limit field"), key("shift", V::number, "4", "translation step"),
                    key("k_max", V::integer, "10", "sequence length"), key("x0", V::point, "0", "initial state"),
                    key("t0", V::number, "0", "initial time"), key("t1", V::number, "2", "final time"),
                    key("tol", V::number, "1e-9", "errors below this pass outright")} +
                   solver_keys()});
  s.push_back({"linearize", "finite-difference check of the variational equation",
               Keys{required("f", V::field, "field"),
                    key("jacobian", V::field, "", "Jacobian (declared or derived when empty)"),
                    key("x0", V::point, "0", "initial state"), key("y0", V::point, "1", "direction"),
                    key("t0", V::number, "0", "initial time"), key("t1", V::number, "2", "final time"),
                    key("eps", V::number_list, eps_ladder, "eps ladder"),
                    key("tol", V::number, "1e-9", "errors below this pass outright")} +
                   solver_keys()});
  s.push_back({"hull", "boundedness and uniform continuity of the translates on probe points",
               Keys{required("f", V::field_list, "fields, one report each"),
                    key("expect", V::text, "", "per field: compact, unbounded, not-uc or any (compact when empty)"),
                    key("probes", V::point_list, "0; 1; -1", "probe points x"),
                    key("r", V::number, "4", "window [-r, r]"), key("eps", V::number_list, "0.5 0.1 0.05", "eps values"),
                    key("horizon", V::number, "32", "translations tau in [-horizon, horizon]"),
                    key("tau_step", V::number, "0.25", "tau grid step"),
                    key("delta0", V::number, "1", "largest delta"),
                    key("delta_levels", V::integer, "12", "delta ladder length")}});
  s.push_back({"hull-flow", "linearized flow of (f_tau, (J f)_tau) for several tau",
               Keys{required("f", V::field, "field"),
                    key("jacobian", V::field, "", "Jacobian (declared or derived when empty)"),
                    key("taus", V::number_list, "0 1 2 3", "translations"), key("t", V::number, "1", "time"),
                    key("x0", V::point, "0", "initial state"), key("y0", V::point, "1", "initial y")} +
                   solver_keys()});
  s.push_back({"ramp-example", "the ramp-wave example end to end",
               Keys{key("k_max", V::integer, "20", "k range of the base distances"),
                    key("ttheta_k", V::integer, "10", "k range of the T_Theta decay of F_{4k} - G"),
                    key("metric_k", V::integer, "6", "k range of the metric decay of f_{4k} to g"),
                    key("interval", V::interval, "0 4", "interval of the T_Theta decay"),
                    key("radius", V::integer, "3", "ball radius of the T_Theta decay"),
                    key("theta_slope", V::number, "2", "modulus theta(s) = slope * s"),
                    key("n_t", V::integer, "64", "DP time cells"), key("n_x", V::integer, "61", "DP state nodes"),
                    key("slack_cells", V::integer, "0", "extra cells a DP step may move"),
                    key("eps", V::number_list, eps_ladder, "eps ladder of the linearization check")} +
                   solver_keys()});
  s.push_back({"ordering-audit", "seminorm chain TD <= TTheta <= TB on random fields",
               Keys{key("count", V::integer, "20", "random fields"),
                    key("intervals", V::interval_list, "-1 1; 0 2; -2 2", "intervals I"),
                    key("radii", V::number_list, "1 2", "integer radii j"),
                    key("d_count", V::integer, "7", "points of D tried (those inside B_j)"),
                    key("theta_slope", V::number, "2", "modulus theta(s) = slope * s"),
                    key("n_t", V::integer, "32", "DP time cells"),
                    key("cells_per_unit", V::integer, "16", "DP state cells per unit length"),
                    key("t_steps", V::integer, "2048", "time samples of m-bounds"),
                    key("x_cells", V::integer, "256", "lattice cells per axis"),
                    key("tolerance", V::number, "0.02", "relative slack of TTheta <= TB")}});
  s.push_back({"gronwall-audit", "|x(t) - x'(t)| <= |x0 - x0'| exp(l t) on random initial pairs",
               Keys{key("f", V::field, "@ramp.f", "field"),
                    key("lipschitz", V::number, "1/3", "Lipschitz constant l of f in x"),
                    key("pairs", V::integer, "50", "random pairs"),
                    key("range", V::number, "3", "initial states drawn from [-range, range]"),
                    key("t0", V::number, "0", "initial time"), key("t1", V::number, "2", "final time"),
                    key("slack", V::number, "1e-3", "relative slack of the bound")} +
                   solver_keys("1/1024")});
  s.push_back({"solver-order", "accuracy, empirical order and Picard agreement on smooth fields",
               Keys{key("dt_max", V::number, "1/32", "coarsest step"),
                    key("levels", V::integer, "5", "step halvings"),
                    key("picard_cells", V::integer, "2000", "grid cells of the Picard oracle"),
                    key("picard_t1", V::number, "0.4", "Picard span [0, picard_t1]")}});
  return s;
}

bool is_reserved(std::string_view key) {
  return key == "schema_version" || key == "experiment" || key == "seed" || key == "output";
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

// Splits at `sep` outside parentheses.
std::vector<std::string> split_top(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void apply_reserved(ExperimentConfig& cfg, const std::string& k, const ConfigEntry& e) {
  auto bad = [&](const std::string& msg) {
    if (e.line > 0) throw ParseError(msg, e.line);
    throw ConfigError(e.origin + ": " + msg);
  };
  if (k == "schema_version") {
    if (e.value != "1") bad("unsupported schema_version '" + e.value + "' (expected 1)");
    cfg.schema_version = 1;
  } else if (k == "experiment") {
    if (!find_experiment(e.value)) bad("unknown experiment '" + e.value + "'");
    cfg.experiment = e.value;
  } else if (k == "seed") {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (e.value.empty() || *end != '\0' || e.value[0] == '-') bad("seed must be a nonnegative integer");
    cfg.seed = v;
  } else if (k == "output") {
    if (e.value.empty()) bad("output must not be empty");
    cfg.output = e.value;
  }
  cfg.reserved[k] = e;
}

}  // namespace

const KeySpec* ExperimentSpec::find(std::string_view k) const {
  for (const auto& spec : keys)
    if (spec.key == k) return &spec;
  return nullptr;
}

const std::vector<ExperimentSpec>& experiment_specs() {
  static const std::vector<ExperimentSpec> specs = build_specs();
  return specs;
}

const ExperimentSpec* find_experiment(std::string_view name) {
  for (const auto& s : experiment_specs())
    if (s.name == name) return &s;
  return nullptr;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.experiment.clear();
  std::vector<std::pair<std::string, ConfigEntry>> pending;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string k = trim(std::string_view(body).substr(0, eq));
    const std::string v = trim(std::string_view(body).substr(eq + 1));
    if (!valid_name(k)) throw ParseError("malformed key '" + k + "'", line_no);
    if (auto it = seen.find(k); it != seen.end())
      throw ParseError("duplicate key '" + k + "' (first on line " + std::to_string(it->second) + ")", line_no);
    seen[k] = line_no;
    ConfigEntry e{v, line_no, "line " + std::to_string(line_no)};
    if (k.rfind("field.", 0) == 0) {
      const std::string name = k.substr(6);
      if (!valid_name(name)) throw ParseError("malformed field name '" + name + "'", line_no);
      if (v.empty()) throw ParseError("empty definition of field '" + name + "'", line_no);
      cfg.fields[name] = e;
    } else if (is_reserved(k)) {
      apply_reserved(cfg, k, e);
    } else {
      pending.emplace_back(k, e);
    }
  }
  if (!cfg.reserved.count("schema_version")) throw ParseError("missing schema_version", 1);
  if (cfg.experiment.empty()) throw ParseError("missing experiment", 1);
  const ExperimentSpec* spec = find_experiment(cfg.experiment);
  for (auto& [k, e] : pending) {
    if (!spec->find(k)) throw ParseError("unknown key '" + k + "' for experiment '" + cfg.experiment + "'", e.line);
    cfg.values[k] = std::move(e);
  }
  // Field definitions are parsed here so their errors point at the config line.
  for (const auto& [name, e] : cfg.fields) {
    try {
      (void)parse_field_or_expr(e.value);
    } catch (const ParseError& err) {
      throw ParseError("field '" + name + "': " + err.what(), e.line);
    }
  }
  return cfg;
}

void set_option(ExperimentConfig& cfg, const std::string& k, const std::string& value, const std::string& origin) {
  ConfigEntry e{value, 0, origin};
  if (is_reserved(k)) {
    apply_reserved(cfg, k, e);
    return;
  }
  if (k.rfind("field.", 0) == 0) {
    const std::string name = k.substr(6);
    if (!valid_name(name)) throw ConfigError(origin + ": malformed field name '" + name + "'");
    try {
      (void)parse_field_or_expr(value);
    } catch (const ParseError& err) {
      throw ConfigError(origin + ": field '" + name + "': " + err.what());
    }
    cfg.fields[name] = e;
    return;
  }
  const ExperimentSpec* spec = find_experiment(cfg.experiment);
  if (!spec) throw ConfigError(origin + ": no experiment selected");
  if (!spec->find(k)) throw ConfigError(origin + ": unknown key '" + k + "' for experiment '" + cfg.experiment + "'");
  cfg.values[k] = e;
}

void validate(const ExperimentConfig& cfg) {
  const detail::Params p(cfg);
  p.check_types();
  for (const auto& r : detail::runners())
    if (r.name == cfg.experiment) r.check(p);
}

std::string print_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "schema_version = " << cfg.schema_version << "\n";
  os << "experiment = " << cfg.experiment << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "output = " << cfg.output << "\n";
  for (const auto& [name, e] : cfg.fields) os << "field." << name << " = " << e.value << "\n";
  for (const auto& [k, e] : cfg.values) os << k << " = " << e.value << "\n";
  return os.str();
}

bool ExperimentResult::pass() const {
  return std::none_of(verdicts.begin(), verdicts.end(),
                      [](const VerdictLine& v) { return v.kind == VerdictLine::Kind::fail; });
}

std::string ExperimentResult::summary() const {
  std::string out;
  for (const auto& v : verdicts) {
    out += v.kind == VerdictLine::Kind::pass ? "PASS " : v.kind == VerdictLine::Kind::fail ? "FAIL " : "INFO ";
    out += v.name + ": " + v.detail + "\n";
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const detail::Params p(cfg);
  p.check_types();
  for (const auto& r : detail::runners())
    if (r.name == cfg.experiment) {
      r.check(p);
      return r.run(p);
    }
  throw ConfigError("no runner for experiment '" + cfg.experiment + "'");
}

void write_result(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream os(fs::path(dir) / name, std::ios::binary);
    os << content;
    if (!os) throw Error("cannot write " + (fs::path(dir) / name).string());
  };
  for (const auto& a : result.artifacts) put(a.name, a.content);
  put("summary.txt", result.summary());
}

namespace detail {

std::optional<double> parse_number(std::string_view s) {
  const std::string str = trim(s);
  if (str.empty()) return std::nullopt;
  auto one = [](const std::string& t) -> std::optional<double> {
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v)) return std::nullopt;
    return v;
  };
  if (const auto slash = str.find('/'); slash != std::string::npos) {
    const auto a = one(str.substr(0, slash)), b = one(str.substr(slash + 1));
    if (!a || !b || *b == 0.0) return std::nullopt;
    return *a / *b;
  }
  return one(str);
}

Params::Params(const ExperimentConfig& cfg) : cfg_(cfg), spec_(find_experiment(cfg.experiment)) {
  if (!spec_) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

Params::Raw Params::raw(std::string_view k) const {
  if (auto it = cfg_.values.find(std::string(k)); it != cfg_.values.end())
    return {it->second.value, it->second.line, it->second.origin};
  const KeySpec* ks = spec_->find(k);
  if (!ks) throw ConfigError("internal: key '" + std::string(k) + "' not in the table of " + spec_->name);
  return {ks->default_value, 0, "default of '" + std::string(k) + "'"};
}

void Params::fail(std::string_view k, const std::string& msg) const {
  const Raw r = raw(k);
  const std::string text = std::string(k) + ": " + msg;
  if (r.line > 0) throw ParseError(text, r.line);
  if (cfg_.values.count(std::string(k))) throw ConfigError(r.origin + ": " + text);
  if (spec_->find(k) && spec_->find(k)->required) {
    const std::string missing = "missing required key '" + std::string(k) + "'";
    if (auto it = cfg_.reserved.find("experiment"); it != cfg_.reserved.end() && it->second.line > 0)
      throw ParseError(missing + " for experiment '" + cfg_.experiment + "'", it->second.line);
    throw ConfigError(missing);
  }
  throw ConfigError(text);
}

bool Params::present(std::string_view k) const { return !raw(k).value.empty(); }

double Params::number(std::string_view k) const {
  const auto v = parse_number(raw(k).value);
  if (!v) fail(k, "expected a number, got '" + raw(k).value + "'");
  return *v;
}

long Params::integer(std::string_view k) const {
  const std::string s = trim(raw(k).value);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') fail(k, "expected an integer, got '" + s + "'");
  return v;
}

std::size_t Params::count(std::string_view k) const {
  const long v = integer(k);
  if (v < 0) fail(k, "must be nonnegative");
  return static_cast<std::size_t>(v);
}

bool Params::flag(std::string_view k) const {
  const std::string s = trim(raw(k).value);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(k, "expected true or false, got '" + s + "'");
}

std::string Params::text(std::string_view k) const {
  const std::string s = trim(raw(k).value);
  const KeySpec* ks = spec_->find(k);
  if (ks && ks->type == ValueType::choice && std::find(ks->choices.begin(), ks->choices.end(), s) == ks->choices.end()) {
    std::string list;
    for (const auto& c : ks->choices) list += (list.empty() ? "" : ", ") + c;
    fail(k, "expected one of " + list + ", got '" + s + "'");
  }
  return s;
}

FieldDescriptor Params::resolve_field(std::string_view k, const std::string& ref) const {
  if (ref.empty()) fail(k, "missing field");
  if (ref[0] == '(') {
    try {
      return parse_field_or_expr(ref);
    } catch (const ParseError& e) {
      fail(k, e.what());
    }
  }
  if (ref[0] == '@') {
    const auto ex = ramp_example();
    if (ref == "@ramp.f") return ex.f;
    if (ref == "@ramp.F") return ex.F;
    if (ref == "@ramp.g") return ex.g;
    if (ref == "@ramp.G") return ex.G;
    fail(k, "unknown built-in field '" + ref + "' (known: @ramp.f, @ramp.F, @ramp.g, @ramp.G)");
  }
  const auto it = cfg_.fields.find(ref);
  if (it == cfg_.fields.end()) fail(k, "undefined field '" + ref + "'");
  return parse_field_or_expr(it->second.value);
}

FieldDescriptor Params::field(std::string_view k) const { return resolve_field(k, trim(raw(k).value)); }

std::vector<FieldDescriptor> Params::fields(std::string_view k) const {
  std::vector<FieldDescriptor> out;
  const std::string s = trim(raw(k).value);
  if (s.empty()) return out;
  for (const auto& ref : split_top(s, ',')) out.push_back(resolve_field(k, ref));
  return out;
}

std::vector<double> Params::numbers(std::string_view k) const {
  std::vector<double> out;
  for (const auto& t : tokens(raw(k).value)) {
    const auto v = parse_number(t);
    if (!v) fail(k, "expected numbers, got '" + t + "'");
    out.push_back(*v);
  }
  return out;
}

Interval Params::interval(std::string_view k) const {
  const auto v = numbers(k);
  if (v.size() != 2) fail(k, "expected two numbers 'lo hi'");
  if (!(v[0] < v[1])) fail(k, "interval needs lo < hi");
  return {v[0], v[1]};
}

std::vector<Interval> Params::intervals(std::string_view k) const {
  std::vector<Interval> out;
  const std::string s = trim(raw(k).value);
  if (s.empty()) return out;
  for (const auto& part : split_top(s, ';')) {
    std::vector<double> v;
    for (const auto& t : tokens(part)) {
      const auto x = parse_number(t);
      if (!x) fail(k, "expected numbers, got '" + t + "'");
      v.push_back(*x);
    }
    if (v.size() != 2 || !(v[0] < v[1])) fail(k, "each interval is 'lo hi' with lo < hi, got '" + part + "'");
    out.push_back({v[0], v[1]});
  }
  return out;
}

std::vector<double> Params::point(std::string_view k) const {
  auto v = numbers(k);
  if (v.empty()) fail(k, "expected at least one coordinate");
  return v;
}

std::vector<std::vector<double>> Params::points(std::string_view k) const {
  std::vector<std::vector<double>> out;
  const std::string s = trim(raw(k).value);
  if (s.empty()) return out;
  for (const auto& part : split_top(s, ';')) {
    std::vector<double> v;
    for (const auto& t : tokens(part)) {
      const auto x = parse_number(t);
      if (!x) fail(k, "expected numbers, got '" + t + "'");
      v.push_back(*x);
    }
    if (v.empty()) fail(k, "empty point");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> Params::words(std::string_view k) const {
  std::vector<std::string> out;
  const std::string s = trim(raw(k).value);
  if (s.empty()) return out;
  for (auto& w : split_top(s, ',')) out.push_back(std::move(w));
  return out;
}

void Params::check_types() const {
  for (const auto& ks : spec_->keys) {
    const std::string_view k = ks.key;
    if (ks.required && !present(k)) fail(k, "required key is missing");
    if (!present(k)) continue;
    switch (ks.type) {
      case ValueType::number: (void)number(k); break;
      case ValueType::integer: (void)integer(k); break;
      case ValueType::boolean: (void)flag(k); break;
      case ValueType::choice: (void)text(k); break;
      case ValueType::text: break;
      case ValueType::field: (void)field(k); break;
      case ValueType::field_list: (void)fields(k); break;
      case ValueType::number_list: (void)numbers(k); break;
      case ValueType::interval: (void)interval(k); break;
      case ValueType::interval_list: (void)intervals(k); break;
      case ValueType::point: (void)point(k); break;
      case ValueType::point_list: (void)points(k); break;
    }
  }
}

StepPolicy Params::policy() const {
  StepPolicy p;
  p.dt = number("dt");
  p.scheme = text("scheme") == "euler" ? Scheme::averaged_euler : Scheme::averaged_heun;
  p.subsamples = static_cast<int>(integer("subsamples"));
  p.r_max = number("rmax");
  if (present("exit_radius")) p.exit_radius = number("exit_radius");
  p.allow_non_lc = flag("allow_non_lc");
  try {
    p.validate();
  } catch (const Error& e) {
    fail("dt", std::string("solver policy: ") + e.what());
  }
  return p;
}

Resolution Params::resolution() const {
  Resolution r;
  r.n_t = count("n_t");
  r.n_x = count("n_x");
  r.slack_cells = count("slack_cells");
  if (r.n_t == 0) fail("n_t", "must be positive");
  if (r.n_x == 0) fail("n_x", "must be positive");
  return r;
}

BoundGrid Params::grid() const {
  BoundGrid g;
  g.t_steps = count("t_steps");
  g.x_cells = count("x_cells");
  g.seed = seed();
  if (g.t_steps == 0) fail("t_steps", "must be positive");
  if (g.x_cells == 0) fail("x_cells", "must be positive");
  return g;
}

SearchOptions Params::search() const {
  SearchOptions s;
  s.restarts = count("restarts");
  s.iterations = count("iterations");
  s.seed = seed();
  return s;
}

SeminormKind Params::kind() const {
  const std::string k = text("kind");
  return k == "tb" ? SeminormKind::TB : k == "td" ? SeminormKind::TD : SeminormKind::TTheta;
}

MetricConfig Params::metric() const {
  MetricConfig m;
  m.n_max = static_cast<int>(integer("n_max"));
  m.j_max = static_cast<int>(integer("j_max"));
  m.d_count = count("d_count");
  if (m.n_max < 1) fail("n_max", "must be at least 1");
  if (m.j_max < 1) fail("j_max", "must be at least 1");
  m.theta = Modulus::linear(number("theta_slope"));
  m.resolution = resolution();
  m.bound = grid();
  m.search = search();
  return m;
}

}  // namespace detail
}  // namespace carath
