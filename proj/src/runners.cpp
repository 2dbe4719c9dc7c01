#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "carath/bounds.hpp"
#include "carath/csv.hpp"
#include "carath/errors.hpp"
#include "carath/field_io.hpp"
#include "carath/random_field.hpp"
#include "carath/scalar_function.hpp"
#include "carath/skewflow.hpp"
#include "carath/solver.hpp"
#include "carath/topology.hpp"
#include "parallel.hpp"
#include "params.hpp"

namespace carath::detail {
namespace {

using csv::num;
using Kind = VerdictLine::Kind;

struct Out {
  ExperimentResult r;

  void file(std::string name, const std::string& content) { r.artifacts.push_back({std::move(name), content}); }
  void verdict(bool ok, std::string name, std::string detail) {
    r.verdicts.push_back({ok ? Kind::pass : Kind::fail, std::move(name), std::move(detail)});
  }
  void info(std::string name, std::string detail) { r.verdicts.push_back({Kind::info, std::move(name), std::move(detail)}); }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point_text(std::span<const double> x) {
  std::string s;
  for (double v : x) s += (s.empty() ? "" : " ") + num(v);
  return s;
}

// ---- shared checks ---------------------------------------------------------

void need_vector_field(const Params& p, std::string_view key, const FieldDescriptor& f) {
  if (f.shape().cols != 1 || f.shape().rows != f.dim_in())
    p.fail(key, "the equation needs f: R x R^N -> R^N, got " + std::to_string(f.shape().rows) + "x" +
                    std::to_string(f.shape().cols) + " values on R^" + std::to_string(f.dim_in()));
}

void need_dim(const Params& p, std::string_view key, std::span<const double> x, std::size_t n) {
  if (x.size() != n)
    p.fail(key, "expected " + std::to_string(n) + " coordinates, got " + std::to_string(x.size()));
}

void need_lc(const Params& p, std::string_view key, const FieldDescriptor& f) {
  if (f.class_claim() != ClassClaim::LC && !p.flag("allow_non_lc"))
    p.fail(key, std::string("field claims ") + to_string(f.class_claim()) +
                    "; solutions may not be unique (set allow_non_lc = true to integrate anyway)");
}

void need_positive(const Params& p, std::string_view key, double v) {
  if (!(v > 0.0)) p.fail(key, "must be positive");
}

FieldDescriptor jacobian_of(const Params& p, const FieldDescriptor& f) {
  if (p.present("jacobian")) return p.field("jacobian");
  try {
    return jacobian_field(f);
  } catch (const UnsupportedError& e) {
    p.fail("jacobian", std::string("no Jacobian declared or derivable: ") + e.what());
  }
}

void need_jacobian_shape(const Params& p, const FieldDescriptor& f, const FieldDescriptor& J) {
  const std::size_t n = f.dim_in();
  if (J.dim_in() != n || J.shape().rows != n || J.shape().cols != n)
    p.fail("jacobian", "Jacobian must be N x N on R^N with N = " + std::to_string(n));
}

std::vector<FieldDescriptor> translates(const FieldDescriptor& f, double shift, std::size_t count) {
  std::vector<FieldDescriptor> seq;
  for (std::size_t k = 1; k <= count; ++k) seq.push_back(translate(f, shift * static_cast<double>(k)));
  return seq;
}

bool nonincreasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

// ---- seminorm --------------------------------------------------------------

void check_seminorm(const Params& p) {
  const auto f = p.field("f");
  if (p.integer("radius") < 1) p.fail("radius", "must be at least 1");
  if (p.kind() == SeminormKind::TD) need_dim(p, "x_point", p.point("x_point"), f.dim_in());
  (void)p.resolution();
  (void)p.grid();
  (void)p.search();
}

ExperimentResult run_seminorm(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto I = p.interval("interval");
  const int j = static_cast<int>(p.integer("radius"));
  const auto kind = p.kind();
  std::ostringstream os;
  os << "kind,I_lo,I_hi,j,x,value,heuristic\n";
  double value = 0.0;
  bool heuristic = false;
  if (kind == SeminormKind::TD) {
    const auto x = p.point("x_point");
    value = seminorm_TD(f, I, x);
    os << "td," << num(I.lo) << "," << num(I.hi) << ",," << point_text(x) << "," << num(value) << ",0\n";
  } else if (kind == SeminormKind::TB) {
    value = seminorm_TB(f, I, j, p.grid());
    os << "tb," << num(I.lo) << "," << num(I.hi) << "," << j << ",," << num(value) << ",0\n";
  } else {
    const auto v = seminorm_TTheta(f, I, j, Modulus::linear(p.number("theta_slope")), p.resolution(), p.search());
    value = v.value;
    heuristic = v.heuristic;
    os << "ttheta," << num(I.lo) << "," << num(I.hi) << "," << j << ",," << num(value) << "," << int(heuristic)
       << "\n";
    std::ostringstream cs;
    cs << "t";
    for (std::size_t i = 0; i < v.curve.dim; ++i) cs << ",x" << i;
    cs << "\n";
    for (std::size_t k = 0; k < v.curve.size(); ++k) {
      cs << num(v.curve.t0 + static_cast<double>(k) * v.curve.dt);
      for (double x : v.curve.at(k)) cs << "," << num(x);
      cs << "\n";
    }
    o.file("curve.csv", cs.str());
  }
  o.file("seminorm.csv", os.str());
  o.verdict(std::isfinite(value), "seminorm", std::string(to_string(kind)) + " = " + fmt(value));
  if (heuristic) o.info("seminorm", "state dimension >= 2: random-search lower bound (heuristic)");
  return o.r;
}

// ---- metric / converge -----------------------------------------------------

void check_metric_pair(const Params& p, const FieldDescriptor& f, const FieldDescriptor& g, std::string_view gkey) {
  if (f.dim_in() != g.dim_in() || !(f.shape() == g.shape()))
    p.fail(gkey, "dimensions and shape must match the first field");
  (void)p.metric();
}

void check_metric(const Params& p) { check_metric_pair(p, p.field("f"), p.field("g"), "g"); }

ExperimentResult run_metric(const Params& p) {
  Out o;
  const auto f = p.field("f"), g = p.field("g");
  const auto cfg = p.metric();
  const auto kind = p.kind();
  const auto idx = metric_indices(cfg, kind, f.dim_in());
  const FieldDescriptor d = difference(f, g);
  std::vector<double> u(idx.size());
  parallel_for(static_cast<std::ptrdiff_t>(idx.size()), [&](std::ptrdiff_t k) { u[k] = seminorm(d, idx[k], cfg); });
  std::ostringstream os;
  os << "k,kind,I_lo,I_hi,j,x,weight,seminorm,term\n";
  double total = 0.0, weight = 1.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    weight *= 0.5;
    const double term = weight * u[k] / (1.0 + u[k]);
    total += term;
    os << k + 1 << "," << to_string(kind) << "," << num(idx[k].interval.lo) << "," << num(idx[k].interval.hi) << ",";
    if (kind == SeminormKind::TD)
      os << "," << point_text(idx[k].x_point);
    else
      os << idx[k].radius << ",";
    os << "," << num(weight) << "," << num(u[k]) << "," << num(term) << "\n";
  }
  os << "# total," << num(total) << "\n";
  o.file("metric.csv", os.str());
  o.verdict(std::isfinite(total) && total >= 0.0 && total <= 1.0, "metric",
            std::string(to_string(kind)) + " distance = " + fmt(total) + " over " + std::to_string(idx.size()) +
                " indices");
  if (kind == SeminormKind::TTheta && f.dim_in() >= 2) o.info("metric", "TTheta terms are heuristic lower bounds (N >= 2)");
  return o.r;
}

void check_converge(const Params& p) {
  check_metric_pair(p, p.field("f"), p.field("limit"), "limit");
  if (p.integer("k_max") < 2) p.fail("k_max", "needs at least 2 terms");
}

ExperimentResult run_converge(const Params& p) {
  Out o;
  const auto seq = translates(p.field("f"), p.number("shift"), p.count("k_max"));
  const auto t = convergence_diagnostic(seq, p.field("limit"), p.metric(), p.kind());
  std::vector<double> ks;
  for (std::size_t k = 1; k <= seq.size(); ++k) ks.push_back(static_cast<double>(k));
  std::ostringstream os;
  csv::write_convergence(os, t, ks);
  o.file("convergence.csv", os.str());
  const bool vanish = t.distance.front() == 0.0 && t.distance.back() == 0.0;
  o.verdict(vanish || (t.ratio < 1.0 && t.trend >= 0.75), "converge",
            "d_1 = " + fmt(t.distance.front()) + ", d_last = " + fmt(t.distance.back()) + ", ratio " + fmt(t.ratio) +
                ", nonincreasing fraction " + fmt(t.trend));
  return o.r;
}

// ---- bounds ----------------------------------------------------------------

std::vector<int> int_radii(const Params& p, std::string_view key) {
  std::vector<int> out;
  for (double v : p.numbers(key)) {
    if (v != std::floor(v) || v < 1.0) p.fail(key, "radii must be integers >= 1");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) p.fail(key, "needs at least one radius");
  return out;
}

void check_bounds(const Params& p) {
  (void)p.field("f");
  need_positive(p, "radius", p.number("radius"));
  (void)p.grid();
  if (!p.intervals("intervals").empty()) {
    (void)int_radii(p, "radii");
    if (p.count("s_knots") < 2) p.fail("s_knots", "needs at least 2 knots");
  }
}

ExperimentResult run_bounds(const Params& p) {
  Out o;
  const auto f = p.field("f");
  BoundGrid grid = p.grid();
  grid.pair_samples = p.count("pair_samples");
  const double r = p.number("radius");
  const auto W = p.interval("window");
  const auto m = optimal_m_bound(f, r, W, grid);
  std::ostringstream ms;
  csv::write_bound(ms, m, "m");
  o.file("m_bound.csv", ms.str());
  o.verdict(std::all_of(m.values.begin(), m.values.end(), [](double v) { return std::isfinite(v); }), "m-bound",
            "L^p norm over the window " + fmt(lp_norm(m, W)));
  if (f.class_claim() == ClassClaim::LC) {
    const auto l = optimal_l_bound(f, r, W, grid);
    std::ostringstream ls;
    csv::write_bound(ls, l, "l");
    o.file("l_bound.csv", ls.str());
    o.verdict(std::all_of(l.values.begin(), l.values.end(), [](double v) { return std::isfinite(v); }), "l-bound",
              "L^p norm over the window " + fmt(lp_norm(l, W)));
  } else {
    o.info("l-bound", std::string("skipped: field claims ") + to_string(f.class_claim()));
  }
  const auto intervals = p.intervals("intervals");
  if (!intervals.empty()) {
    const auto radii = int_radii(p, "radii");
    ThetaGrid tg;
    tg.s_knots = p.count("s_knots");
    tg.bound = grid;
    const FieldDescriptor family[] = {f};
    const auto set = theta_from_mbounds(family, intervals, radii, tg);
    std::ostringstream ts;
    csv::write_moduli(ts, set);
    o.file("moduli.csv", ts.str());
    o.verdict(set.respects_order(1e-12), "moduli",
              std::to_string(set.entries().size()) + " moduli, order (I inclusion, j) respected");
  }
  return o.r;
}

// ---- equicont --------------------------------------------------------------

std::vector<FieldDescriptor> equicont_family(const Params& p) {
  if (p.present("family")) return p.fields("family");
  return translates(p.field("f"), p.number("shift"), p.count("count"));
}

void check_equicont(const Params& p) {
  if (p.present("family") == p.present("f")) p.fail("family", "give either family or f (translates), not both");
  if (!p.present("family") && p.count("count") == 0) p.fail("count", "must be positive");
  need_positive(p, "radius", p.number("radius"));
  need_positive(p, "r", p.number("r"));
  for (double e : p.numbers("eps"))
    if (!(e > 0.0)) p.fail("eps", "eps values must be positive");
  (void)p.grid();
  (void)equicont_family(p);
}

ExperimentResult run_equicont(const Params& p) {
  Out o;
  const auto family = equicont_family(p);
  const double r = p.number("r"), radius = p.number("radius");
  const auto grid = p.grid();
  std::vector<SampledBound> bounds(family.size());
  parallel_for(static_cast<std::ptrdiff_t>(family.size()),
               [&](std::ptrdiff_t k) { bounds[k] = optimal_m_bound(family[k], radius, {-r, r}, grid); });
  const auto eps = p.numbers("eps");
  const auto rows = equicontinuity_profile(bounds, r, eps);
  std::ostringstream os;
  csv::write_equicontinuity(os, rows);
  o.file("equicontinuity.csv", os.str());
  const bool equi = std::all_of(rows.begin(), rows.end(), [](const auto& row) { return row.delta.has_value(); });
  const bool want = p.text("expect") == "equicontinuous";
  std::string detail = std::to_string(family.size()) + " members;";
  for (const auto& row : rows) detail += " delta(" + fmt(row.eps) + ")=" + (row.delta ? fmt(*row.delta) : "none");
  o.verdict(equi == want, equi ? "equicontinuous" : "not equicontinuous", detail);
  return o.r;
}

// ---- solve / triangular / flow ---------------------------------------------

void check_solve(const Params& p) {
  const auto f = p.field("f");
  need_vector_field(p, "f", f);
  need_lc(p, "f", f);
  need_dim(p, "x0", p.point("x0"), f.dim_in());
  (void)p.policy();
}

std::string trajectory_detail(const Trajectory& tr) {
  std::string s = std::string(to_string(tr.status)) + ", x(end) = (" + point_text(tr.x_final()) + ")";
  if (tr.exit_time) s += ", stopped at t = " + fmt(*tr.exit_time);
  return s;
}

ExperimentResult run_solve(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto x0 = p.point("x0");
  const auto pol = p.policy();
  const double t0 = p.number("t0"), t1 = p.number("t1");
  const auto tr = integrate(f, x0, t0, t1, pol);
  std::ostringstream os;
  csv::write_trajectory(os, tr);
  o.file("trajectory.csv", os.str());
  o.verdict(tr.complete(), "solve", trajectory_detail(tr));
  if (tr.complete()) o.info("solve", "Richardson error estimate " + fmt(solver_tolerance(f, x0, t0, t1, pol)));
  if (!tr.warning.empty()) o.info("solve", tr.warning);
  return o.r;
}

FieldDescriptor forcing(const Params& p, const FieldDescriptor& f, const FieldDescriptor& F) {
  if (p.present("k")) return p.field("k");
  return FieldDescriptor(expr::zero({F.shape().rows, 1}), f.dim_in());
}

void check_triangular(const Params& p) {
  check_solve(p);
  const auto f = p.field("f"), F = p.field("F");
  const std::size_t m = F.shape().rows;
  if (F.shape().cols != m || F.dim_in() != f.dim_in()) p.fail("F", "F must be M x M on the state space of f");
  const auto k = forcing(p, f, F);
  if (k.shape().rows != m || k.shape().cols != 1 || k.dim_in() != f.dim_in())
    p.fail("k", "k must be M x 1 on the state space of f");
  need_dim(p, "y0", p.point("y0"), m);
}

ExperimentResult run_triangular(const Params& p) {
  Out o;
  const auto f = p.field("f"), F = p.field("F");
  const auto k = forcing(p, f, F);
  const auto tr = integrate_triangular(f, F, k, p.point("x0"), p.point("y0"), p.number("t0"), p.number("t1"), p.policy());
  std::ostringstream os;
  csv::write_trajectory(os, tr);
  o.file("trajectory.csv", os.str());
  o.verdict(tr.complete(), "triangular", trajectory_detail(tr) + ", y(end) = (" +
                                             point_text(tr.y_at(tr.size() - 1)) + ")");
  if (!tr.warning.empty()) o.info("triangular", tr.warning);
  return o.r;
}

void check_flow(const Params& p) {
  check_solve(p);
  if (p.numbers("times").empty()) p.fail("times", "needs at least one time");
}

ExperimentResult run_flow(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto x0 = p.point("x0");
  const auto pol = p.policy();
  const auto times = p.numbers("times");
  std::ostringstream os;
  os << "t";
  for (std::size_t i = 0; i < x0.size(); ++i) os << ",x" << i;
  os << ",base\n";
  std::vector<SkewPoint> pts(times.size());
  parallel_for(static_cast<std::ptrdiff_t>(times.size()), [&](std::ptrdiff_t i) { pts[i] = phi1(times[i], f, x0, pol); });
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << num(times[i]);
    for (double v : pts[i].x) os << "," << num(v);
    os << ",\"" << print_field(pts[i].base[0]) << "\"\n";
  }
  o.file("flow.csv", os.str());

  const auto id = phi1(0.0, f, x0, pol);
  o.verdict(id.x == x0 && structurally_equal(id.base[0], f), "identity", "Phi(0, f, x0) = (f, x0) exactly");

  // Cocycle: Phi(t + s) against Phi(t, Phi(s)) for every pair of listed times.
  std::vector<std::pair<double, double>> pairs;
  for (double t : times)
    for (double s : times) pairs.emplace_back(t, s);
  std::vector<double> ratio(pairs.size());
  parallel_for(static_cast<std::ptrdiff_t>(pairs.size()), [&](std::ptrdiff_t i) {
    const auto [t, s] = pairs[i];
    const auto whole = phi1(t + s, f, x0, pol);
    const auto first = phi1(s, f, x0, pol);
    const auto chained = phi1(t, first.base[0], first.x, pol);
    double dev = 0.0;
    for (std::size_t c = 0; c < x0.size(); ++c) dev = std::max(dev, std::abs(whole.x[c] - chained.x[c]));
    ratio[i] = dev / (2.0 * solver_tolerance(f, x0, 0.0, t + s, pol));
  });
  const double worst = *std::max_element(ratio.begin(), ratio.end());
  o.verdict(worst <= 1.0, "cocycle", std::to_string(pairs.size()) + " (t, s) pairs, max deviation / (2 tolerance) = " + fmt(worst));
  return o.r;
}

// ---- continuity / linearize / hull-flow ------------------------------------

void check_continuity(const Params& p) {
  check_solve(p);
  const auto f = p.field("f"), g = p.field("limit");
  if (g.dim_in() != f.dim_in() || !(g.shape() == f.shape())) p.fail("limit", "must match the shape of f");
  need_lc(p, "limit", g);
  if (p.integer("k_max") < 2) p.fail("k_max", "needs at least 2 terms");
}

ExperimentResult run_continuity(const Params& p) {
  Out o;
  const auto seq = translates(p.field("f"), p.number("shift"), p.count("k_max"));
  const auto x0 = p.point("x0");
  const std::vector<std::vector<double>> x0_seq(seq.size(), x0);
  const auto r = continuity_experiment(seq, p.field("limit"), x0_seq, x0, p.number("t0"), p.number("t1"), p.policy(),
                                       p.number("tol"));
  std::ostringstream os;
  csv::write_decay(os, r);
  o.file("decay.csv", os.str());
  o.verdict(r.pass, "continuity", "error k=1 " + fmt(r.error.front()) + ", k=" + std::to_string(seq.size()) + " " +
                                      fmt(r.error.back()));
  return o.r;
}

void check_linearize(const Params& p) {
  check_solve(p);
  const auto f = p.field("f");
  need_jacobian_shape(p, f, jacobian_of(p, f));
  need_dim(p, "y0", p.point("y0"), f.dim_in());
  const auto eps = p.numbers("eps");
  if (eps.size() < 2) p.fail("eps", "needs at least two rungs");
  for (double e : eps)
    if (!(e > 0.0)) p.fail("eps", "rungs must be positive");
}

ExperimentResult run_linearize(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto eps = p.numbers("eps");
  const auto r = linearized_check(f, jacobian_of(p, f), p.point("x0"), p.point("y0"), p.number("t0"), p.number("t1"),
                                  eps, p.policy(), p.number("tol"));
  std::ostringstream os;
  csv::write_decay(os, r);
  o.file("decay.csv", os.str());
  const std::size_t excluded = static_cast<std::size_t>(std::count(r.excluded.begin(), r.excluded.end(), true));
  o.verdict(r.pass, "linearize", "slope " + fmt(r.slope) + ", err(" + fmt(eps.front()) + ") = " + fmt(r.error.front()) +
                                     ", err(" + fmt(eps.back()) + ") = " + fmt(r.error.back()) + ", " +
                                     std::to_string(excluded) + " rungs under the noise floor");
  return o.r;
}

void check_hull_flow(const Params& p) {
  check_solve(p);
  const auto f = p.field("f");
  need_jacobian_shape(p, f, jacobian_of(p, f));
  need_dim(p, "y0", p.point("y0"), f.dim_in());
  if (p.numbers("taus").empty()) p.fail("taus", "needs at least one translation");
}

ExperimentResult run_hull_flow(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto x0 = p.point("x0");
  const auto rows = hull_linearized_flow(f, jacobian_of(p, f), p.numbers("taus"), p.number("t"), x0, p.point("y0"),
                                         p.policy());
  std::ostringstream os;
  os << "tau";
  for (std::size_t i = 0; i < x0.size(); ++i) os << ",x" << i;
  for (std::size_t i = 0; i < x0.size(); ++i) os << ",y" << i;
  os << "\n";
  bool finite = true;
  for (const auto& row : rows) {
    os << num(row.tau);
    for (double v : row.x) os << "," << num(v), finite = finite && std::isfinite(v);
    for (double v : row.y) os << "," << num(v), finite = finite && std::isfinite(v);
    os << "\n";
  }
  o.file("hull_flow.csv", os.str());
  o.verdict(finite, "hull-flow", std::to_string(rows.size()) + " fibers at t = " + fmt(p.number("t")));
  return o.r;
}

// ---- hull ------------------------------------------------------------------

void check_hull(const Params& p) {
  const auto fs = p.fields("f");
  const auto expect = p.words("expect");
  if (!expect.empty() && expect.size() != fs.size())
    p.fail("expect", "give one expectation per field (" + std::to_string(fs.size()) + ")");
  for (const auto& e : expect)
    if (e != "compact" && e != "unbounded" && e != "not-uc" && e != "any")
      p.fail("expect", "unknown expectation '" + e + "' (compact, unbounded, not-uc, any)");
  const auto probes = p.points("probes");
  if (probes.empty()) p.fail("probes", "needs at least one probe point");
  for (const auto& f : fs)
    for (const auto& x : probes) need_dim(p, "probes", x, f.dim_in());
  need_positive(p, "r", p.number("r"));
  need_positive(p, "horizon", p.number("horizon"));
  need_positive(p, "tau_step", p.number("tau_step"));
  need_positive(p, "delta0", p.number("delta0"));
  if (p.integer("delta_levels") < 1) p.fail("delta_levels", "must be at least 1");
  for (double e : p.numbers("eps"))
    if (!(e > 0.0)) p.fail("eps", "eps values must be positive");
}

ExperimentResult run_hull(const Params& p) {
  Out o;
  const auto fs = p.fields("f");
  auto expect = p.words("expect");
  if (expect.empty()) expect.assign(fs.size(), "compact");
  HullOptions opts;
  opts.horizon = p.number("horizon");
  opts.tau_step = p.number("tau_step");
  opts.delta0 = p.number("delta0");
  opts.delta_levels = static_cast<int>(p.integer("delta_levels"));
  const auto probes = p.points("probes");
  const auto eps = p.numbers("eps");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto rep = hull_compactness_test(fs[i], probes, p.number("r"), eps, opts);
    std::ostringstream os;
    os << "# field " << print_field(fs[i]) << "\n";
    csv::write_hull(os, rep);
    o.file("hull_" + std::to_string(i + 1) + ".csv", os.str());
    const std::string detail = "field " + std::to_string(i + 1) + ": bounded " + (rep.bounded ? "yes" : "no") +
                               ", uniformly continuous " + (rep.uniformly_continuous ? "yes" : "no") +
                               " (expected " + expect[i] + ")";
    if (expect[i] == "any") {
      o.info("hull", detail);
      continue;
    }
    const bool ok = expect[i] == "compact"     ? rep.pass()
                    : expect[i] == "unbounded" ? !rep.bounded
                                               : !rep.uniformly_continuous;
    o.verdict(ok, "hull", detail);
  }
  return o.r;
}

// ---- ramp example ----------------------------------------------------------

void check_ramp_example(const Params& p) {
  if (p.integer("k_max") < 2) p.fail("k_max", "needs at least 2");
  if (p.integer("ttheta_k") < 2) p.fail("ttheta_k", "needs at least 2");
  if (p.integer("metric_k") < 2) p.fail("metric_k", "needs at least 2");
  if (p.integer("radius") < 1) p.fail("radius", "must be at least 1");
  if (p.count("n_t") == 0 || p.count("n_x") == 0) p.fail("n_t", "resolution must be positive");
  if (p.numbers("eps").size() < 2) p.fail("eps", "needs at least two rungs");
  (void)p.count("slack_cells");
  (void)p.policy();
}

ExperimentResult run_ramp_example(const Params& p) {
  Out o;
  const auto ex = ramp_example();

  // Base: d_k = int_{-4}^{4} |H(t + 4k) - Hbar(t)| dt, exact.
  const auto H = ScalarFunction::ramp_wave(), Hb = ScalarFunction::step_wave();
  const std::size_t K = p.count("k_max");
  std::vector<double> d;
  std::ostringstream bs;
  bs << "k,distance\n";
  for (std::size_t k = 1; k <= K; ++k) {
    d.push_back(l1_distance(H, 4.0 * static_cast<double>(k), Hb, 0.0, {-4.0, 4.0}));
    bs << k << "," << num(d.back()) << "\n";
  }
  o.file("base_distance.csv", bs.str());
  bool strict = true;
  for (std::size_t i = 1; i < d.size(); ++i) strict = strict && d[i] < d[i - 1];
  o.verdict(strict && d.back() < d.front() / 4.0, "base H_4k -> Hbar",
            "d_1 = " + fmt(d.front()) + ", d_" + std::to_string(K) + " = " + fmt(d.back()) + ", strictly decreasing " +
                (strict ? "yes" : "no"));

  // f_{4k} -> g in the T_Theta metric.
  MetricConfig mc;
  mc.theta = Modulus::linear(p.number("theta_slope"));
  const auto mt = convergence_diagnostic(translates(ex.f, 4.0, p.count("metric_k")), ex.g, mc, SeminormKind::TTheta);
  std::vector<double> mk;
  for (std::size_t k = 1; k <= mt.distance.size(); ++k) mk.push_back(static_cast<double>(k));
  std::ostringstream ms;
  csv::write_convergence(ms, mt, mk);
  o.file("metric_decay.csv", ms.str());
  o.verdict(mt.ratio < 1.0 && mt.trend >= 0.75, "metric f_4k -> g",
            "ratio " + fmt(mt.ratio) + ", nonincreasing fraction " + fmt(mt.trend));

  // T_Theta seminorm of F_{4k} - G.
  const auto I = p.interval("interval");
  const int j = static_cast<int>(p.integer("radius"));
  const Resolution res{p.count("n_t"), p.count("n_x"), p.count("slack_cells")};
  const std::size_t TK = p.count("ttheta_k");
  std::vector<double> tt(TK);
  parallel_for(static_cast<std::ptrdiff_t>(TK), [&](std::ptrdiff_t k) {
    const auto diff = difference(translate(ex.F, 4.0 * static_cast<double>(k + 1)), ex.G);
    tt[k] = seminorm_TTheta(diff, I, j, mc.theta, res).value;
  });
  std::ostringstream ts;
  ts << "k,ttheta\n";
  for (std::size_t k = 0; k < TK; ++k) ts << k + 1 << "," << num(tt[k]) << "\n";
  o.file("ttheta_decay.csv", ts.str());
  const double ratio = tt.back() / tt.front();
  o.verdict(nonincreasing(tt) && ratio < 0.5, "T_Theta F_4k -> G",
            "k=1 " + fmt(tt.front()) + ", k=" + std::to_string(TK) + " " + fmt(tt.back()) + ", ratio " + fmt(ratio));

  // Linearization on (f, F).
  const double x0[] = {0.0}, y0[] = {1.0};
  const auto eps = p.numbers("eps");
  const auto lr = linearized_check(ex.f, ex.F, x0, y0, 0.0, 2.0, eps, p.policy());
  std::ostringstream ls;
  csv::write_decay(ls, lr);
  o.file("linearize.csv", ls.str());
  o.verdict(lr.slope >= 0.9 && lr.error.back() < lr.error.front() / 30.0, "linearization (f, F)",
            "slope " + fmt(lr.slope) + ", err first " + fmt(lr.error.front()) + ", last " + fmt(lr.error.back()));
  return o.r;
}

// ---- audits ----------------------------------------------------------------

void check_ordering(const Params& p) {
  if (p.count("count") == 0) p.fail("count", "must be positive");
  if (p.intervals("intervals").empty()) p.fail("intervals", "needs at least one interval");
  (void)int_radii(p, "radii");
  if (p.count("n_t") == 0) p.fail("n_t", "must be positive");
  if (p.count("cells_per_unit") == 0) p.fail("cells_per_unit", "must be positive");
  if (p.count("t_steps") == 0 || p.count("x_cells") == 0) p.fail("t_steps", "grid must be positive");
}

ExperimentResult run_ordering(const Params& p) {
  Out o;
  std::mt19937_64 rng(p.seed());
  std::vector<FieldDescriptor> fs;
  for (std::size_t i = 0; i < p.count("count"); ++i) fs.push_back(random_scalar_field(rng));
  const auto intervals = p.intervals("intervals");
  const auto radii = int_radii(p, "radii");
  const auto points = dyadic_points(1, p.count("d_count"));
  const Modulus theta = Modulus::linear(p.number("theta_slope"));
  const double tol = p.number("tolerance");
  BoundGrid grid;
  grid.t_steps = p.count("t_steps");
  grid.x_cells = p.count("x_cells");
  grid.seed = p.seed();

  struct Row {
    std::size_t field;
    Interval I;
    int j;
    double tb, tt;
    std::vector<double> td;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (const auto& I : intervals)
      for (int j : radii) rows.push_back({i, I, j, 0.0, 0.0, {}});
  parallel_for(static_cast<std::ptrdiff_t>(rows.size()), [&](std::ptrdiff_t r) {
    Row& row = rows[r];
    const auto& f = fs[row.field];
    const Resolution res{p.count("n_t"), p.count("cells_per_unit") * 2 * static_cast<std::size_t>(row.j) + 1, 0};
    row.tt = seminorm_TTheta(f, row.I, row.j, theta, res).value;
    row.tb = seminorm_TB(f, row.I, row.j, grid);
    for (const auto& x : points) row.td.push_back(std::abs(x[0]) <= row.j ? seminorm_TD(f, row.I, x) : -1.0);
  });

  std::ostringstream os;
  os << "field,I_lo,I_hi,j,x,td,ttheta,tb,ok\n";
  std::size_t bad = 0, checks = 0;
  for (const auto& row : rows) {
    const bool upper = row.tt <= row.tb * (1.0 + tol) + 1e-12;
    ++checks;
    bad += !upper;
    os << row.field + 1 << "," << num(row.I.lo) << "," << num(row.I.hi) << "," << row.j << ",,," << num(row.tt) << ","
       << num(row.tb) << "," << int(upper) << "\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (row.td[k] < 0.0) continue;
      const bool lower = row.td[k] <= row.tt + 1e-9;
      ++checks;
      bad += !lower;
      os << row.field + 1 << "," << num(row.I.lo) << "," << num(row.I.hi) << "," << row.j << "," << num(points[k][0])
         << "," << num(row.td[k]) << "," << num(row.tt) << ",," << int(lower) << "\n";
    }
  }
  o.file("ordering.csv", os.str());
  std::string listing;
  for (std::size_t i = 0; i < fs.size(); ++i) listing += std::to_string(i + 1) + " " + print_field(fs[i]) + "\n";
  o.file("fields.txt", listing);
  o.verdict(bad == 0, "ordering TD <= TTheta <= TB",
            std::to_string(checks) + " comparisons on " + std::to_string(fs.size()) + " random fields, " +
                std::to_string(bad) + " violations");
  return o.r;
}

void check_gronwall(const Params& p) {
  const auto f = p.field("f");
  need_vector_field(p, "f", f);
  need_lc(p, "f", f);
  if (f.dim_in() != 1) p.fail("f", "the audit draws scalar initial states");
  need_positive(p, "range", p.number("range"));
  if (p.number("lipschitz") < 0.0) p.fail("lipschitz", "must be nonnegative");
  if (p.count("pairs") == 0) p.fail("pairs", "must be positive");
  (void)p.policy();
}

ExperimentResult run_gronwall(const Params& p) {
  Out o;
  const auto f = p.field("f");
  const auto pol = p.policy();
  const double l = p.number("lipschitz"), range = p.number("range"), slack = p.number("slack");
  const double t0 = p.number("t0"), t1 = p.number("t1");
  std::mt19937_64 rng(p.seed());
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<std::pair<double, double>> starts(p.count("pairs"));
  for (auto& s : starts) s = {u(rng), u(rng)};
  std::vector<double> worst(starts.size());
  std::vector<std::size_t> violations(starts.size());
  parallel_for(static_cast<std::ptrdiff_t>(starts.size()), [&](std::ptrdiff_t i) {
    const double a[] = {starts[i].first}, b[] = {starts[i].second};
    const auto ta = integrate(f, a, t0, t1, pol), tb = integrate(f, b, t0, t1, pol);
    const double d0 = std::abs(a[0] - b[0]);
    for (std::size_t k = 0; k < std::min(ta.size(), tb.size()); ++k) {
      const double bound = d0 * std::exp(l * std::abs(ta.t(k) - t0));
      const double d = std::abs(ta.x_at(k)[0] - tb.x_at(k)[0]);
      if (bound > 0.0) worst[i] = std::max(worst[i], d / bound);
      if (d > bound * (1.0 + slack)) ++violations[i];
    }
    if (!ta.complete() || !tb.complete()) ++violations[i];
  });
  std::ostringstream os;
  os << "pair,x0_a,x0_b,max_ratio,violations\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    os << i + 1 << "," << num(starts[i].first) << "," << num(starts[i].second) << "," << num(worst[i]) << ","
       << violations[i] << "\n";
    total += violations[i];
  }
  o.file("gronwall.csv", os.str());
  o.verdict(total == 0, "gronwall",
            std::to_string(starts.size()) + " pairs, max |dx| / (|dx0| e^{l t}) = " +
                fmt(*std::max_element(worst.begin(), worst.end())) + ", " + std::to_string(total) + " violations");
  return o.r;
}

void check_solver_order(const Params& p) {
  need_positive(p, "dt_max", p.number("dt_max"));
  if (p.integer("levels") < 2) p.fail("levels", "needs at least 2 levels");
  if (p.count("picard_cells") < 2) p.fail("picard_cells", "needs at least 2 cells");
  need_positive(p, "picard_t1", p.number("picard_t1"));
}

ExperimentResult run_solver_order(const Params& p) {
  Out o;
  const auto lin = FieldDescriptor(expr::linear(1, 1, {1.0}), 1);
  const auto sinx =
      FieldDescriptor(expr::product(expr::time(ScalarFunction::sinusoid(1.0, 1.0, 0.0)), expr::linear(1, 1, {1.0})), 1);
  struct Case {
    const char* name;
    const FieldDescriptor* f;
    double (*exact)(double);
  };
  const Case cases[] = {{"x", &lin, [](double t) { return std::exp(t); }},
                        {"sin(t) x", &sinx, [](double t) { return std::exp(1.0 - std::cos(t)); }}};
  const double x0[] = {1.0};

  StepPolicy heun;
  heun.dt = 1e-3;
  const double e = std::exp(1.0);
  const double rel = std::abs(integrate(lin, x0, 0.0, 1.0, heun).x_final()[0] - e) / e;
  o.verdict(rel < 1e-4, "accuracy", "x' = x, heun dt=1e-3: |x(1) - e| / e = " + fmt(rel));

  std::ostringstream os;
  os << "scheme,field,dt,error\n";
  const long levels = p.integer("levels");
  for (Scheme s : {Scheme::averaged_euler, Scheme::averaged_heun}) {
    const double target = s == Scheme::averaged_euler ? 1.0 : 2.0;
    for (const auto& c : cases) {
      std::vector<double> dts, errs;
      for (long q = 0; q < levels; ++q) {
        StepPolicy pol;
        pol.scheme = s;
        pol.dt = p.number("dt_max") * std::ldexp(1.0, -static_cast<int>(q));
        const auto tr = integrate(*c.f, x0, 0.0, 1.0, pol);
        double err = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) err = std::max(err, std::abs(tr.x_at(k)[0] - c.exact(tr.t(k))));
        dts.push_back(pol.dt);
        errs.push_back(err);
        os << to_string(s) << "," << c.name << "," << num(pol.dt) << "," << num(err) << "\n";
      }
      const double slope = loglog_slope(dts, errs);
      o.verdict(std::abs(slope - target) <= 0.3, std::string("order ") + to_string(s),
                std::string(c.name) + ": " + fmt(slope) + " (expected " + fmt(target) + " +- 0.3)");
    }
  }
  o.file("order.csv", os.str());

  const auto ex = ramp_example();
  std::ostringstream ps;
  ps << "field,iterations,residual,gap\n";
  const std::pair<const char*, const FieldDescriptor*> picard_cases[] = {{"x", &lin}, {"ramp f", &ex.f}};
  for (const auto& [label, f] : picard_cases) {
    const double start[] = {0.5};
    const double T = p.number("picard_t1");
    const auto pic = picard_oracle(*f, start, 0.0, T, p.count("picard_cells"));
    StepPolicy pol;
    pol.dt = 2e-4;
    const double gap = sup_distance(integrate(*f, start, 0.0, T, pol), pic.trajectory);
    ps << label << "," << pic.iterations << "," << num(pic.residual) << "," << num(gap) << "\n";
    o.verdict(pic.converged && gap < 1e-6, "picard",
              std::string(label) + ": gap " + fmt(gap) + " after " + std::to_string(pic.iterations) + " iterations");
  }
  o.file("picard.csv", ps.str());
  return o.r;
}

}  // namespace

const std::vector<Runner>& runners() {
  static const std::vector<Runner> list{
      {"seminorm", check_seminorm, run_seminorm},
      {"metric", check_metric, run_metric},
      {"converge", check_converge, run_converge},
      {"bounds", check_bounds, run_bounds},
      {"equicont", check_equicont, run_equicont},
      {"solve", check_solve, run_solve},
      {"triangular", check_triangular, run_triangular},
      {"flow", check_flow, run_flow},
      {"continuity", check_continuity, run_continuity},
      {"linearize", check_linearize, run_linearize},
      {"hull", check_hull, run_hull},
      {"hull-flow", check_hull_flow, run_hull_flow},
      {"ramp-example", check_ramp_example, run_ramp_example},
      {"ordering-audit", check_ordering, run_ordering},
      {"gronwall-audit", check_gronwall, run_gronwall},
      {"solver-order", check_solver_order, run_solver_order},
  };
  return list;
}

}  // namespace carath::detail
