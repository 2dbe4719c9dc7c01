#include "carath/csv.hpp"

#include <cmath>
#include <cstdio>

namespace carath::csv {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_bound(std::ostream& os, const SampledBound& b, const std::string& what) {
  os << "# " << what << ",I=[" << num(b.window.lo) << ";" << num(b.window.hi) << "],j=" << num(b.radius)
     << ",p=" << num(b.p) << "\n";
  os << "t,value\n";
  for (std::size_t k = 0; k < b.values.size(); ++k) os << num(b.t_at(k)) << "," << num(b.values[k]) << "\n";
}

void write_moduli(std::ostream& os, const ModulusSet& set) {
  os << "I_lo,I_hi,j,s,theta\n";
  for (const auto& [key, theta] : set.entries())
    for (std::size_t i = 0; i < theta.knots().size(); ++i)
      os << num(key.interval.lo) << "," << num(key.interval.hi) << "," << key.radius << "," << num(theta.knots()[i])
         << "," << num(theta.values()[i]) << "\n";
}

void write_trajectory(std::ostream& os, const Trajectory& tr) {
  os << "t";
  for (std::size_t i = 0; i < tr.dim; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < tr.y_dim; ++i) os << ",y" << i;
  os << "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << num(tr.t(k));
    for (double v : tr.x_at(k)) os << "," << num(v);
    if (tr.y_dim)
      for (double v : tr.y_at(k)) os << "," << num(v);
    os << "\n";
  }
  os << "# status," << to_string(tr.status) << ",exit_time," << (tr.exit_time ? num(*tr.exit_time) : "") << "\n";
}

void write_decay(std::ostream& os, const DecayReport& r) {
  os << r.parameter << ",error,slope_running,excluded\n";
  std::vector<bool> keep;
  for (std::size_t i = 0; i < r.error.size(); ++i) {
    const bool excluded = !r.excluded.empty() && r.excluded[i];
    keep.push_back(!excluded);
    const double running = loglog_slope(std::span(r.ladder).first(i + 1), std::span(r.error).first(i + 1), keep);
    os << num(r.ladder[i]) << "," << num(r.error[i]) << "," << num(running) << "," << (excluded ? 1 : 0) << "\n";
  }
  os << "# slope," << num(r.slope) << ",verdict," << (r.pass ? "PASS" : "FAIL") << "\n";
}

void write_equicontinuity(std::ostream& os, std::span<const EquicontinuityRow> rows) {
  os << "eps,delta\n";
  for (const auto& row : rows) os << num(row.eps) << "," << (row.delta ? num(*row.delta) : "FAIL") << "\n";
}

void write_convergence(std::ostream& os, const ConvergenceTable& t, std::span<const double> params) {
  os << "k,distance\n";
  for (std::size_t i = 0; i < t.distance.size(); ++i)
    os << num(i < params.size() ? params[i] : static_cast<double>(i + 1)) << "," << num(t.distance[i]) << "\n";
  os << "# trend," << num(t.trend) << ",ratio," << num(t.ratio) << "\n";
}

void write_hull(std::ostream& os, const HullReport& r) {
  os << "probe,sup_full,sup_half,bounded,eps,delta\n";
  for (const auto& p : r.probes) {
    std::string probe;
    for (std::size_t i = 0; i < p.probe.size(); ++i) probe += (i ? ";" : "") + num(p.probe[i]);
    for (const auto& row : p.delta)
      os << probe << "," << num(p.sup_full) << "," << num(p.sup_half) << "," << (p.bounded ? 1 : 0) << ","
         << num(row.eps) << "," << (row.delta ? num(*row.delta) : "FAIL") << "\n";
  }
}

}  // namespace carath::csv
