#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "carath/bounds.hpp"
#include "carath/skewflow.hpp"
#include "carath/solver.hpp"
#include "carath/topology.hpp"

namespace carath::csv {

/// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string num(double v);

/// Header comment naming window, radius and exponent, then `t,value` rows.
void write_bound(std::ostream& os, const SampledBound& b, const std::string& what);
/// Columns I_lo,I_hi,j,s,theta over every entry.
void write_moduli(std::ostream& os, const ModulusSet& set);
/// Columns t,x0..,y0..; the last line is `# status,<status>,exit_time,<t or empty>`.
void write_trajectory(std::ostream& os, const Trajectory& tr);
/// Columns param,error,slope_running,excluded; then `# slope,<s>,verdict,<PASS|FAIL>`.
void write_decay(std::ostream& os, const DecayReport& r);
/// Columns eps,delta; delta is `inf` when every window passes and FAIL when none does.
void write_equicontinuity(std::ostream& os, std::span<const EquicontinuityRow> rows);
/// Columns k,distance; then `# trend,<t>,ratio,<r>`.
void write_convergence(std::ostream& os, const ConvergenceTable& t, std::span<const double> params);
/// One row per probe: probe,sup_full,sup_half,bounded,eps,delta.
void write_hull(std::ostream& os, const HullReport& r);

}  // namespace carath::csv
