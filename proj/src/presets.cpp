#include <string>

#include "carath/errors.hpp"
#include "carath/experiment.hpp"

namespace carath {
namespace {

struct Preset {
  const char* name;
  const char* description;
  const char* text;
};

const Preset presets[] = {
    {"example6-full", "ramp-wave example: base distances, metric and T_Theta decay, linearization",
     R"(schema_version = 1
experiment = ramp-example
output = out/example6-full
k_max = 20
ttheta_k = 10
metric_k = 6
interval = 0 4
radius = 3
theta_slope = 2
n_t = 64
n_x = 61
slack_cells = 0
dt = 1e-3
)"},
    {"ordering-audit", "TD <= TTheta <= TB on 20 random fields",
     R"(schema_version = 1
experiment = ordering-audit
seed = 20261016
output = out/ordering-audit
count = 20
intervals = -1 1; 0 2; -2 2
radii = 1 2
)"},
    {"hull-compactness", "hull boundedness and uniform continuity: two compact hulls and one unbounded",
     R"(schema_version = 1
experiment = hull
output = out/hull-compactness
field.sinx = (product (time (sin 1 1 0)) (linear 1 1 1))
field.tx = (product (time (poly 0 1 0 0)) (linear 1 1 1))
f = sinx, @ramp.f, tx
expect = compact, compact, unbounded
probes = 0; 1; -1
r = 4
eps = 0.5 0.1 0.05
)"},
    {"gronwall-audit", "Gronwall bound on 50 random initial pairs for the ramp field",
     R"(schema_version = 1
experiment = gronwall-audit
seed = 20261016
output = out/gronwall-audit
f = @ramp.f
lipschitz = 1/3
pairs = 50
range = 3
dt = 1/1024
)"},
    {"solver-order", "Heun accuracy, Euler and Heun orders, Picard agreement",
     R"(schema_version = 1
experiment = solver-order
output = out/solver-order
dt_max = 1/32
levels = 5
)"},
    {"equicontinuity", "translates of F(t, x) = H(t + x/3) / 3 form an L^1_loc-equicontinuous family",
     R"(schema_version = 1
experiment = equicont
output = out/equicontinuity
f = @ramp.F
shift = 4
count = 10
r = 8
eps = 0.5 0.25 0.125
expect = equicontinuous
)"},
    {"spikes", "spikes n 1[0, 1/n] down to the grid cell: bounded in L^1 but not equicontinuous",
     R"(schema_version = 1
experiment = equicont
output = out/spikes
field.s1 = (time (pw (breaks 0 1) (piece 0) (piece 1) (piece 0)))
field.s4 = (time (pw (breaks 0 1/4) (piece 0) (piece 4) (piece 0)))
field.s16 = (time (pw (breaks 0 1/16) (piece 0) (piece 16) (piece 0)))
field.s64 = (time (pw (breaks 0 1/64) (piece 0) (piece 64) (piece 0)))
field.s256 = (time (pw (breaks 0 1/256) (piece 0) (piece 256) (piece 0)))
field.s1024 = (time (pw (breaks 0 1/1024) (piece 0) (piece 1024) (piece 0)))
family = s1, s4, s16, s64, s256, s1024
r = 2
t_steps = 4096
eps = 0.5
expect = not-equicontinuous
)"},
};

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& p : presets) out.push_back({p.name, p.description});
  return out;
}

std::string preset_text(std::string_view name) {
  for (const auto& p : presets)
    if (name == p.name) return p.text;
  std::string known;
  for (const auto& p : presets) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw IndexError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace carath
