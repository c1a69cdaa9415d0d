#include <algorithm>
#include <string>

#include "borpic/error.hpp"
#include "borpic/run_config.hpp"

namespace borpic {

namespace {

// desk-scale mesh: element size 0.04 m gives about 2k faces with the layer
constexpr const char* desk_mesh = R"(
[mesh]
z_min = -0.5
z_max = 0.5
rho_max = 1.0
element_size = 0.04
jitter = 0.15
periodic_z = true

[pml]
mode = "pml"
layers = 10
taper_order = 3
reflection = 1e-6
)";

// three radial transits of the 1 m physical region after a 1 ns pulse
constexpr const char* surface_current = R"(
[solver]
polarization = "both"
dl = 1e-3
steps = 3600

[output]
probe_every = 1
energy_every = 10

[[probe]]
name = "near"
z = 0.0
rho = 0.5

[[probe]]
name = "far"
z = 0.0
rho = 0.9

[run]
name = "surface-current"

[[source]]
kind = "axial"
radius = 0.25
height = 0.3
frequency = 1e9
cycles = 1
)";

constexpr const char* ring_case = R"(
[solver]
polarization = "both"
dl = 1e-3
steps = 18000

[particles]
shape_order = 2
reflector = "default"

[[particle]]
z = -0.15
rho = 0.75
v_c = [0.0129, 0.0233, 0.0025]
electrons = 1e6

[[probe]]
name = "near"
z = -0.15
rho = 0.6

[output]
probe_every = 10
energy_every = 10
trajectory = true

[run]
name = "ring"
)";

// ten Larmor periods at dt = 1 mm / c
constexpr const char* gyromotion = R"(
[solver]
polarization = "te"
dl = 1e-3
steps = 125600

[particles]
external_b = [0.0, 0.0, 8.53e-4]
reflector = "none"

[[particle]]
z = 0.45
rho = 0.0
v_c = [0.025, 0.0, 0.0]
electrons = 1e6

[[probe]]
name = "probe"
z = 0.0
rho = 0.9

[output]
probe_every = 10
energy_every = 100
trajectory = true

[run]
name = "gyromotion"
)";

struct Preset {
  const char* name;
  const char* base;
  std::vector<std::string> overrides;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"te-surface-current", surface_current,
       {"run.name=te-surface-current", "source.0.kind=axial"}},
      {"tm-surface-current", surface_current,
       {"run.name=tm-surface-current", "source.0.kind=azimuthal"}},
      {"ring-near-pml-case1", ring_case, {"run.name=ring-near-pml-case1", "particles.reflector=1.1"}},
      {"ring-near-pml-case2", ring_case, {"run.name=ring-near-pml-case2", "particles.reflector=1.0"}},
      {"ring-near-pml-case3", ring_case, {"run.name=ring-near-pml-case3", "particles.reflector=0.9"}},
      {"gyromotion-pml", gyromotion, {"run.name=gyromotion-pml"}},
      {"gyromotion-pmc", gyromotion, {"run.name=gyromotion-pmc", "pml.mode=pmc-closed"}},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.emplace_back(p.name);
  return names;
}

ConfigDocument preset_document(const std::string& name) {
  for (const auto& p : presets()) {
    if (name != p.name) continue;
    ConfigDocument doc = parse_config(std::string(desk_mesh) + p.base);
    for (const auto& o : p.overrides) apply_override(doc, o);
    return doc;
  }
  std::string known;
  for (const auto& p : presets()) known += std::string(known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset \"" + name + "\" (known: " + known + ")");
}

}  // namespace borpic
