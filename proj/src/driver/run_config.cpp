#include "borpic/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"

namespace borpic {

double PulseProfile::value(double t) const {
  const double end = duration();
  if (!(t >= 0.0) || !(t <= end)) return 0.0;
  double s = std::sin(two_pi * frequency * t);
  if (raised_cosine) s *= 0.5 * (1.0 - std::cos(two_pi * t / end));
  return s;
}

double RunConfig::pml_thickness() const {
  if (!pml.enabled) return 0.0;
  if (pml.thickness) return *pml.thickness;
  return pml.layers * mesh.element_size;
}

std::optional<double> RunConfig::reflector_radius() const {
  if (reflector_disabled) return std::nullopt;
  if (reflector) return reflector;
  if (pml.enabled) return pml_front() - 0.1;
  return std::nullopt;
}

namespace {

WallCondition wall(const ConfigTable& t, const std::string& key, WallCondition fallback) {
  std::string v = t.string(key, fallback == WallCondition::pmc ? "pmc" : "pec");
  if (v == "pmc") return WallCondition::pmc;
  if (v == "pec") return WallCondition::pec;
  t.fail(key, "expected \"pmc\" or \"pec\", got \"" + v + "\"");
}

Vec3 vector3(const ConfigTable& t, const std::string& key, Vec3 fallback) {
  if (!t.has(key)) {
    t.find(key);
    return fallback;
  }
  auto v = t.numbers(key, {});
  if (v.size() != 3) t.fail(key, "expected three components (z, rho, phi)");
  return {v[0], v[1], v[2]};
}

int positive_int(const ConfigTable& t, const std::string& key, long fallback, long min = 1) {
  long v = t.integer(key, fallback);
  if (v < min) t.fail(key, "must be at least " + std::to_string(min));
  return static_cast<int>(v);
}

double positive(const ConfigTable& t, const std::string& key, double fallback) {
  double v = t.number(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) t.fail(key, "must be positive");
  return v;
}

void read_mesh(const ConfigTable& t, RunConfig& rc) {
  auto& m = rc.mesh;
  m.path = t.string("path", "");
  std::string fmt = t.string("format", "native");
  if (fmt == "native")
    m.format = MeshFormat::native;
  else if (fmt == "msh2")
    m.format = MeshFormat::msh2;
  else
    t.fail("format", "expected \"native\" or \"msh2\"");
  m.z_min = t.number("z_min", m.z_min);
  m.z_max = t.number("z_max", m.z_max);
  if (!(m.z_max > m.z_min)) t.fail("z_max", "must exceed z_min");
  m.rho_max = positive(t, "rho_max", m.rho_max);
  m.element_size = positive(t, "element_size", m.element_size);
  m.jitter = t.number("jitter", m.jitter);
  if (m.jitter < 0.0 || m.jitter >= 0.4) t.fail("jitter", "must lie in [0, 0.4)");
  m.periodic_z = t.boolean("periodic_z", m.periodic_z);
  t.reject_unknown();
}

void read_solver(const ConfigTable& t, RunConfig& rc) {
  std::string pol = t.string("polarization", "both");
  if (pol == "te") {
    rc.te = true;
    rc.tm = false;
  } else if (pol == "tm") {
    rc.te = false;
    rc.tm = true;
  } else if (pol == "both") {
    rc.te = rc.tm = true;
  } else {
    t.fail("polarization", "expected \"te\", \"tm\" or \"both\"");
  }
  if (const ConfigValue* dt = t.find("dt")) {
    if (dt->is_string()) {
      if (std::get<std::string>(dt->data) != "auto") t.fail("dt", "expected seconds or \"auto\"");
    } else {
      rc.dt = positive(t, "dt", 1.0);
    }
  }
  if (t.has("dl")) {
    if (rc.dt) t.fail("dl", "give either dt or dl, not both");
    rc.dt = positive(t, "dl", 1.0) / c_light;
  }
  rc.dt_safety = positive(t, "safety", rc.dt_safety);
  rc.steps = t.integer("steps", rc.steps);
  if (rc.steps < 0) t.fail("steps", "must not be negative");
  rc.boundary.te_axis = wall(t, "te_axis", rc.boundary.te_axis);
  rc.boundary.tm_axis = wall(t, "tm_axis", rc.boundary.tm_axis);
  rc.boundary.te_rim = wall(t, "te_rim", rc.boundary.te_rim);
  rc.boundary.tm_rim = wall(t, "tm_rim", rc.boundary.tm_rim);
  std::string mass = t.string("mass", "exact");
  if (mass == "exact")
    rc.mass.kind = MassSolverKind::exact;
  else if (mass == "spai")
    rc.mass.kind = MassSolverKind::spai;
  else
    t.fail("mass", "expected \"exact\" or \"spai\"");
  rc.mass.spai_level = positive_int(t, "spai_level", rc.mass.spai_level);
  rc.mass.spai_drop_tol = t.number("spai_drop_tol", rc.mass.spai_drop_tol);
  rc.mass.fallback_residual = positive(t, "spai_fallback", rc.mass.fallback_residual);
  t.reject_unknown();
}

void read_pml(const ConfigTable& t, RunConfig& rc) {
  std::string mode = t.string("mode", "pml");
  if (mode == "pml")
    rc.pml.enabled = true;
  else if (mode == "pmc-closed")
    rc.pml.enabled = false;
  else
    t.fail("mode", "expected \"pml\" or \"pmc-closed\"");
  rc.pml.layers = positive_int(t, "layers", rc.pml.layers);
  if (t.has("thickness")) rc.pml.thickness = positive(t, "thickness", 1.0);
  rc.pml.taper_order = positive_int(t, "taper_order", rc.pml.taper_order);
  rc.pml.reflection = t.number("reflection", rc.pml.reflection);
  if (!(rc.pml.reflection > 0.0 && rc.pml.reflection < 1.0))
    t.fail("reflection", "must lie in (0, 1)");
  if (t.has("sigma_max")) {
    double s = t.number("sigma_max", 0.0);
    if (s < 0.0) t.fail("sigma_max", "must not be negative");
    rc.pml.sigma_max = s;
  }
  t.reject_unknown();
}

void read_particles(const ConfigTable& t, RunConfig& rc) {
  rc.shape_order = positive_int(t, "shape_order", rc.shape_order, 0);
  if (rc.shape_order > 3) t.fail("shape_order", "must lie in 0..3");
  if (t.has("alpha")) rc.shape_alpha = positive(t, "alpha", 1.0);
  rc.shape_renormalize_axis = t.boolean("renormalize_axis", rc.shape_renormalize_axis);
  if (const ConfigValue* r = t.find("reflector")) {
    if (r->is_string()) {
      std::string s = std::get<std::string>(r->data);
      if (s == "none")
        rc.reflector_disabled = true;
      else if (s != "default")
        t.fail("reflector", "expected a radius, \"default\" or \"none\"");
    } else {
      rc.reflector = positive(t, "reflector", 1.0);
    }
  }
  rc.external_b = vector3(t, "external_b", rc.external_b);
  t.reject_unknown();
}

ParticleConfig read_particle(const ConfigTable& t) {
  ParticleConfig p;
  p.z = t.required_number("z");
  p.rho = t.required_number("rho");
  if (p.rho < 0.0) t.fail("rho", "must not be negative");
  bool have_v = t.has("v"), have_vc = t.has("v_c");
  if (have_v && have_vc) t.fail("v_c", "give either v or v_c");
  Vec3 v = have_vc ? c_light * vector3(t, "v_c", {}) : vector3(t, "v", {});
  if (!have_vc) t.find("v_c");
  p.v_z = v.z;
  p.v_rho = v.rho;
  p.v_phi = v.phi;
  if (norm(Vec2{v.z, v.rho}) >= c_light || std::abs(v.phi) >= c_light)
    t.fail(have_vc ? "v_c" : "v", "speed must stay below c");
  if (t.has("electrons")) {
    if (t.has("charge") || t.has("mass")) t.fail("electrons", "give electrons or charge/mass");
    double n = positive(t, "electrons", 1.0);
    p.charge = -n * elementary_charge;
    p.mass = n * electron_mass;
  } else {
    p.charge = t.required_number("charge");
    p.mass = t.required_number("mass");
    if (!(p.mass > 0.0)) t.fail("mass", "must be positive");
  }
  t.reject_unknown();
  return p;
}

SourceConfig read_source(const ConfigTable& t) {
  SourceConfig s;
  std::string kind = t.string("kind", "axial");
  if (kind == "axial")
    s.kind = SourceKind::axial;
  else if (kind == "azimuthal")
    s.kind = SourceKind::azimuthal;
  else
    t.fail("kind", "expected \"axial\" or \"azimuthal\"");
  s.radius = positive(t, "radius", s.radius);
  s.height = positive(t, "height", s.height);
  s.center_z = t.number("center_z", s.center_z);
  s.amplitude = t.number("amplitude", s.amplitude);
  s.pulse.frequency = positive(t, "frequency", s.pulse.frequency);
  s.pulse.cycles = positive_int(t, "cycles", s.pulse.cycles);
  s.pulse.raised_cosine = t.boolean("raised_cosine", s.pulse.raised_cosine);
  t.reject_unknown();
  return s;
}

ProbeConfig read_probe(const ConfigTable& t, std::size_t index) {
  ProbeConfig p;
  p.name = t.string("name", "probe" + std::to_string(index));
  p.z = t.required_number("z");
  p.rho = t.required_number("rho");
  p.components = t.strings("components", probe_components);
  for (const auto& c : p.components)
    if (std::find(probe_components.begin(), probe_components.end(), c) == probe_components.end())
      t.fail("components", "unknown component \"" + c + "\"");
  if (p.components.empty()) t.fail("components", "needs at least one component");
  t.reject_unknown();
  return p;
}

void read_output(const ConfigTable& t, RunConfig& rc) {
  auto& o = rc.output;
  o.directory = t.string("directory", o.directory);
  o.probe_every = positive_int(t, "probe_every", o.probe_every);
  o.energy_every = positive_int(t, "energy_every", o.energy_every);
  o.snapshot_every = positive_int(t, "snapshot_every", o.snapshot_every, 0);
  o.snapshot_formats = t.strings("snapshot_formats", o.snapshot_formats);
  for (const auto& f : o.snapshot_formats)
    if (f != "csv" && f != "vtk") t.fail("snapshot_formats", "unknown format \"" + f + "\"");
  o.trajectory = t.boolean("trajectory", o.trajectory);
  o.summary = t.boolean("summary", o.summary);
  t.reject_unknown();
}

}  // namespace

RunConfig run_config_from(const ConfigDocument& doc) {
  doc.reject_unknown_sections(
      {"run", "mesh", "solver", "pml", "particles", "particle", "source", "probe", "output"});
  RunConfig rc;
  const auto& run = doc.section("run");
  rc.name = run.string("name", rc.name);
  long seed = run.integer("seed", 1);
  if (seed < 0) run.fail("seed", "must not be negative");
  rc.seed = static_cast<std::uint64_t>(seed);
  run.reject_unknown();
  read_mesh(doc.section("mesh"), rc);
  read_solver(doc.section("solver"), rc);
  read_pml(doc.section("pml"), rc);
  read_particles(doc.section("particles"), rc);
  for (const auto& t : doc.list("particle")) rc.particles.push_back(read_particle(t));
  for (const auto& t : doc.list("source")) rc.sources.push_back(read_source(t));
  const auto& probes = doc.list("probe");
  for (std::size_t i = 0; i < probes.size(); ++i) rc.probes.push_back(read_probe(probes[i], i));
  read_output(doc.section("output"), rc);
  validate(rc);
  return rc;
}

void validate(const RunConfig& rc) {
  const double front = rc.pml_front();
  for (const auto& p : rc.probes) {
    if (!(p.rho >= 0.0 && p.rho < front) || !(p.z >= rc.mesh.z_min && p.z <= rc.mesh.z_max))
      throw ConfigError("probe " + p.name + " lies outside the physical region");
  }
  for (const auto& s : rc.sources) {
    if (s.radius >= front) throw ConfigError("source cylinder reaches the PML front");
    if (s.center_z - 0.5 * s.height < rc.mesh.z_min || s.center_z + 0.5 * s.height > rc.mesh.z_max)
      throw ConfigError("source cylinder leaves the z range of the mesh");
    if (s.kind == SourceKind::axial && !rc.te)
      throw ConfigError("axial source needs the TE polarization enabled");
    if (s.kind == SourceKind::azimuthal && !rc.tm)
      throw ConfigError("azimuthal source needs the TM polarization enabled");
  }
  for (const auto& p : rc.particles)
    if (p.rho >= rc.outer_radius() || p.z < rc.mesh.z_min || p.z > rc.mesh.z_max)
      throw ConfigError("particle starts outside the mesh");
  if (auto r = rc.reflector_radius(); r && *r >= rc.outer_radius())
    throw ConfigError("reflector lies outside the mesh");
  if (!rc.te && !rc.tm) throw ConfigError("no polarization enabled");
}

}  // namespace borpic
