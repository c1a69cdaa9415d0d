#include "borpic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"

namespace borpic {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double component(const PhysicalField& f, const std::string& name) {
  if (name == "e_z") return f.e_z;
  if (name == "e_rho") return f.e_rho;
  if (name == "e_phi") return f.e_phi;
  if (name == "b_z") return f.b_z;
  if (name == "b_rho") return f.b_rho;
  return f.b_phi;
}

bool all_finite(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return std::isfinite(s);
}

}  // namespace

Mesh build_mesh(const RunConfig& config) {
  const auto& m = config.mesh;
  MeshOptions options{.periodic_z = m.periodic_z};
  if (!m.path.empty()) return load_mesh(m.path, m.format, options);
  RectangleSpec spec;
  spec.z_min = m.z_min;
  spec.z_max = m.z_max;
  spec.nz = std::max(1, static_cast<int>(std::lround((m.z_max - m.z_min) / m.element_size)));
  const double front = config.pml_front();
  const int rows = std::max(1, static_cast<int>(std::lround(front / m.element_size)));
  for (int j = 0; j <= rows; ++j) spec.rho_lines.push_back(front * j / rows);
  if (config.pml.enabled) {
    const int layers = config.pml.layers;
    const double thickness = config.pml_thickness();
    for (int l = 1; l <= layers; ++l) spec.rho_lines.push_back(front + thickness * l / layers);
  }
  spec.jitter = m.jitter;
  spec.random_diagonals = m.jitter > 0.0;
  spec.seed = config.seed;
  return make_rectangle_mesh(spec, options);
}

Simulation::Simulation(RunConfig config) : config_(std::move(config)) {
  const auto t0 = Clock::now();
  validate(config_);
  mesh_ = std::make_unique<Mesh>(build_mesh(config_));
  materials_ = MaterialMap::vacuum(mesh_->num_faces());
  hodges_ = std::make_unique<HodgeSet>(assemble_hodges(*mesh_, materials_));
  SolverOptions options{config_.boundary, config_.mass, config_.te, config_.tm};
  solver_ = std::make_unique<FieldSolver>(*mesh_, *hodges_, materials_, options);

  stable_dt_ = solver_->estimate_stable_dt(1.0);
  if (config_.dt) {
    if (*config_.dt > stable_dt_)
      throw ConfigError("dt = " + std::to_string(*config_.dt) +
                        " s exceeds the estimated stability limit " + std::to_string(stable_dt_) +
                        " s");
    dt_ = *config_.dt;
  } else {
    dt_ = config_.dt_safety * stable_dt_;
  }
  state_ = FieldState::zeros(*mesh_, dt_);

  if (config_.pml.enabled) {
    const double front = config_.pml_front();
    const double thickness = mesh_->rho_max() - front;
    if (!(thickness > 0.0)) throw ConfigError("the mesh has no room for a PML beyond the front");
    PmlProfile profile = PmlProfile::designed(front, thickness, config_.pml.taper_order,
                                              config_.pml.reflection);
    if (config_.pml.sigma_max) profile.sigma_max = *config_.pml.sigma_max;
    if (config_.te) {
      pml_te_ = std::make_shared<PmlLayer>(*mesh_, *hodges_, solver_->te(), profile, dt_, config_.mass);
      solver_->set_chain(Polarization::te, pml_te_);
    }
    if (config_.tm) {
      pml_tm_ = std::make_shared<PmlLayer>(*mesh_, *hodges_, solver_->tm(), profile, dt_, config_.mass);
      solver_->set_chain(Polarization::tm, pml_tm_);
    }
  }

  for (const auto& s : config_.sources) sources_.emplace_back(*mesh_, s);

  pic_.shape.order = config_.shape_order;
  pic_.shape.alpha = config_.shape_alpha > 0.0 ? config_.shape_alpha : 3.0 * config_.mesh.element_size;
  pic_.shape.renormalize_axis = config_.shape_renormalize_axis;
  pic_.reflector = config_.reflector_radius();
  pic_.external_b = config_.external_b;
  for (const auto& pc : config_.particles) {
    Particle p;
    p.z = pc.z;
    p.rho = pc.rho;
    p.v_z = pc.v_z;
    p.v_rho = pc.v_rho;
    p.v_phi = pc.v_phi;
    p.charge = pc.charge;
    p.mass = pc.mass;
    auto face = mesh_->locate({p.z, p.rho});
    if (!face) throw ConfigError("particle at z = " + std::to_string(p.z) + " lies outside the mesh");
    p.face = *face;
    particles_.push_back(p);
  }
  census_.alive = particles_.size();

  j_par_.assign(config_.te ? mesh_->num_edges() : 0, 0.0);
  j_perp_.assign(config_.tm ? mesh_->num_faces() : 0, 0.0);

  for (const auto& pc : config_.probes) {
    ProbeTrace trace;
    trace.probe = pc;
    auto face = mesh_->locate({pc.z, pc.rho});
    if (!face) throw ConfigError("probe " + pc.name + " lies outside the mesh");
    trace.face = *face;
    trace.table.header.push_back("t");
    for (const auto& c : pc.components) trace.table.header.push_back(c);
    probes_.push_back(std::move(trace));
  }
  if (config_.output.trajectory)
    trajectory_.header = {"t", "particle", "z", "rho", "v_z", "v_rho", "v_phi"};
  setup_seconds_ = seconds_since(t0);
}

void Simulation::step() {
  solver_->advance_magnetic(state_);
  std::fill(j_par_.begin(), j_par_.end(), 0.0);
  std::fill(j_perp_.begin(), j_perp_.end(), 0.0);
  const double t_half = (static_cast<double>(state_.time_index) + 0.5) * dt_;
  for (const auto& s : sources_) s.add(t_half, j_par_, j_perp_);
  if (!particles_.empty())
    census_ = advance_particles(*mesh_, state_, materials_, particles_, pic_, dt_, j_par_, j_perp_);
  solver_->advance_electric(state_, j_par_, j_perp_);
  check_finite();
  record();
}

void Simulation::advance(long steps) {
  for (long i = 0; i < steps; ++i) step();
}

EnergySample Simulation::energy() const {
  EnergySample e;
  e.step = state_.time_index;
  e.t = time();
  const double front = config_.pml_front();
  if (config_.te) {
    e.te = solver_->energy_te(state_);
    e.te_physical = solver_->region_energy(Polarization::te, state_, front);
  }
  if (config_.tm) {
    e.tm = solver_->energy_tm(state_);
    e.tm_physical = solver_->region_energy(Polarization::tm, state_, front);
  }
  return e;
}

void Simulation::check_finite() const {
  bool ok = all_finite(state_.e) && all_finite(state_.b) && all_finite(state_.d) &&
            all_finite(state_.h);
  for (const auto& p : particles_)
    ok = ok && std::isfinite(p.z + p.rho + p.v_z + p.v_rho + p.v_phi);
  if (!ok)
    throw SolverError("non-finite field or particle state at step " +
                      std::to_string(state_.time_index));
}

void Simulation::record() {
  const long n = state_.time_index;
  const double t = time();
  const auto& out = config_.output;
  if (n % out.probe_every == 0) {
    for (auto& trace : probes_) {
      PhysicalField f =
          eval_in_face(*mesh_, state_, materials_, trace.face, {trace.probe.z, trace.probe.rho});
      std::vector<double> row{t};
      for (const auto& c : trace.probe.components) row.push_back(component(f, c));
      trace.table.rows.push_back(std::move(row));
    }
    if (out.trajectory)
      for (std::size_t i = 0; i < particles_.size(); ++i) {
        const auto& p = particles_[i];
        trajectory_.rows.push_back(
            {t, static_cast<double>(i), p.z, p.rho, p.v_z, p.v_rho, p.v_phi});
      }
  }
  if (n % out.energy_every == 0) {
    EnergySample e = energy();
    if (!std::isfinite(e.te + e.tm))
      throw SolverError("non-finite energy at step " + std::to_string(n));
    energy_.push_back(e);
  }
}

void Simulation::run() {
  namespace fs = std::filesystem;
  fs::create_directories(config_.output.directory);
  const auto t0 = Clock::now();
  const long every = config_.output.snapshot_every;
  try {
    if (every > 0) write_snapshot_files();
    while (state_.time_index < config_.steps) {
      step();
      if (every > 0 && state_.time_index % every == 0) write_snapshot_files();
    }
  } catch (const SolverError& err) {
    loop_seconds_ = seconds_since(t0);
    write_dump(err.what());
    write_outputs("aborted");
    throw;
  }
  loop_seconds_ = seconds_since(t0);
  write_outputs("completed");
}

void Simulation::write_snapshot_files() const {
  auto rows = snapshot_rows(*mesh_, state_, materials_);
  char stem[64];
  std::snprintf(stem, sizeof stem, "snapshot_%08ld", state_.time_index);
  const std::string base = config_.output.directory + "/" + stem;
  for (const auto& f : config_.output.snapshot_formats) {
    if (f == "csv") write_snapshot(base + ".csv", *mesh_, rows, SnapshotFormat::csv);
    if (f == "vtk") write_snapshot(base + ".vtk", *mesh_, rows, SnapshotFormat::vtk);
  }
}

void Simulation::write_outputs(const std::string& status) const {
  const std::string dir = config_.output.directory + "/";
  for (const auto& trace : probes_) write_csv(dir + "probe_" + trace.probe.name + ".csv", trace.table);
  if (config_.output.trajectory) write_csv(dir + "trajectory.csv", trajectory_);
  if (!config_.output.summary) return;
  nlohmann::ordered_json j;
  j["name"] = config_.name;
  j["status"] = status;
  j["steps"] = state_.time_index;
  j["dt"] = dt_;
  j["stable_dt"] = stable_dt_;
  j["mesh"] = {{"nodes", mesh_->num_nodes()},
               {"edges", mesh_->num_edges()},
               {"faces", mesh_->num_faces()},
               {"pml", config_.pml.enabled}};
  j["census"] = {{"particles", particles_.size()}, {"alive", census_.alive}, {"lost", census_.lost}};
  auto& energy = j["energy"];
  energy["step"] = nlohmann::json::array();
  for (const auto& e : energy_) {
    energy["step"].push_back(e.step);
    energy["te"].push_back(e.te);
    energy["tm"].push_back(e.tm);
    energy["te_physical"].push_back(e.te_physical);
    energy["tm_physical"].push_back(e.tm_physical);
  }
  const double steps = std::max<double>(1.0, static_cast<double>(state_.time_index));
  j["timing"] = {{"setup_s", setup_seconds_},
                 {"loop_s", loop_seconds_},
                 {"per_step_us", 1e6 * loop_seconds_ / steps}};
  std::ofstream out(dir + "summary.json");
  if (!out) throw Error("cannot write " + dir + "summary.json");
  out << j.dump(1) << '\n';
}

void Simulation::write_dump(const std::string& reason) const {
  const std::string path = config_.output.directory + "/abort_dump.json";
  nlohmann::ordered_json j;
  j["reason"] = reason;
  j["step"] = state_.time_index;
  auto first_bad = [](const std::vector<double>& v) -> long {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i])) return static_cast<long>(i);
    return -1;
  };
  j["first_non_finite"] = {{"e", first_bad(state_.e)},
                           {"b", first_bad(state_.b)},
                           {"d", first_bad(state_.d)},
                           {"h", first_bad(state_.h)}};
  j["dt"] = dt_;
  j["stable_dt"] = stable_dt_;
  for (const auto& p : particles_)
    j["particles"].push_back({{"z", p.z}, {"rho", p.rho}, {"v_z", p.v_z}, {"v_rho", p.v_rho},
                              {"v_phi", p.v_phi}, {"face", p.face}, {"alive", p.alive}});
  if (!energy_.empty())
    j["last_energy"] = {{"step", energy_.back().step}, {"te", energy_.back().te}, {"tm", energy_.back().tm}};
  std::ofstream out(path);
  if (out) out << j.dump(1) << '\n';
  std::fprintf(stderr, "error: %s; diagnostic dump written to %s\n", reason.c_str(), path.c_str());
}

}  // namespace borpic
