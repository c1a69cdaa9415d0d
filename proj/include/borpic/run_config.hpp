#pragma once

#include <optional>
#include <string>
#include <vector>

#include "borpic/config.hpp"
#include "borpic/field_solver.hpp"
#include "borpic/mesh.hpp"
#include "borpic/pic.hpp"
#include "borpic/pml.hpp"

namespace borpic {

struct MeshConfig {
  // empty path selects the built-in rectangle generator
  std::string path;
  MeshFormat format = MeshFormat::native;
  double z_min = -0.5;
  double z_max = 0.5;
  double rho_max = 1.0;  // physical region; the PML is added beyond it
  double element_size = 0.04;
  double jitter = 0.15;
  bool periodic_z = true;
};

struct PmlConfig {
  bool enabled = true;
  int layers = 10;  // element layers of the built-in mesh
  std::optional<double> thickness;
  int taper_order = 3;
  double reflection = 1e-6;
  std::optional<double> sigma_max;
};

struct PulseProfile {
  double frequency = 1e9;
  int cycles = 1;
  bool raised_cosine = true;

  double duration() const { return cycles / frequency; }
  double value(double t) const;
};

enum class SourceKind { axial, azimuthal };

// Surface current K on the cylinder rho = radius, |z - center_z| <= height/2.
struct SourceConfig {
  SourceKind kind = SourceKind::axial;
  double radius = 0.25;
  double height = 0.3;
  double center_z = 0.0;
  double amplitude = 1.0;  // A/m
  PulseProfile pulse;
};

struct ParticleConfig {
  double z = 0, rho = 0;
  double v_z = 0, v_rho = 0, v_phi = 0;
  double charge = 0;
  double mass = 0;
};

struct ProbeConfig {
  std::string name;
  double z = 0, rho = 0;
  std::vector<std::string> components;
};

struct OutputConfig {
  std::string directory = "out";
  int probe_every = 1;
  int energy_every = 1;
  int snapshot_every = 0;  // 0 disables snapshots
  std::vector<std::string> snapshot_formats{"csv"};
  bool trajectory = false;
  bool summary = true;
};

struct RunConfig {
  std::string name = "run";
  MeshConfig mesh;
  bool te = true;
  bool tm = true;
  // nullopt means the stability estimate
  std::optional<double> dt;
  double dt_safety = 0.9;
  long steps = 1000;
  BoundaryOptions boundary;
  MassSolverOptions mass;
  PmlConfig pml;
  // particle options; alpha <= 0 means three element sizes
  int shape_order = 2;
  double shape_alpha = 0.0;
  bool shape_renormalize_axis = false;
  // nullopt: front - 0.1 with a PML, none without
  std::optional<double> reflector;
  bool reflector_disabled = false;
  Vec3 external_b;
  std::vector<ParticleConfig> particles;
  std::vector<SourceConfig> sources;
  std::vector<ProbeConfig> probes;
  OutputConfig output;
  std::uint64_t seed = 1;

  double pml_front() const { return mesh.rho_max; }
  // 0 for a pmc-closed run, whose rim sits at the front
  double pml_thickness() const;
  double outer_radius() const { return pml_front() + pml_thickness(); }
  std::optional<double> reflector_radius() const;
};

inline const std::vector<std::string> probe_components = {"e_z", "e_rho", "e_phi",
                                                          "b_z", "b_rho", "b_phi"};

RunConfig run_config_from(const ConfigDocument& doc);
void validate(const RunConfig& config);

std::vector<std::string> preset_names();
// throws ConfigError for an unknown name
ConfigDocument preset_document(const std::string& name);

}  // namespace borpic
