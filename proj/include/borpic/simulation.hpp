#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "borpic/constitutive.hpp"
#include "borpic/field_solver.hpp"
#include "borpic/mesh.hpp"
#include "borpic/output.hpp"
#include "borpic/pic.hpp"
#include "borpic/pml.hpp"
#include "borpic/run_config.hpp"
#include "borpic/sources.hpp"

namespace borpic {

// The built-in rectangle (uniform rows up to the front, then one row per PML
// layer) or the configured mesh file.
Mesh build_mesh(const RunConfig& config);

struct EnergySample {
  long step = 0;
  double t = 0;
  double te = 0, tm = 0;                    // staggered discrete energies
  double te_physical = 0, tm_physical = 0;  // faces inside the front
};

// Probe values are sampled after each step: E at level n and B averaged to
// level n - 1, both stamped t = n dt.
struct ProbeTrace {
  ProbeConfig probe;
  Index face = -1;
  CsvTable table;
};

class Simulation {
 public:
  explicit Simulation(RunConfig config);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const RunConfig& config() const { return config_; }
  const Mesh& mesh() const { return *mesh_; }
  const MaterialMap& materials() const { return materials_; }
  const FieldSolver& solver() const { return *solver_; }
  FieldState& state() { return state_; }
  const FieldState& state() const { return state_; }
  std::vector<Particle>& particles() { return particles_; }
  const std::vector<ImpressedCurrent>& sources() const { return sources_; }
  const PicOptions& pic_options() const { return pic_; }
  std::shared_ptr<const PmlLayer> pml(Polarization pol) const {
    return pol == Polarization::te ? pml_te_ : pml_tm_;
  }
  double dt() const { return dt_; }
  long step_index() const { return state_.time_index; }
  double time() const { return static_cast<double>(state_.time_index) * dt_; }
  const ParticleCensus& census() const { return census_; }

  // One leapfrog step: magnetic half, impressed and particle currents at
  // n + 1/2, electric half, then probes and energies at their cadence.
  // Throws SolverError on a non-finite state.
  void step();
  void advance(long steps);

  EnergySample energy() const;
  const std::vector<EnergySample>& energy_history() const { return energy_; }
  const std::vector<ProbeTrace>& probes() const { return probes_; }
  const CsvTable& trajectory() const { return trajectory_; }

  // Runs the configured steps and writes probes, snapshots, trajectory and
  // the JSON summary under the output directory. On a non-finite state it
  // writes a diagnostic dump and rethrows.
  void run();

 private:
  void record();
  void check_finite() const;
  void write_snapshot_files() const;
  void write_outputs(const std::string& status) const;
  void write_dump(const std::string& reason) const;

  RunConfig config_;
  std::unique_ptr<Mesh> mesh_;
  MaterialMap materials_;
  std::unique_ptr<HodgeSet> hodges_;
  std::unique_ptr<FieldSolver> solver_;
  std::shared_ptr<PmlLayer> pml_te_, pml_tm_;
  FieldState state_;
  double dt_ = 0;
  double stable_dt_ = 0;
  std::vector<ImpressedCurrent> sources_;
  std::vector<Particle> particles_;
  PicOptions pic_;
  ParticleCensus census_;
  std::vector<double> j_par_, j_perp_;
  std::vector<ProbeTrace> probes_;
  std::vector<EnergySample> energy_;
  CsvTable trajectory_;
  double setup_seconds_ = 0;
  double loop_seconds_ = 0;
};

}  // namespace borpic
