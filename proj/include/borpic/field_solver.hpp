#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "borpic/constitutive.hpp"
#include "borpic/mesh.hpp"

namespace borpic {

enum class Polarization { te, tm };
enum class WallCondition { pmc, pec };

// TE edges carry E and are removed by a PEC wall; TM edges carry H and are
// removed by a PMC wall.
struct BoundaryOptions {
  WallCondition te_axis = WallCondition::pmc;
  WallCondition tm_axis = WallCondition::pec;
  WallCondition te_rim = WallCondition::pmc;
  WallCondition tm_rim = WallCondition::pmc;
};

// Mesh edge -> unknown. Eliminated edges map to -1; right periodic edges map
// to their left twin with an orientation sign.
struct EdgeDofMap {
  std::vector<Index> dof;
  std::vector<std::int8_t> sign;
  Index count = 0;

  // sum of signed mesh values per unknown
  void restrict_to(std::span<const double> mesh_values, std::span<double> dofs) const;
  // add signed unknown values onto every mesh edge they own
  void add_expanded(std::span<const double> dofs, std::span<double> mesh_values) const;
  // overwrite eliminated edges with 0 and aliased edges with their twin
  void enforce(std::span<double> mesh_values) const;
};

EdgeDofMap apply_boundary_selection(const Mesh& mesh, Polarization pol, WallCondition axis,
                                    WallCondition rim);

struct FieldState {
  std::vector<double> e;       // edges, level n
  std::vector<double> b;       // faces, level n + 1/2
  std::vector<double> b_prev;  // faces, level n - 1/2
  std::vector<double> d;       // faces, level n
  std::vector<double> h;       // edges, level n + 1/2
  std::vector<double> h_prev;  // edges, level n - 1/2
  long time_index = 0;
  double dt = 0.0;

  static FieldState zeros(const Mesh& mesh, double dt);
};

// Replaces the plain face Hodge and edge mass solve of one polarization.
// Implemented by the radial PML.
class ConstitutiveChain {
 public:
  virtual ~ConstitutiveChain() = default;
  virtual void face_intensity(std::span<const double> face_flux, std::span<double> out) = 0;
  // history term subtracted from the scaled edge right-hand side, mesh space
  virtual void edge_history(std::span<double> out) const = 0;
  virtual const MassSolver& edge_solver() const = 0;
  virtual void edge_updated(std::span<const double> edge_values) = 0;
};

// One polarization: primal quantity on edges, dual flux on faces. TE uses
// (e, b, star_eps, star_mu_inv); TM uses (h, d, star_mu, star_eps_inv).
struct PolarizationOperator {
  Polarization pol;
  EdgeDofMap map;
  SparseMatrix curl;    // faces x mesh edges
  SparseMatrix curl_t;  // mesh edges x faces
  SparseMatrix edge_mass;  // mesh space
  SparseMatrix edge_mass_dof;
  std::vector<double> face_hodge;
  std::vector<std::array<double, 2>> edge_coef;
  std::shared_ptr<const MassSolver> solver;
};

SparseMatrix restrict_matrix(const SparseMatrix& a, const EdgeDofMap& map);

struct SolverOptions {
  BoundaryOptions boundary;
  MassSolverOptions mass;
  bool te = true;
  bool tm = true;
};

class FieldSolver {
 public:
  FieldSolver(const Mesh& mesh, const HodgeSet& hodges, const MaterialMap& materials,
              const SolverOptions& options);

  const Mesh& mesh() const { return *mesh_; }
  const HodgeSet& hodges() const { return *hodges_; }
  const PolarizationOperator& te() const { return te_; }
  const PolarizationOperator& tm() const { return tm_; }
  bool te_enabled() const { return options_.te; }
  bool tm_enabled() const { return options_.tm; }

  void set_chain(Polarization pol, std::shared_ptr<ConstitutiveChain> chain);

  // b^{n+1/2} and h^{n+1/2} from level-n quantities
  void advance_magnetic(FieldState& s) const;
  // e^{n+1} and d^{n+1}; currents live at n + 1/2 (empty span = none)
  void advance_electric(FieldState& s, std::span<const double> j_par,
                        std::span<const double> j_perp) const;

  void step_te(FieldState& s, std::span<const double> j_par) const;
  void step_tm(FieldState& s, std::span<const double> j_perp) const;
  void step(FieldState& s, std::span<const double> j_par, std::span<const double> j_perp) const;

  // Staggered energies, conserved exactly by source-free leapfrog; valid
  // after a full step.
  double energy_te(const FieldState& s) const;
  double energy_tm(const FieldState& s) const;

  // dt = safety * 2 / sqrt(lambda_max(curl^T S curl, K)) over enabled polarizations
  double estimate_stable_dt(double safety = 0.9, int iterations = 50) const;

  // make a state consistent with elimination and periodic aliasing
  void enforce_boundaries(FieldState& s) const;

  // Nonnegative field energy of faces with centroid rho below rho_limit,
  // magnetic part time-averaged to level n.
  double region_energy(Polarization pol, const FieldState& s, double rho_limit) const;

 private:
  void face_update(const PolarizationOperator& op, double scale, std::span<const double> edge_vals,
                   std::span<const double> source, std::span<double> face_vals) const;
  void face_intensity(const PolarizationOperator& op, ConstitutiveChain* chain,
                      std::span<const double> flux, std::span<double> out) const;
  void edge_update(const PolarizationOperator& op, ConstitutiveChain* chain, double scale,
                   std::span<const double> intensity, std::span<const double> source,
                   std::span<double> edge_vals) const;
  double lambda_max(const PolarizationOperator& op, int iterations) const;

  const Mesh* mesh_;
  const HodgeSet* hodges_;
  SolverOptions options_;
  PolarizationOperator te_;
  PolarizationOperator tm_;
  std::shared_ptr<ConstitutiveChain> te_chain_;
  std::shared_ptr<ConstitutiveChain> tm_chain_;
  mutable std::vector<double> face_tmp_, edge_tmp_, dof_rhs_, dof_sol_, hist_, intensity_;
};

struct PhysicalField {
  double e_z = 0, e_rho = 0, e_phi = 0;
  double b_z = 0, b_rho = 0, b_phi = 0;
};

// Fields at the point in SI units, magnetic quantities averaged to level n.
// Returns nullopt outside the mesh.
std::optional<PhysicalField> eval_physical_field(const Mesh& mesh, const FieldState& s,
                                                 const MaterialMap& materials, Point p,
                                                 std::optional<Index> hint = std::nullopt);

PhysicalField eval_in_face(const Mesh& mesh, const FieldState& s, const MaterialMap& materials,
                           Index face, Point p);

}  // namespace borpic
