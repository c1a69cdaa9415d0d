#pragma once

#include <array>
#include <memory>
#include <vector>

#include "borpic/field_solver.hpp"

namespace borpic {

struct PmlProfile {
  double front_radius = 1.0;
  double thickness = 0.1;
  double sigma_max = 0.0;
  int taper_order = 3;

  double sigma_at(double rho) const;

  // sigma_max from the normal-incidence reflection exp(-2/(eps0 c) int sigma)
  static PmlProfile designed(double front_radius, double thickness, int taper_order = 3,
                             double reflection = 1e-6);
};

// (r0 + r1 jw) y = (q0 + q1 jw) x for one element-wise constitutive relation
struct ChainCoefficients {
  double r0, r1, q0, q1;
};

// y^{n+1} = w x^{n+1} + g^n with g^n = u0 y + u1 y' - v0 x - v1 x' at level n
struct DerivedCoefficients {
  double lambda, w, u0, u1, v0, v1;
};

DerivedCoefficients derive_coefficients(const ChainCoefficients& c, double tau);

// One chain's state: x, y and their trapezoidal derivative estimates.
struct ChainState {
  double x = 0, y = 0, dx = 0, dy = 0, g = 0;

  // advance to the new x; returns the new y
  double advance(const DerivedCoefficients& d, double tau, double x_new);
};

struct PmlFaceTable {
  Index face;
  double sigma;
  std::array<ChainCoefficients, 2> edge;  // z, rho
  std::array<DerivedCoefficients, 2> edge_derived;
  ChainCoefficients face_chain;
  DerivedCoefficients face_derived;
};

// Faces whose centroid lies beyond the front get a table, for the given
// polarization operator's material coefficients.
std::vector<PmlFaceTable> build_pml_coefficients(const Mesh& mesh, const PolarizationOperator& op,
                                                 const PmlProfile& profile, double dt);

class PmlLayer : public ConstitutiveChain {
 public:
  PmlLayer(const Mesh& mesh, const HodgeSet& hodges, const PolarizationOperator& op,
           const PmlProfile& profile, double dt, const MassSolverOptions& mass);

  void face_intensity(std::span<const double> face_flux, std::span<double> out) override;
  void edge_history(std::span<double> out) const override;
  const MassSolver& edge_solver() const override { return *solver_; }
  void edge_updated(std::span<const double> edge_values) override;

  const std::vector<PmlFaceTable>& tables() const { return tables_; }
  const SparseMatrix& edge_matrix_dof() const { return a_dof_; }
  double tau() const { return tau_; }
  // max |g| over every chain, for diagnostics
  double max_history() const;

 private:
  const Mesh* mesh_;
  const HodgeSet* hodges_;
  const PolarizationOperator* op_;
  double tau_;
  std::vector<PmlFaceTable> tables_;
  std::vector<std::array<ChainState, 6>> edge_chains_;  // local edge * 2 + component
  std::vector<ChainState> face_chains_;
  std::vector<double> g_now_, g_prev_;
  SparseMatrix a_dof_;
  std::unique_ptr<MassSolver> solver_;
};

}  // namespace borpic
