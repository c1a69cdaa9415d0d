#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "borpic/mesh.hpp"
#include "borpic/sparse.hpp"

namespace borpic {

// Diagonal physical tensors in SI units.
struct Material {
  double eps_z, eps_rho, eps_phi;
  double mu_z, mu_rho, mu_phi;

  static Material vacuum();
  bool is_vacuum() const;
};

class MaterialMap {
 public:
  MaterialMap() = default;
  static MaterialMap vacuum(Index faces);

  Index size() const { return static_cast<Index>(faces_.size()); }
  const Material& operator[](Index k) const { return faces_[k]; }
  void set(Index k, const Material& m);
  bool is_vacuum() const;
  // epsilon and mu exchanged, the material of the dual problem
  MaterialMap swapped() const;

 private:
  std::vector<Material> faces_;
};

using Local3 = std::array<std::array<double, 3>, 3>;

// Per-face integrals of products of the z and rho components of the three
// local edge 1-forms (global edge directions), without any material or rho.
struct LocalForms {
  Local3 zz;
  Local3 rr;
};

LocalForms local_forms(const Mesh& mesh, Index face);

struct EdgeHodge {
  SparseMatrix matrix;
  // per-face coefficient multiplying zz and rr in the local contribution
  std::vector<std::array<double, 2>> coef;
};

struct HodgeSet {
  SparseMatrix star_eps;      // edges x edges
  SparseMatrix star_mu_inv;   // faces x faces, diagonal
  SparseMatrix star_mu;       // edges x edges
  SparseMatrix star_eps_inv;  // faces x faces, diagonal
  std::vector<std::array<double, 2>> eps_coef;  // eps_z rho, eps_rho rho per face
  std::vector<std::array<double, 2>> mu_coef;
  std::vector<LocalForms> forms;
};

// General per-face assembly of the edge mass sum_k (a_z L_zz + a_rho L_rr).
SparseMatrix assemble_edge_mass(const Mesh& mesh, std::span<const LocalForms> forms,
                                std::span<const std::array<double, 2>> coef);

std::pair<SparseMatrix, SparseMatrix> assemble_hodge_te(const Mesh& mesh,
                                                        const MaterialMap& materials);
std::pair<SparseMatrix, SparseMatrix> assemble_hodge_tm(const Mesh& mesh,
                                                        const MaterialMap& materials);

// In vacuum both edge matrices come from one geometric matrix scaled by eps0
// and mu0, and both face matrices from one geometric diagonal.
HodgeSet assemble_hodges(const Mesh& mesh, const MaterialMap& materials);

std::vector<double> diagonal(const SparseMatrix& a);

SparseMatrix spai_inverse(const SparseMatrix& a, int pattern_level, double drop_tol,
                          int workers = 0);

// ||I - M A||_F / ||I||_F
double inverse_residual(const SparseMatrix& m, const SparseMatrix& a);

enum class MassSolverKind { exact, spai };

struct MassSolverOptions {
  MassSolverKind kind = MassSolverKind::exact;
  int spai_level = 2;
  double spai_drop_tol = 1e-12;
  double fallback_residual = 0.1;
};

// Applies the inverse of an SPD edge mass matrix, either through a sparse
// Cholesky factorization or a symmetrized sparse approximate inverse.
class MassSolver {
 public:
  MassSolver(const SparseMatrix& a, const MassSolverOptions& options);
  ~MassSolver();
  MassSolver(MassSolver&&) noexcept;
  MassSolver& operator=(MassSolver&&) noexcept;

  void solve(std::span<const double> rhs, std::span<double> x) const;
  MassSolverKind kind() const { return kind_; }
  double spai_residual() const { return spai_residual_; }
  Index size() const { return size_; }

 private:
  struct Factor;
  MassSolverKind kind_;
  Index size_;
  std::unique_ptr<Factor> factor_;
  SparseMatrix approx_;
  double spai_residual_ = 0.0;
};

}  // namespace borpic
