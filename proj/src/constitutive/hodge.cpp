#include <cmath>

#include "borpic/constants.hpp"
#include "borpic/constitutive.hpp"
#include "borpic/error.hpp"

namespace borpic {

Material Material::vacuum() { return {eps0, eps0, eps0, mu0, mu0, mu0}; }

bool Material::is_vacuum() const {
  return eps_z == eps0 && eps_rho == eps0 && eps_phi == eps0 && mu_z == mu0 && mu_rho == mu0 &&
         mu_phi == mu0;
}

MaterialMap MaterialMap::vacuum(Index faces) {
  MaterialMap m;
  m.faces_.assign(static_cast<std::size_t>(faces), Material::vacuum());
  return m;
}

void MaterialMap::set(Index k, const Material& m) {
  for (double v : {m.eps_z, m.eps_rho, m.eps_phi, m.mu_z, m.mu_rho, m.mu_phi})
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("material entries must be positive");
  faces_[k] = m;
}

bool MaterialMap::is_vacuum() const {
  for (const auto& m : faces_)
    if (!m.is_vacuum()) return false;
  return true;
}

MaterialMap MaterialMap::swapped() const {
  MaterialMap out = *this;
  for (auto& m : out.faces_) m = {m.mu_z, m.mu_rho, m.mu_phi, m.eps_z, m.eps_rho, m.eps_phi};
  return out;
}

LocalForms local_forms(const Mesh& mesh, Index face) {
  // degree-2 rule: barycentric (2/3, 1/6, 1/6) and permutations
  static constexpr double pts[3][3] = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
  };
  const auto& grad = mesh.grad_lambda(face);
  const auto& f = mesh.face(face);
  const double weight = mesh.area(face) / 3.0;
  LocalForms out{};
  for (const auto& lam : pts) {
    std::array<Vec2, 3> w;
    for (int l = 0; l < 3; ++l) {
      int i = l, j = (l + 1) % 3;
      if (f.signs[l] < 0) std::swap(i, j);
      w[l] = lam[i] * grad[j] + (-lam[j]) * grad[i];
    }
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        out.zz[a][b] += weight * (w[a].z * w[b].z);
        out.rr[a][b] += weight * (w[a].rho * w[b].rho);
      }
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < a; ++b) {
      out.zz[a][b] = out.zz[b][a];
      out.rr[a][b] = out.rr[b][a];
    }
  return out;
}

SparseMatrix assemble_edge_mass(const Mesh& mesh, std::span<const LocalForms> forms,
                                std::span<const std::array<double, 2>> coef) {
  std::vector<Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(mesh.num_faces()) * 9);
  for (Index k = 0; k < mesh.num_faces(); ++k) {
    if (!(mesh.area(k) > 0.0)) throw Error("zero-area face in assembly");
    const auto& f = mesh.face(k);
    const auto& L = forms[k];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        // (a,b) and (b,a) read the same symmetric entries, so the sum is symmetric bitwise
        int lo = std::min(a, b), hi = std::max(a, b);
        double v = coef[k][0] * L.zz[lo][hi] + coef[k][1] * L.rr[lo][hi];
        t.push_back({f.edges[a], f.edges[b], v});
      }
  }
  return SparseMatrix::from_triplets(mesh.num_edges(), mesh.num_edges(), std::move(t));
}

namespace {

SparseMatrix face_diagonal(std::span<const double> d) {
  std::vector<Triplet<double>> t;
  t.reserve(d.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    t.push_back({static_cast<Index>(k), static_cast<Index>(k), d[k]});
  return SparseMatrix::from_triplets(static_cast<Index>(d.size()), static_cast<Index>(d.size()),
                                     std::move(t));
}

std::vector<LocalForms> all_forms(const Mesh& mesh) {
  std::vector<LocalForms> forms(mesh.num_faces());
  for (Index k = 0; k < mesh.num_faces(); ++k) forms[k] = local_forms(mesh, k);
  return forms;
}

struct PolarizationHodge {
  SparseMatrix edge;
  SparseMatrix face;
  std::vector<std::array<double, 2>> coef;
};

// edge_z/edge_rho: in-plane constitutive entries; face_phi: out-of-plane one
template <class EdgeZ, class EdgeR, class FacePhi>
PolarizationHodge assemble_generic(const Mesh& mesh, std::span<const LocalForms> forms,
                                   EdgeZ edge_z, EdgeR edge_rho, FacePhi face_phi) {
  PolarizationHodge h;
  h.coef.resize(mesh.num_faces());
  std::vector<double> fd(mesh.num_faces());
  for (Index k = 0; k < mesh.num_faces(); ++k) {
    double rho = mesh.centroid(k).rho;
    h.coef[k] = {edge_z(k) * rho, edge_rho(k) * rho};
    fd[k] = rho / (face_phi(k) * mesh.area(k));
  }
  h.edge = assemble_edge_mass(mesh, forms, h.coef);
  h.face = face_diagonal(fd);
  return h;
}

}  // namespace

std::pair<SparseMatrix, SparseMatrix> assemble_hodge_te(const Mesh& mesh,
                                                        const MaterialMap& materials) {
  auto forms = all_forms(mesh);
  auto h = assemble_generic(
      mesh, forms, [&](Index k) { return materials[k].eps_z; },
      [&](Index k) { return materials[k].eps_rho; }, [&](Index k) { return materials[k].mu_phi; });
  return {std::move(h.edge), std::move(h.face)};
}

std::pair<SparseMatrix, SparseMatrix> assemble_hodge_tm(const Mesh& mesh,
                                                        const MaterialMap& materials) {
  return assemble_hodge_te(mesh, materials.swapped());
}

HodgeSet assemble_hodges(const Mesh& mesh, const MaterialMap& materials) {
  if (materials.size() != mesh.num_faces()) throw Error("material map does not match mesh");
  HodgeSet hs;
  hs.forms = all_forms(mesh);
  if (materials.is_vacuum()) {
    auto geo = assemble_generic(
        mesh, hs.forms, [](Index) { return 1.0; }, [](Index) { return 1.0; },
        [](Index) { return 1.0; });
    hs.star_eps = scaled(geo.edge, eps0);
    hs.star_mu = scaled(geo.edge, mu0);
    hs.star_mu_inv = scaled(geo.face, 1.0 / mu0);
    hs.star_eps_inv = scaled(geo.face, 1.0 / eps0);
    hs.eps_coef.resize(geo.coef.size());
    hs.mu_coef.resize(geo.coef.size());
    for (std::size_t k = 0; k < geo.coef.size(); ++k) {
      hs.eps_coef[k] = {eps0 * geo.coef[k][0], eps0 * geo.coef[k][1]};
      hs.mu_coef[k] = {mu0 * geo.coef[k][0], mu0 * geo.coef[k][1]};
    }
    return hs;
  }
  auto te = assemble_generic(
      mesh, hs.forms, [&](Index k) { return materials[k].eps_z; },
      [&](Index k) { return materials[k].eps_rho; }, [&](Index k) { return materials[k].mu_phi; });
  auto tm = assemble_generic(
      mesh, hs.forms, [&](Index k) { return materials[k].mu_z; },
      [&](Index k) { return materials[k].mu_rho; }, [&](Index k) { return materials[k].eps_phi; });
  hs.star_eps = std::move(te.edge);
  hs.star_mu_inv = std::move(te.face);
  hs.eps_coef = std::move(te.coef);
  hs.star_mu = std::move(tm.edge);
  hs.star_eps_inv = std::move(tm.face);
  hs.mu_coef = std::move(tm.coef);
  return hs;
}

std::vector<double> diagonal(const SparseMatrix& a) {
  std::vector<double> d(a.rows(), 0.0);
  for (Index r = 0; r < a.rows(); ++r) d[r] = a.at(r, r);
  return d;
}

}  // namespace borpic
