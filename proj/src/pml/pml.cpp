#include "borpic/pml.hpp"

#include <cmath>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"
#include "borpic/kernels.hpp"

namespace borpic {

double PmlProfile::sigma_at(double rho) const {
  if (rho <= front_radius) return 0.0;
  double s = std::min(1.0, (rho - front_radius) / thickness);
  return sigma_max * std::pow(s, taper_order);
}

PmlProfile PmlProfile::designed(double front_radius, double thickness, int taper_order,
                                double reflection) {
  if (!(thickness > 0.0) || taper_order < 1 || !(reflection > 0.0 && reflection < 1.0))
    throw Error("invalid PML profile parameters");
  double sigma_max = -std::log(reflection) * eps0 * c_light * (taper_order + 1) / (2.0 * thickness);
  return {front_radius, thickness, sigma_max, taper_order};
}

DerivedCoefficients derive_coefficients(const ChainCoefficients& c, double tau) {
  double lambda = c.r0 + c.r1 * tau;
  if (!(lambda != 0.0)) throw SolverError("PML coefficient denominator vanished");
  // written so that sigma = 0 reproduces q1 exactly
  return {lambda,           c.q0 / lambda + c.q1 * (tau / lambda),
          c.r1 * tau / lambda, c.r1 / lambda,
          c.q1 * tau / lambda, c.q1 / lambda};
}

double ChainState::advance(const DerivedCoefficients& d, double tau, double x_new) {
  double y_new = d.w * x_new + g;
  dx = -dx + tau * (x_new - x);
  dy = -dy + tau * (y_new - y);
  x = x_new;
  y = y_new;
  g = d.u0 * y + d.u1 * dy - d.v0 * x - d.v1 * dx;
  return y_new;
}

std::vector<PmlFaceTable> build_pml_coefficients(const Mesh& mesh, const PolarizationOperator& op,
                                                 const PmlProfile& profile, double dt) {
  if (!(dt > 0.0)) throw Error("PML needs dt > 0");
  const double tau = 2.0 / dt;
  std::vector<PmlFaceTable> tables;
  for (Index k = 0; k < mesh.num_faces(); ++k) {
    double rho = mesh.centroid(k).rho;
    if (!(rho > profile.front_radius)) continue;
    double sigma = profile.sigma_at(rho);
    double loss = sigma / eps0;
    PmlFaceTable t;
    t.face = k;
    t.sigma = sigma;
    // stretched zz entry s*coef, rho-rho entry coef/s, phi-phi entry s*coef
    const double cz = op.edge_coef[k][0];
    const double cr = op.edge_coef[k][1];
    t.edge[0] = {0.0, 1.0, cz * loss, cz};
    t.edge[1] = {loss, 1.0, 0.0, cr};
    // inverted face relation: intensity from flux
    t.face_chain = {loss, 1.0, 0.0, op.face_hodge[k]};
    for (int c = 0; c < 2; ++c) t.edge_derived[c] = derive_coefficients(t.edge[c], tau);
    t.face_derived = derive_coefficients(t.face_chain, tau);
    tables.push_back(t);
  }
  return tables;
}

PmlLayer::PmlLayer(const Mesh& mesh, const HodgeSet& hodges, const PolarizationOperator& op,
                   const PmlProfile& profile, double dt, const MassSolverOptions& mass)
    : mesh_(&mesh), hodges_(&hodges), op_(&op), tau_(2.0 / dt) {
  tables_ = build_pml_coefficients(mesh, op, profile, dt);
  edge_chains_.resize(tables_.size());
  face_chains_.resize(tables_.size());
  g_now_.assign(mesh.num_edges(), 0.0);
  g_prev_.assign(mesh.num_edges(), 0.0);

  // A = K + sum over layer faces of (w - coef) L; the correction is exactly
  // zero where sigma = 0
  std::vector<Triplet<double>> t;
  auto rp = op.edge_mass.row_ptr();
  auto ci = op.edge_mass.col_idx();
  auto v = op.edge_mass.values();
  for (Index r = 0; r < op.edge_mass.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) t.push_back({r, ci[k], v[k]});
  for (const auto& tab : tables_) {
    const auto& f = mesh.face(tab.face);
    const auto& L = hodges.forms[tab.face];
    double dz = tab.edge_derived[0].w - tab.edge[0].q1;
    double dr = tab.edge_derived[1].w - tab.edge[1].q1;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        int lo = std::min(a, b), hi = std::max(a, b);
        t.push_back({f.edges[a], f.edges[b], dz * L.zz[lo][hi] + dr * L.rr[lo][hi]});
      }
  }
  SparseMatrix a_mesh =
      SparseMatrix::from_triplets(op.edge_mass.rows(), op.edge_mass.cols(), std::move(t));
  a_dof_ = restrict_matrix(a_mesh, op.map);
  solver_ = std::make_unique<MassSolver>(a_dof_, mass);
}

void PmlLayer::face_intensity(std::span<const double> face_flux, std::span<double> out) {
  kernels::mul(op_->face_hodge, face_flux, out);
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    Index k = tables_[i].face;
    out[k] = face_chains_[i].advance(tables_[i].face_derived, tau_, face_flux[k]);
  }
}

void PmlLayer::edge_history(std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g_now_[i] - g_prev_[i];
}

void PmlLayer::edge_updated(std::span<const double> edge_values) {
  std::swap(g_now_, g_prev_);
  std::fill(g_now_.begin(), g_now_.end(), 0.0);
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& tab = tables_[i];
    const auto& f = mesh_->face(tab.face);
    const auto& L = hodges_->forms[tab.face];
    double e[3] = {edge_values[f.edges[0]], edge_values[f.edges[1]], edge_values[f.edges[2]]};
    for (int l = 0; l < 3; ++l) {
      double xz = L.zz[l][0] * e[0] + L.zz[l][1] * e[1] + L.zz[l][2] * e[2];
      double xr = L.rr[l][0] * e[0] + L.rr[l][1] * e[1] + L.rr[l][2] * e[2];
      auto& cz = edge_chains_[i][2 * l];
      auto& cr = edge_chains_[i][2 * l + 1];
      cz.advance(tab.edge_derived[0], tau_, xz);
      cr.advance(tab.edge_derived[1], tau_, xr);
      g_now_[f.edges[l]] += cz.g + cr.g;
    }
  }
}

double PmlLayer::max_history() const {
  double m = 0.0;
  for (const auto& chains : edge_chains_)
    for (const auto& c : chains) m = std::max(m, std::abs(c.g));
  for (const auto& c : face_chains_) m = std::max(m, std::abs(c.g));
  return m;
}

}  // namespace borpic
