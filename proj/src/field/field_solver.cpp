#include "borpic/field_solver.hpp"

#include <cmath>
#include <random>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"
#include "borpic/kernels.hpp"

namespace borpic {

void EdgeDofMap::restrict_to(std::span<const double> mesh_values, std::span<double> dofs) const {
  std::fill(dofs.begin(), dofs.end(), 0.0);
  for (std::size_t i = 0; i < dof.size(); ++i)
    if (dof[i] >= 0) dofs[dof[i]] += sign[i] * mesh_values[i];
}

void EdgeDofMap::add_expanded(std::span<const double> dofs, std::span<double> mesh_values) const {
  for (std::size_t i = 0; i < dof.size(); ++i)
    if (dof[i] >= 0) mesh_values[i] += sign[i] * dofs[dof[i]];
}

void EdgeDofMap::enforce(std::span<double> mesh_values) const {
  std::vector<double> owner(count, 0.0);
  std::vector<char> seen(count, 0);
  for (std::size_t i = 0; i < dof.size(); ++i)
    if (dof[i] >= 0 && !seen[dof[i]] && sign[i] > 0) {
      // first positively oriented edge owning the unknown holds its value
      owner[dof[i]] = mesh_values[i];
      seen[dof[i]] = 1;
    }
  for (std::size_t i = 0; i < dof.size(); ++i)
    mesh_values[i] = dof[i] >= 0 ? sign[i] * owner[dof[i]] : 0.0;
}

EdgeDofMap apply_boundary_selection(const Mesh& mesh, Polarization pol, WallCondition axis,
                                    WallCondition rim) {
  auto removes = [pol](WallCondition w) {
    return pol == Polarization::te ? w == WallCondition::pec : w == WallCondition::pmc;
  };
  const Index n = mesh.num_edges();
  EdgeDofMap map;
  map.dof.assign(n, -1);
  map.sign.assign(n, 1);
  for (Index e = 0; e < n; ++e) {
    std::uint8_t t = mesh.edge_tags(e);
    if (mesh.edge_alias(e).target >= 0) continue;
    if ((t & tag_axis) && removes(axis)) continue;
    if ((t & tag_outer) && removes(rim)) continue;
    map.dof[e] = map.count++;
  }
  for (Index e = 0; e < n; ++e) {
    auto alias = mesh.edge_alias(e);
    if (alias.target < 0) continue;
    map.dof[e] = map.dof[alias.target];
    map.sign[e] = alias.sign;
  }
  if (map.count == 0) throw Error("boundary selection removed every unknown");
  return map;
}

FieldState FieldState::zeros(const Mesh& mesh, double dt) {
  FieldState s;
  s.e.assign(mesh.num_edges(), 0.0);
  s.h = s.h_prev = s.e;
  s.b.assign(mesh.num_faces(), 0.0);
  s.b_prev = s.d = s.b;
  s.dt = dt;
  return s;
}

SparseMatrix restrict_matrix(const SparseMatrix& a, const EdgeDofMap& map) {
  std::vector<Triplet<double>> t;
  t.reserve(a.nnz());
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (Index r = 0; r < a.rows(); ++r) {
    if (map.dof[r] < 0) continue;
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      Index c = ci[k];
      if (map.dof[c] < 0) continue;
      t.push_back({map.dof[r], map.dof[c], (map.sign[r] * map.sign[c]) * v[k]});
    }
  }
  return SparseMatrix::from_triplets(map.count, map.count, std::move(t));
}

namespace {

PolarizationOperator make_operator(const Mesh& mesh, Polarization pol, const SparseMatrix& curl,
                                   const SparseMatrix& curl_t, const SparseMatrix& edge_mass,
                                   const SparseMatrix& face_hodge,
                                   const std::vector<std::array<double, 2>>& coef,
                                   const BoundaryOptions& bc, const MassSolverOptions& mass,
                                   bool enabled) {
  PolarizationOperator op;
  op.pol = pol;
  op.map = pol == Polarization::te ? apply_boundary_selection(mesh, pol, bc.te_axis, bc.te_rim)
                                   : apply_boundary_selection(mesh, pol, bc.tm_axis, bc.tm_rim);
  op.curl = curl;
  op.curl_t = curl_t;
  op.edge_mass = edge_mass;
  op.face_hodge = diagonal(face_hodge);
  op.edge_coef = coef;
  if (enabled) {
    op.edge_mass_dof = restrict_matrix(edge_mass, op.map);
    op.solver = std::make_shared<MassSolver>(op.edge_mass_dof, mass);
  }
  return op;
}

bool all_finite(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * 0.0;
  return acc == 0.0;
}

}  // namespace

FieldSolver::FieldSolver(const Mesh& mesh, const HodgeSet& hodges, const MaterialMap& materials,
                         const SolverOptions& options)
    : mesh_(&mesh), hodges_(&hodges), options_(options) {
  (void)materials;
  auto inc = build_incidence(mesh);
  SparseMatrix curl = inc.curl.cast<double>();
  SparseMatrix curl_t = curl.transpose();
  te_ = make_operator(mesh, Polarization::te, curl, curl_t, hodges.star_eps, hodges.star_mu_inv,
                      hodges.eps_coef, options.boundary, options.mass, options.te);
  tm_ = make_operator(mesh, Polarization::tm, curl, curl_t, hodges.star_mu, hodges.star_eps_inv,
                      hodges.mu_coef, options.boundary, options.mass, options.tm);
  face_tmp_.resize(mesh.num_faces());
  edge_tmp_.resize(mesh.num_edges());
  hist_.resize(mesh.num_edges());
  intensity_.resize(mesh.num_faces());
}

void FieldSolver::set_chain(Polarization pol, std::shared_ptr<ConstitutiveChain> chain) {
  (pol == Polarization::te ? te_chain_ : tm_chain_) = std::move(chain);
}

void FieldSolver::face_update(const PolarizationOperator& op, double scale,
                              std::span<const double> edge_vals, std::span<const double> source,
                              std::span<double> face_vals) const {
  kernels::spmv(op.curl, edge_vals, face_tmp_);
  if (!source.empty()) kernels::axpy(-1.0, source, face_tmp_);
  kernels::axpy(scale, face_tmp_, face_vals);
  if (!all_finite(face_vals)) throw SolverError("non-finite face values: unstable time step?");
}

void FieldSolver::face_intensity(const PolarizationOperator& op, ConstitutiveChain* chain,
                                 std::span<const double> flux, std::span<double> out) const {
  if (chain)
    chain->face_intensity(flux, out);
  else
    kernels::mul(op.face_hodge, flux, out);
}

void FieldSolver::edge_update(const PolarizationOperator& op, ConstitutiveChain* chain,
                              double scale, std::span<const double> intensity,
                              std::span<const double> source, std::span<double> edge_vals) const {
  kernels::spmv(op.curl_t, intensity, edge_tmp_);
  if (!source.empty()) kernels::axpy(-1.0, source, edge_tmp_);
  dof_rhs_.resize(op.map.count);
  dof_sol_.resize(op.map.count);
  op.map.restrict_to(edge_tmp_, dof_rhs_);
  for (double& v : dof_rhs_) v = scale * v;
  const MassSolver* solver = op.solver.get();
  if (chain) {
    chain->edge_history(hist_);
    op.map.restrict_to(hist_, dof_sol_);
    kernels::axpy(-1.0, dof_sol_, dof_rhs_);
    solver = &chain->edge_solver();
  }
  solver->solve(dof_rhs_, dof_sol_);
  if (!all_finite(dof_sol_)) throw SolverError("non-finite edge values: unstable time step?");
  op.map.add_expanded(dof_sol_, edge_vals);
  if (chain) chain->edge_updated(edge_vals);
}

void FieldSolver::advance_magnetic(FieldState& s) const {
  if (options_.te) {
    s.b_prev = s.b;
    face_update(te_, -s.dt, s.e, {}, s.b);
  }
  if (options_.tm) {
    s.h_prev = s.h;
    face_intensity(tm_, tm_chain_.get(), s.d, intensity_);
    edge_update(tm_, tm_chain_.get(), -s.dt, intensity_, {}, s.h);
  }
}

void FieldSolver::advance_electric(FieldState& s, std::span<const double> j_par,
                                   std::span<const double> j_perp) const {
  if (options_.te) {
    face_intensity(te_, te_chain_.get(), s.b, intensity_);
    edge_update(te_, te_chain_.get(), s.dt, intensity_, j_par, s.e);
  }
  if (options_.tm) face_update(tm_, s.dt, s.h, j_perp, s.d);
  ++s.time_index;
}

void FieldSolver::step_te(FieldState& s, std::span<const double> j_par) const {
  s.b_prev = s.b;
  face_update(te_, -s.dt, s.e, {}, s.b);
  face_intensity(te_, te_chain_.get(), s.b, intensity_);
  edge_update(te_, te_chain_.get(), s.dt, intensity_, j_par, s.e);
  ++s.time_index;
}

void FieldSolver::step_tm(FieldState& s, std::span<const double> j_perp) const {
  s.h_prev = s.h;
  face_intensity(tm_, tm_chain_.get(), s.d, intensity_);
  edge_update(tm_, tm_chain_.get(), -s.dt, intensity_, {}, s.h);
  face_update(tm_, s.dt, s.h, j_perp, s.d);
  ++s.time_index;
}

void FieldSolver::step(FieldState& s, std::span<const double> j_par,
                       std::span<const double> j_perp) const {
  advance_magnetic(s);
  advance_electric(s, j_par, j_perp);
}

double FieldSolver::energy_te(const FieldState& s) const {
  std::vector<double> ke(mesh_->num_edges()), ce(mesh_->num_faces()), sb(mesh_->num_faces());
  kernels::spmv(te_.edge_mass, s.e, ke);
  kernels::spmv(te_.curl, s.e, ce);
  kernels::mul(te_.face_hodge, s.b, sb);
  return 0.5 * kernels::dot(s.e, ke) +
         0.5 * (kernels::dot(s.b, sb) - s.dt * kernels::dot(sb, ce));
}

double FieldSolver::energy_tm(const FieldState& s) const {
  std::vector<double> kh(mesh_->num_edges()), ch(mesh_->num_faces()), sd(mesh_->num_faces());
  kernels::spmv(tm_.edge_mass, s.h, kh);
  kernels::spmv(tm_.curl, s.h, ch);
  kernels::mul(tm_.face_hodge, s.d, sd);
  return 0.5 * kernels::dot(s.d, sd) +
         0.5 * (kernels::dot(s.h, kh) - s.dt * kernels::dot(sd, ch));
}

double FieldSolver::lambda_max(const PolarizationOperator& op, int iterations) const {
  const Index n = op.map.count;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> x(n), y(n), kx(n), mesh_x(mesh_->num_edges()), face(mesh_->num_faces()),
      edge(mesh_->num_edges());
  for (double& v : x) v = unit(rng);
  double lambda = 0.0;
  for (int it = 0; it <= iterations; ++it) {
    double nx = std::sqrt(kernels::dot(x, x));
    for (double& v : x) v /= nx;
    std::fill(mesh_x.begin(), mesh_x.end(), 0.0);
    op.map.add_expanded(x, mesh_x);
    kernels::spmv(op.curl, mesh_x, face);
    kernels::mul(op.face_hodge, face, face);
    kernels::spmv(op.curl_t, face, edge);
    op.map.restrict_to(edge, y);
    kernels::spmv(op.edge_mass_dof, x, kx);
    lambda = kernels::dot(x, y) / kernels::dot(x, kx);
    if (it == iterations) break;
    op.solver->solve(y, x);
  }
  return lambda;
}

double FieldSolver::estimate_stable_dt(double safety, int iterations) const {
  double lam = 0.0;
  if (options_.te) lam = std::max(lam, lambda_max(te_, iterations));
  if (options_.tm) lam = std::max(lam, lambda_max(tm_, iterations));
  if (!(lam > 0.0)) throw SolverError("stability estimate failed");
  return safety * 2.0 / std::sqrt(lam);
}

void FieldSolver::enforce_boundaries(FieldState& s) const {
  te_.map.enforce(s.e);
  tm_.map.enforce(s.h);
  tm_.map.enforce(s.h_prev);
}

double FieldSolver::region_energy(Polarization pol, const FieldState& s, double rho_limit) const {
  const bool te = pol == Polarization::te;
  const auto& op = te ? te_ : tm_;
  const auto& edge_vals = te ? s.e : s.h;
  const auto& edge_prev = te ? s.e : s.h_prev;
  const auto& face_vals = te ? s.b : s.d;
  const auto& face_prev = te ? s.b_prev : s.d;
  double total = 0.0;
  for (Index k = 0; k < mesh_->num_faces(); ++k) {
    if (!(mesh_->centroid(k).rho < rho_limit)) continue;
    const auto& f = mesh_->face(k);
    const auto& L = hodges_->forms[k];
    double x[3];
    for (int l = 0; l < 3; ++l) x[l] = 0.5 * (edge_vals[f.edges[l]] + edge_prev[f.edges[l]]);
    double edge_part = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        edge_part += x[a] * x[b] * (op.edge_coef[k][0] * L.zz[a][b] + op.edge_coef[k][1] * L.rr[a][b]);
    double fv = 0.5 * (face_vals[k] + face_prev[k]);
    total += 0.5 * edge_part + 0.5 * op.face_hodge[k] * fv * fv;
  }
  return total;
}

PhysicalField eval_in_face(const Mesh& mesh, const FieldState& s, const MaterialMap& materials,
                           Index face, Point p) {
  auto w = whitney_eval(mesh, face, p);
  const auto& f = mesh.face(face);
  const Material& mat = materials[face];
  PhysicalField out;
  double hz = 0.0, hr = 0.0;
  for (int l = 0; l < 3; ++l) {
    Index e = f.edges[l];
    out.e_z += s.e[e] * w.w1[l].z;
    out.e_rho += s.e[e] * w.w1[l].rho;
    double h = 0.5 * (s.h_prev[e] + s.h[e]);
    hz += h * w.w1[l].z;
    hr += h * w.w1[l].rho;
  }
  out.e_phi = s.d[face] * w.w2 / mat.eps_phi;
  out.b_phi = 0.5 * (s.b_prev[face] + s.b[face]) * w.w2;
  out.b_z = mat.mu_z * hz;
  out.b_rho = mat.mu_rho * hr;
  if (p.rho < axis_tolerance) out.e_rho = out.e_phi = out.b_rho = out.b_phi = 0.0;
  return out;
}

std::optional<PhysicalField> eval_physical_field(const Mesh& mesh, const FieldState& s,
                                                 const MaterialMap& materials, Point p,
                                                 std::optional<Index> hint) {
  auto face = mesh.locate(p, hint);
  if (!face) return std::nullopt;
  return eval_in_face(mesh, s, materials, *face, p);
}

}  // namespace borpic
