#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"
#include "borpic/field_solver.hpp"
#include "support.hpp"

using namespace borpic;

namespace {

struct Setup {
  Mesh mesh;
  MaterialMap mats;
  HodgeSet hodges;
  std::unique_ptr<FieldSolver> solver;

  Setup(Mesh m, SolverOptions o = {}, MaterialMap materials = {})
      : mesh(std::move(m)),
        mats(materials.size() ? std::move(materials) : MaterialMap::vacuum(mesh.num_faces())),
        hodges(assemble_hodges(mesh, mats)),
        solver(std::make_unique<FieldSolver>(mesh, hodges, mats, o)) {}
};

void randomize(const Setup& s, FieldState& st, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  st.e = testing::random_vector(s.mesh.num_edges(), rng);
  st.b = testing::random_vector(s.mesh.num_faces(), rng);
  st.h = testing::random_vector(s.mesh.num_edges(), rng);
  st.d = testing::random_vector(s.mesh.num_faces(), rng);
  for (double& v : st.b) v /= c_light;  // comparable electric and magnetic energies
  for (double& v : st.d) v /= c_light;
  st.b_prev = st.b;
  st.h_prev = st.h;
  s.solver->enforce_boundaries(st);
}

}  // namespace

TEST_CASE("boundary selection on the axis") {
  Mesh m = testing::small_mesh();
  int axis_edges = 0;
  for (Index e = 0; e < m.num_edges(); ++e) axis_edges += (m.edge_tags(e) & tag_axis) != 0;
  REQUIRE(axis_edges == 10);
  auto te = apply_boundary_selection(m, Polarization::te, WallCondition::pmc, WallCondition::pmc);
  auto tm = apply_boundary_selection(m, Polarization::tm, WallCondition::pmc, WallCondition::pmc);
  for (Index e = 0; e < m.num_edges(); ++e) {
    if (!(m.edge_tags(e) & tag_axis)) continue;
    CHECK(te.dof[e] >= 0);
    CHECK(tm.dof[e] < 0);
  }
  CHECK(te.count == m.num_edges());
  int rim = 0;
  for (Index e = 0; e < m.num_edges(); ++e) rim += (m.edge_tags(e) & tag_outer) != 0;
  CHECK(tm.count == m.num_edges() - axis_edges - rim);
}

TEST_CASE("periodic selection shares unknowns") {
  Mesh m = testing::small_mesh(true);
  auto te = apply_boundary_selection(m, Polarization::te, WallCondition::pmc, WallCondition::pmc);
  CHECK(te.count == m.num_edges() - 10);
  std::vector<double> vals(m.num_edges());
  std::iota(vals.begin(), vals.end(), 1.0);
  te.enforce(vals);
  for (Index e = 0; e < m.num_edges(); ++e) {
    auto a = m.edge_alias(e);
    if (a.target >= 0) CHECK(vals[e] == a.sign * vals[a.target]);
  }
}

TEST_CASE("zero state stays zero") {
  Setup s(testing::small_mesh());
  auto st = FieldState::zeros(s.mesh, 1e-11);
  for (int i = 0; i < 5; ++i) s.solver->step(st, {}, {});
  for (double v : st.e) CHECK(v == 0.0);
  for (double v : st.b) CHECK(v == 0.0);
  for (double v : st.h) CHECK(v == 0.0);
  for (double v : st.d) CHECK(v == 0.0);
  CHECK(st.time_index == 5);
}

TEST_CASE("stability estimate against the dense eigenvalue") {
  Setup s(testing::irregular_mesh(6, 5, 2));
  const auto& op = s.solver->te();
  Index n = op.map.count;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s.mesh.num_faces(), n);
  for (Index r = 0; r < op.curl.rows(); ++r)
    for (Index k = op.curl.row_ptr()[r]; k < op.curl.row_ptr()[r + 1]; ++k) {
      Index e = op.curl.col_idx()[k];
      if (op.map.dof[e] >= 0) c(r, op.map.dof[e]) += op.map.sign[e] * op.curl.values()[k];
    }
  Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index k = op.edge_mass_dof.row_ptr()[r]; k < op.edge_mass_dof.row_ptr()[r + 1]; ++k)
      kmat(r, op.edge_mass_dof.col_idx()[k]) = op.edge_mass_dof.values()[k];
  Eigen::VectorXd sdiag = Eigen::Map<const Eigen::VectorXd>(op.face_hodge.data(), op.face_hodge.size());
  Eigen::MatrixXd a = c.transpose() * sdiag.asDiagonal() * c;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, kmat);
  double lam = ges.eigenvalues().maxCoeff();
  double exact_dt = 2.0 / std::sqrt(lam);
  SolverOptions te_only;
  te_only.tm = false;
  FieldSolver only(s.mesh, s.hodges, s.mats, te_only);
  double est = only.estimate_stable_dt(1.0, 200);
  CHECK(est >= exact_dt * (1 - 1e-6));
  CHECK(est <= exact_dt * 1.05);
}

TEST_CASE("source-free energy is conserved") {
  Setup s(testing::irregular_mesh(10, 10, 4), SolverOptions{});
  auto st = FieldState::zeros(s.mesh, s.solver->estimate_stable_dt());
  randomize(s, st, 1);
  s.solver->step(st, {}, {});
  double e_te = s.solver->energy_te(st), e_tm = s.solver->energy_tm(st);
  CHECK(e_te > 0);
  CHECK(e_tm > 0);
  double worst_te = 0, worst_tm = 0;
  for (int i = 0; i < 1000; ++i) {
    s.solver->step(st, {}, {});
    worst_te = std::max(worst_te, testing::rel_diff(s.solver->energy_te(st), e_te));
    worst_tm = std::max(worst_tm, testing::rel_diff(s.solver->energy_tm(st), e_tm));
  }
  CHECK(worst_te < 1e-10);
  CHECK(worst_tm < 1e-10);
}

TEST_CASE("TM stepping reproduces TE stepping under duality") {
  Mesh m = testing::irregular_mesh(8, 6, 3);
  auto mats = MaterialMap::vacuum(m.num_faces());
  Material odd{2 * eps0, 3 * eps0, 5 * eps0, 1.5 * mu0, 2.5 * mu0, 1.2 * mu0};
  for (Index k = 0; k < m.num_faces(); k += 3) mats.set(k, odd);
  SolverOptions te_opt, tm_opt;
  te_opt.tm = false;
  tm_opt.te = false;
  // the same kept edges in both runs
  te_opt.boundary.te_axis = te_opt.boundary.te_rim = WallCondition::pmc;
  tm_opt.boundary.tm_axis = tm_opt.boundary.tm_rim = WallCondition::pec;
  Setup te(m, te_opt, mats);
  Setup tm(m, tm_opt, mats.swapped());
  double dt = 0.9 * te.solver->estimate_stable_dt();
  auto a = FieldState::zeros(m, dt);
  auto b = FieldState::zeros(m, dt);
  std::mt19937_64 rng(9);
  a.e = testing::random_vector(m.num_edges(), rng);
  a.b = testing::random_vector(m.num_faces(), rng);
  te.solver->enforce_boundaries(a);
  b.h = a.e;
  te.solver->step_te(a, {});
  for (std::size_t k = 0; k < a.b.size(); ++k) b.d[k] = -a.b[k];
  for (int i = 0; i < 200; ++i) {
    te.solver->step_te(a, {});
    tm.solver->step_tm(b, {});
  }
  // after the shift the TM edge values trail the TE ones by one step
  tm.solver->step_tm(b, {});
  bool same = true;
  for (std::size_t i = 0; i < a.e.size(); ++i) same = same && b.h[i] == a.e[i];
  CHECK(same);
  te.solver->step_te(a, {});
  same = true;
  for (std::size_t k = 0; k < a.b.size(); ++k) same = same && b.d[k] == -a.b[k];
  CHECK(same);
}

TEST_CASE("eliminated unknowns stay zero and periodic twins stay equal") {
  SolverOptions o;
  o.boundary.te_rim = WallCondition::pec;
  Setup s(testing::irregular_mesh(8, 8, 5, true), o);
  auto st = FieldState::zeros(s.mesh, s.solver->estimate_stable_dt());
  randomize(s, st, 3);
  for (int i = 0; i < 50; ++i) s.solver->step(st, {}, {});
  for (Index e = 0; e < s.mesh.num_edges(); ++e) {
    if (s.solver->te().map.dof[e] < 0) CHECK(st.e[e] == 0.0);
    if (s.solver->tm().map.dof[e] < 0) CHECK(st.h[e] == 0.0);
    auto a = s.mesh.edge_alias(e);
    if (a.target >= 0) {
      CHECK(st.e[e] == a.sign * st.e[a.target]);
      CHECK(st.h[e] == a.sign * st.h[a.target]);
    }
  }
}

TEST_CASE("an unstable step is reported") {
  Setup s(testing::small_mesh());
  auto st = FieldState::zeros(s.mesh, 50 * s.solver->estimate_stable_dt());
  randomize(s, st, 2);
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 5000; ++i) s.solver->step(st, {}, {});
      }(),
      SolverError);
}

TEST_CASE("field evaluation") {
  Setup s(testing::irregular_mesh(6, 6, 7));
  auto st = FieldState::zeros(s.mesh, 1e-12);
  // circulations of a uniform field E = (3, -2)
  for (Index e = 0; e < s.mesh.num_edges(); ++e) {
    Vec2 t = s.mesh.node(s.mesh.edge(e).b) - s.mesh.node(s.mesh.edge(e).a);
    st.e[e] = 3 * t.z - 2 * t.rho;
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 50; ++i) {
    auto f = eval_physical_field(s.mesh, st, s.mats, {u(rng), u(rng)});
    REQUIRE(f);
    CHECK(f->e_z == doctest::Approx(3).epsilon(1e-11));
    CHECK(f->e_rho == doctest::Approx(-2).epsilon(1e-11));
    CHECK(f->b_phi == 0.0);
  }
  auto axis = eval_physical_field(s.mesh, st, s.mats, {0.5, 0.0});
  REQUIRE(axis);
  CHECK(axis->e_rho == 0.0);
  CHECK(axis->e_z == doctest::Approx(3).epsilon(1e-11));
  CHECK_FALSE(eval_physical_field(s.mesh, st, s.mats, {2.0, 0.5}));

  // one-face flux impulse
  st = FieldState::zeros(s.mesh, 1e-12);
  Index k = 17;
  st.d[k] = eps0 * s.mesh.area(k);
  st.b[k] = st.b_prev[k] = 2 * s.mesh.area(k);
  auto f = eval_in_face(s.mesh, st, s.mats, k, s.mesh.centroid(k));
  CHECK(f.e_phi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.b_phi == doctest::Approx(2.0).epsilon(1e-14));
}
