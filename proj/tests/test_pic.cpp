#include <doctest.h>

#include <numbers>
#include <random>

#include "borpic/constants.hpp"
#include "borpic/pic.hpp"
#include "support.hpp"

using namespace borpic;

namespace {

std::array<Point, 3> corners(const Mesh& m, Index k) {
  const auto& f = m.face(k);
  return {m.node(f.nodes[0]), m.node(f.nodes[1]), m.node(f.nodes[2])};
}

}  // namespace

TEST_CASE("shape functions integrate to one") {
  for (int order = 0; order <= 3; ++order) {
    ShapeFunction s{order, 0.07};
    CHECK(s.cumulative(s.half_width()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.cumulative(-s.half_width()) == 0.0);
    if (order == 0) continue;
    // composite Simpson on the polynomial pieces
    const int n = 2000;
    const double H = s.half_width(), step = 2 * H / n;
    double acc = s.value(-H) + s.value(H);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * s.value(-H + i * step);
    CHECK(acc * step / 3 == doctest::Approx(1.0).epsilon(1e-12));
  }
  ShapeFunction box{0, 0.2};
  CHECK(box.half_width() == doctest::Approx(0.1));
  CHECK(box.value(0.05) == doctest::Approx(5.0));
}

TEST_CASE("shape integral over a covering mesh is one") {
  Mesh m = testing::irregular_mesh(12, 12, 4);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.3, 0.7);
  for (int order = 0; order <= 3; ++order) {
    ShapeFunction s{order, 0.15};
    Point c{u(rng), u(rng)};
    double total = 0;
    for (Index k = 0; k < m.num_faces(); ++k) total += shape_integral_over_triangle(s, c, corners(m, k));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("velocity push") {
  const double q = -1.6e-13, mass = 9.1e-25, dt = 1e-11;
  Vec3 v{1e5, -2e5, 3e4};
  Vec3 e{10, -3, 7};
  Vec3 out = push_velocity(v, e, {}, q, mass, dt);
  double s = q * dt / mass;
  CHECK(out.z == doctest::Approx(v.z + s * e.z).epsilon(1e-15));
  CHECK(out.rho == doctest::Approx(v.rho + s * e.rho).epsilon(1e-15));
  CHECK(out.phi == doctest::Approx(v.phi + s * e.phi).epsilon(1e-15));

  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto r = testing::random_vector(6, rng);
    Vec3 vv{r[0] * 1e6, r[1] * 1e6, r[2] * 1e6};
    Vec3 b{r[3], r[4], r[5]};
    Vec3 w = push_velocity(vv, {}, b, q, mass, dt * (1 + i));
    CHECK(norm(w) == doctest::Approx(norm(vv)).epsilon(1e-14));
  }
}

TEST_CASE("gyration radius and direction") {
  const double q = -1e6 * elementary_charge, mass = 1e6 * electron_mass, bphi = 8.53e-4;
  const double v0 = 0.025 * c_light, dt = 1e-3 / c_light;
  const double omega = std::abs(q) * bphi / mass;
  const double r_l = v0 / omega;
  CHECK(r_l == doctest::Approx(0.049957).epsilon(1e-4));
  Particle p;
  p.z = 0.45;
  p.rho = 0.5;
  Vec3 v{v0, 0, 0};
  // start the velocity half a step back so the orbit is centered
  double zmin = 1e9, zmax = -1e9, rmin = 1e9, rmax = -1e9;
  const int steps = static_cast<int>(2 * std::numbers::pi / (omega * dt)) + 1;
  for (int n = 0; n < steps; ++n) {
    v = push_velocity(v, {}, {0, 0, bphi}, q, mass, dt);
    p.z += dt * v.z;
    p.rho += dt * v.rho;
    zmin = std::min(zmin, p.z);
    zmax = std::max(zmax, p.z);
    rmin = std::min(rmin, p.rho);
    rmax = std::max(rmax, p.rho);
  }
  CHECK(0.5 * (zmax - zmin) == doctest::Approx(r_l).epsilon(5e-3));
  CHECK(0.5 * (rmax - rmin) == doctest::Approx(r_l).epsilon(5e-3));
  // an electron with B along +phi and v along +z turns toward +rho: F = q v x B
  Vec3 first = push_velocity({v0, 0, 0}, {}, {0, 0, bphi}, q, mass, dt);
  CHECK(first.rho > 0);
}

TEST_CASE("position push boundaries") {
  Domain dom{0.0, 1.0, true, 1.0, 0.8};
  Particle p;
  p.z = 0.5;
  p.rho = 0.5;
  auto path = push_position(p, 1.0, dom);
  CHECK(p.z == 0.5);
  CHECK(p.rho == 0.5);
  REQUIRE(path.size() == 1);

  p.z = 0.95;
  p.v_z = 0.1;
  path = push_position(p, 1.0, dom);
  CHECK(p.z == doctest::Approx(0.05));
  CHECK(path.size() == 2);
  CHECK(path[0].to.z == 1.0);
  CHECK(path[1].from.z == 0.0);

  p = Particle{};
  p.z = 0.5;
  p.rho = 0.75;
  p.v_rho = 0.1;
  push_position(p, 1.0, dom);
  CHECK(p.rho == doctest::Approx(2 * 0.8 - 0.85));
  CHECK(p.v_rho == -0.1);

  p.rho = 0.05;
  p.v_rho = -0.1;
  push_position(p, 1.0, dom);
  CHECK(p.rho == doctest::Approx(0.05));
  CHECK(p.v_rho == 0.1);
  CHECK(p.alive);

  Domain closed{0.0, 1.0, false, 1.0, std::nullopt};
  p = Particle{};
  p.z = 0.95;
  p.rho = 0.5;
  p.v_z = 0.1;
  push_position(p, 1.0, closed);
  CHECK_FALSE(p.alive);
}

TEST_CASE("reversibility without fields") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Domain dom{0.0, 1.0, true, 1.0, 0.9};
  for (int i = 0; i < 100; ++i) {
    Particle p;
    p.z = u(rng);
    p.rho = u(rng) * 0.9;
    p.v_z = (u(rng) - 0.5) * 0.3;
    p.v_rho = (u(rng) - 0.5) * 0.3;
    Particle start = p;
    Vec3 v = push_velocity({p.v_z, p.v_rho, 0}, {}, {}, 1, 1, 1);
    p.v_z = v.z;
    p.v_rho = v.rho;
    push_position(p, 1.0, dom);
    p.v_z = -p.v_z;
    p.v_rho = -p.v_rho;
    push_position(p, 1.0, dom);
    CHECK(p.z == doctest::Approx(start.z).epsilon(1e-13).scale(1));
    CHECK(p.rho == doctest::Approx(start.rho).epsilon(1e-13).scale(1));
  }
}

TEST_CASE("edge deposition") {
  Mesh m = testing::irregular_mesh(6, 6, 2);
  std::vector<double> j(m.num_edges(), 0.0);
  Point c = m.centroid(5);
  std::vector<Segment> still{{c, c}};
  scatter_te(m, still, 1.0, 1.0, j);
  for (double v : j) CHECK(v == 0.0);

  const auto& f = m.face(5);
  Index e = f.edges[0];
  const Edge& ed = m.edge(e);
  std::vector<Segment> along{{m.node(ed.a), m.node(ed.b)}};
  const double q = 3.0, dt = 0.5;
  scatter_te(m, along, q, dt, j, 5);
  CHECK(j[e] == doctest::Approx(q / dt).epsilon(1e-12));
  for (Index x = 0; x < m.num_edges(); ++x)
    if (x != e) CHECK(std::abs(j[x]) < 1e-12 * q / dt);
}

TEST_CASE("charge continuity on random paths") {
  Mesh m = testing::irregular_mesh(10, 10, 6);
  auto inc = build_incidence(m);
  auto grad_t = inc.grad.cast<double>().transpose();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.02, 0.98), step(-0.3, 0.3);
  const double q = -1.6e-13, dt = 2e-12;
  for (int trial = 0; trial < 200; ++trial) {
    Point p0{u(rng), u(rng)};
    Point p1{std::clamp(p0.z + step(rng), 0.01, 0.99), std::clamp(p0.rho + step(rng), 0.01, 0.99)};
    std::vector<double> j(m.num_edges(), 0.0), div(m.num_nodes(), 0.0), rho(m.num_nodes(), 0.0);
    std::vector<Segment> path{{p0, p1}};
    scatter_te(m, path, q, dt, j);
    for (Index n = 0; n < m.num_nodes(); ++n)
      for (Index k = grad_t.row_ptr()[n]; k < grad_t.row_ptr()[n + 1]; ++k)
        div[n] += grad_t.values()[k] * j[grad_t.col_idx()[k]];
    for (auto [pt, sgn] : {std::pair{p1, 1.0}, std::pair{p0, -1.0}}) {
      Index k = *m.locate(pt);
      auto lam = m.barycentric(k, pt);
      for (int i = 0; i < 3; ++i) rho[m.face(k).nodes[i]] += sgn * q * lam[i];
    }
    for (Index n = 0; n < m.num_nodes(); ++n)
      CHECK(std::abs(div[n] - rho[n] / dt) < 1e-12 * std::abs(q / dt));
  }
}

TEST_CASE("azimuthal deposition") {
  Mesh m = testing::irregular_mesh(8, 8, 1);
  std::vector<double> j(m.num_faces(), 0.0);
  scatter_tm(m, ShapeFunction{}, m.centroid(10), 0.0, 1.0, j);
  for (double v : j) CHECK(v == 0.0);

  // support well inside one face
  Index k = 40;
  ShapeFunction tiny{2, 1e-4};
  scatter_tm(m, tiny, m.centroid(k), 2.0, 3.0, j);
  for (Index x = 0; x < m.num_faces(); ++x)
    CHECK(j[x] == doctest::Approx(x == k ? 6.0 : 0.0).epsilon(1e-12));

  std::fill(j.begin(), j.end(), 0.0);
  ShapeFunction wide{3, 0.2};
  scatter_tm(m, wide, {0.47, 0.52}, -1.5, 2.0, j);
  double total = 0;
  for (Index x = 0; x < m.num_faces(); ++x) total += j[x];
  CHECK(total == doctest::Approx(-3.0).epsilon(1e-8));
}

TEST_CASE("periodic azimuthal deposition keeps the total") {
  Mesh m = testing::irregular_mesh(8, 8, 1, true);
  std::vector<double> j(m.num_faces(), 0.0);
  scatter_tm(m, ShapeFunction{2, 0.2}, {0.02, 0.5}, 1.0, 1.0, j);
  double total = 0;
  for (Index x = 0; x < m.num_faces(); ++x) total += j[x];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gather") {
  Mesh m = testing::irregular_mesh(6, 6, 3);
  auto mats = MaterialMap::vacuum(m.num_faces());
  auto st = FieldState::zeros(m, 1e-12);
  Particle p;
  p.z = 0.4;
  p.rho = 0.3;
  auto g = gather(m, st, mats, p);
  CHECK(g.e.z == 0.0);
  CHECK(g.b.phi == 0.0);
  for (Index e = 0; e < m.num_edges(); ++e)
    st.e[e] = 5.0 * (m.node(m.edge(e).b).z - m.node(m.edge(e).a).z);
  g = gather(m, st, mats, p, {0, 0, 2.0});
  CHECK(g.e.z == doctest::Approx(5.0));
  CHECK(std::abs(g.e.rho) < 1e-12);
  CHECK(g.b.phi == 2.0);
  Index k = *m.locate({p.z, p.rho});
  st.d[k] = 4.0;
  g = gather(m, st, mats, p);
  CHECK(g.e.phi == doctest::Approx(4.0 / (eps0 * m.area(k))));
}
