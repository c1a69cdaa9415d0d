// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "borpic/constants.hpp"
#include "borpic/constitutive.hpp"
#include "borpic/field_solver.hpp"
#include "borpic/mesh.hpp"
#include "borpic/pic.hpp"
#include "borpic/run_config.hpp"
#include "borpic/simulation.hpp"
#include "borpic/spectrum.hpp"

using namespace borpic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const SparseMatrix& a) {
  double m = 0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const SparseMatrix& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) d(r, a.col_idx()[k]) = a.values()[k];
  return d;
}

RectangleSpec rect(double z0, double z1, double r0, double r1, int nz, int nr, double jitter,
                   std::uint64_t seed) {
  RectangleSpec s;
  s.z_min = z0;
  s.z_max = z1;
  s.rho_min = r0;
  s.rho_max = r1;
  s.nz = nz;
  s.nrho = nr;
  s.jitter = jitter;
  s.random_diagonals = jitter > 0;
  s.seed = seed;
  return s;
}

RunConfig preset(const std::string& name, std::vector<std::string> overrides = {}) {
  ConfigDocument doc = preset_document(name);
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig c = run_config_from(doc);
  c.output.summary = false;
  return c;
}

// algebraic least-squares circle through the points, centered coordinates
double fit_circle_radius(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d row(x[i] - mx, y[i] - my, 1.0);
    double r2 = row[0] * row[0] + row[1] * row[1];
    a += row * row.transpose();
    b -= row * r2;
  }
  Eigen::Vector3d s = a.ldlt().solve(b);
  return std::sqrt(0.25 * (s[0] * s[0] + s[1] * s[1]) - s[2]);
}

// ---------------------------------------------------------------------------

Outcome exact_identities() {
  bool ok = true;
  double worst_dual = 0;
  long asym = 0;
  for (Mesh mesh : {make_rectangle_mesh(rect(0, 1, 0, 1, 2, 2, 0, 1)),
                    make_rectangle_mesh(rect(0, 1, 0, 1, 10, 10, 0, 1))}) {
    auto inc = build_incidence(mesh);
    auto cg = multiply(inc.curl, inc.grad);
    for (int v : cg.values()) ok = ok && v == 0;
    HodgeSet h = assemble_hodges(mesh, MaterialMap::vacuum(mesh.num_faces()));
    for (const SparseMatrix* m : {&h.star_eps, &h.star_mu, &h.star_mu_inv, &h.star_eps_inv})
      for (Index r = 0; r < m->rows(); ++r)
        for (Index k = m->row_ptr()[r]; k < m->row_ptr()[r + 1]; ++k)
          if (m->values()[k] != m->at(m->col_idx()[k], r)) ++asym;
    auto compare = [&](const SparseMatrix& a, double sa, const SparseMatrix& b, double sb) {
      for (Index r = 0; r < a.rows(); ++r)
        for (Index k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
          double x = sa * a.values()[k], y = sb * b.at(r, a.col_idx()[k]);
          double scale = std::max(std::abs(x), std::abs(y));
          if (scale > 0) worst_dual = std::max(worst_dual, std::abs(x - y) / scale);
        }
    };
    compare(h.star_mu, 1 / mu0, h.star_eps, 1 / eps0);
    compare(h.star_eps_inv, eps0, h.star_mu_inv, mu0);
  }
  ok = ok && asym == 0 && worst_dual <= 1e-14;
  return {ok, fmt("C*G = 0 %s, asymmetric entries %ld, duality max rel %.2e (<= 1e-14)",
                  ok ? "yes" : "checked", asym, worst_dual)};
}

Outcome axis_robustness() {
  Mesh coarse = make_rectangle_mesh(rect(0, 1, 0, 0.5, 24, 8, 0.2, 7));
  Mesh fine = refine_uniform(coarse);
  int touching = 0;
  for (Index k = 0; k < coarse.num_faces(); ++k)
    for (Index n : coarse.face(k).nodes)
      if (coarse.node(n).rho < axis_tolerance) {
        ++touching;
        break;
      }
  struct Measures {
    bool finite = true;
    double min_eig = 1e300;
    std::array<double, 4> max_entry{};
  };
  auto measure = [](const Mesh& m) {
    Measures r;
    HodgeSet h = assemble_hodges(m, MaterialMap::vacuum(m.num_faces()));
    const SparseMatrix* mats[4] = {&h.star_eps, &h.star_mu, &h.star_mu_inv, &h.star_eps_inv};
    for (int i = 0; i < 4; ++i) {
      r.finite = r.finite && all_finite(*mats[i]);
      if (i < 2) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(*mats[i]), Eigen::EigenvaluesOnly);
        // relative to the largest, so that eps0 and mu0 scales compare
        r.min_eig = std::min(r.min_eig, es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff());
        r.max_entry[i] = max_abs(*mats[i]);
      } else {
        // face Hodges carry 1/area; compare area-normalized values
        double mx = 0;
        for (Index k = 0; k < m.num_faces(); ++k) mx = std::max(mx, mats[i]->at(k, k) * m.area(k));
        r.max_entry[i] = mx;
      }
      for (Index k = 0; k < m.num_faces() && i >= 2; ++k)
        r.min_eig = std::min(r.min_eig, mats[i]->at(k, k) > 0 ? 1.0 : -1.0);
    }
    return r;
  };
  Measures a = measure(coarse), b = measure(fine);
  double growth = 0;
  for (int i = 0; i < 4; ++i) growth = std::max(growth, b.max_entry[i] / a.max_entry[i]);
  bool ok = touching >= 20 && a.finite && b.finite && a.min_eig > 0 && b.min_eig > 0 && growth < 2;
  return {ok, fmt("%d axis faces, finite %s, min rel eigenvalue %.2e / %.2e, growth %.3f (< 2)",
                  touching, a.finite && b.finite ? "yes" : "no", a.min_eig, b.min_eig, growth)};
}

Outcome charge_conservation() {
  Mesh m = make_rectangle_mesh(rect(0, 1, 0, 1, 10, 25, 0.25, 3));
  auto grad_t = build_incidence(m).grad.cast<double>().transpose();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.01, 0.99), step(-0.25, 0.25);
  const double q = -1.602176634e-13, dt = 3.3e-12;
  double worst = 0;
  std::vector<double> j(m.num_edges()), div(m.num_nodes()), rho(m.num_nodes());
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Segment> path;
    Point p{u(rng), u(rng)};
    const Point start = p;
    for (int s = 0; s < 3; ++s) {
      Point next{std::clamp(p.z + step(rng), 0.005, 0.995), std::clamp(p.rho + step(rng), 0.0, 0.995)};
      path.push_back({p, next});
      p = next;
    }
    std::fill(j.begin(), j.end(), 0.0);
    std::fill(div.begin(), div.end(), 0.0);
    std::fill(rho.begin(), rho.end(), 0.0);
    scatter_te(m, path, q, dt, j);
    for (Index n = 0; n < m.num_nodes(); ++n)
      for (Index k = grad_t.row_ptr()[n]; k < grad_t.row_ptr()[n + 1]; ++k)
        div[n] += grad_t.values()[k] * j[grad_t.col_idx()[k]];
    for (auto [pt, sgn] : {std::pair{p, 1.0}, std::pair{start, -1.0}}) {
      Index k = *m.locate(pt);
      auto lam = m.barycentric(k, pt);
      for (int i = 0; i < 3; ++i) rho[m.face(k).nodes[i]] += sgn * q * lam[i];
    }
    for (Index n = 0; n < m.num_nodes(); ++n)
      worst = std::max(worst, std::abs(div[n] - rho[n] / dt) / std::abs(q / dt));
  }
  return {worst < 1e-12, fmt("%lld faces, 1000 paths, max residual %.2e |Q/dt| (< 1e-12)",
                             static_cast<long long>(m.num_faces()), worst)};
}

Outcome energy_conservation() {
  Mesh m = make_rectangle_mesh(rect(0, 1, 0, 1, 10, 25, 0.25, 5), MeshOptions{.periodic_z = true});
  MaterialMap mats = MaterialMap::vacuum(m.num_faces());
  HodgeSet h = assemble_hodges(m, mats);
  FieldSolver solver(m, h, mats, SolverOptions{});
  FieldState s = FieldState::zeros(m, solver.estimate_stable_dt(0.9));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : s.e) v = u(rng);
  for (double& v : s.h) v = u(rng);
  for (double& v : s.b) v = u(rng) / c_light;
  for (double& v : s.d) v = u(rng) / c_light;
  s.b_prev = s.b;
  s.h_prev = s.h;
  solver.enforce_boundaries(s);
  solver.step(s, {}, {});
  const double e0_te = solver.energy_te(s), e0_tm = solver.energy_tm(s);
  double drift_te = 0, drift_tm = 0;
  for (int i = 0; i < 10000; ++i) {
    solver.step(s, {}, {});
    drift_te = std::max(drift_te, std::abs(solver.energy_te(s) - e0_te) / e0_te);
    drift_tm = std::max(drift_tm, std::abs(solver.energy_tm(s) - e0_tm) / e0_tm);
  }
  bool ok = drift_te < 1e-10 && drift_tm < 1e-10;
  return {ok, fmt("%lld faces, 1e4 steps, drift TE %.2e TM %.2e (< 1e-10)",
                  static_cast<long long>(m.num_faces()), drift_te, drift_tm)};
}

Outcome gyromotion() {
  RunConfig c = preset("gyromotion-pml");
  Simulation sim(c);
  const auto t0 = std::chrono::steady_clock::now();
  sim.advance(c.steps);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // orbit radius from the recorded trajectory, z unwrapped across the period
  const auto& rows = sim.trajectory().rows;
  const double period_z = c.mesh.z_max - c.mesh.z_min;
  std::vector<double> z, r;
  double shift = 0, last = rows.empty() ? 0 : rows.front()[2];
  for (const auto& row : rows) {
    if (row[2] - last > 0.5 * period_z) shift -= period_z;
    if (row[2] - last < -0.5 * period_z) shift += period_z;
    last = row[2];
    z.push_back(row[2] + shift);
    r.push_back(row[3]);
  }
  const double radius = fit_circle_radius(z, r);
  const double radius_err = std::abs(radius - 0.05) / 0.05;

  // convergence of the pusher alone against the analytic Larmor radius
  const auto& pc = c.particles.front();
  const double omega = std::abs(pc.charge) * c.external_b.phi / pc.mass;
  const double r_larmor = std::hypot(pc.v_z, pc.v_rho) / omega;
  auto orbit_error = [&](double dt) {
    Vec3 v{pc.v_z, pc.v_rho, pc.v_phi};
    double pz = pc.z, pr = pc.rho;
    const long n = std::lround(10 * two_pi / omega / dt);
    std::vector<double> xs, ys;
    for (long i = 0; i < n; ++i) {
      v = push_velocity(v, {}, c.external_b, pc.charge, pc.mass, dt);
      pz += dt * v.z;
      pr += dt * v.rho;
      xs.push_back(pz);
      ys.push_back(pr);
    }
    return std::abs(fit_circle_radius(xs, ys) - r_larmor);
  };
  const double e1 = orbit_error(sim.dt()), e2 = orbit_error(0.5 * sim.dt());
  const double ratio = e1 / e2;

  // fundamental: strongest line among frequencies the mesh resolves at ten
  // elements per wavelength
  const auto& probe = sim.probes().front().table;
  std::vector<double> ez = probe.column("e_z");
  Spectrum spec = fft_spectrum(ez, c.output.probe_every * sim.dt());
  Spectrum band = spec;
  const double f_max = c_light / (10 * c.mesh.element_size);
  std::size_t keep = 0;
  while (keep < band.frequency.size() && band.frequency[keep] <= f_max) ++keep;
  band.frequency.resize(keep);
  band.amplitude.resize(keep);
  SpectralPeak peak = find_peak(band, 2);
  const double w_peak = two_pi * peak.frequency;
  const double w_err = std::abs(w_peak - 1.50e8) / 1.50e8;

  bool ok = radius_err < 0.01 && std::abs(ratio - 4) <= 0.8 && w_err < 0.02 && seconds < 30;
  return {ok, fmt("radius %.6f m (err %.3f%% < 1%%), dt-halving ratio %.3f (4 +- 0.8), "
                  "peak %.4e rad/s (err %.2f%% < 2%%), %lld faces in %.1f s (< 30 s)",
                  radius, 100 * radius_err, ratio, w_peak, 100 * w_err,
                  static_cast<long long>(sim.mesh().num_faces()), seconds)};
}

Outcome pml_absorption() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"te-surface-current", "tm-surface-current"}) {
    RunConfig c = preset(name);
    c.output.energy_every = 1;
    const double transit = c.pml_front() / c_light;
    const double t_end = c.sources.front().pulse.duration() + 3 * transit;
    Simulation sim(c);
    const long steps = std::lround(std::ceil(t_end / sim.dt()));
    sim.advance(steps);
    double peak = 0;
    for (const auto& e : sim.energy_history()) peak = std::max(peak, e.te_physical + e.tm_physical);
    const auto& last = sim.energy_history().back();
    const double residual = (last.te_physical + last.tm_physical) / peak;
    ok = ok && residual < 1e-6;
    detail += fmt("%s residual %.2e; ", name[1] == 'e' ? "TE" : "TM", residual);
  }

  // sigma = 0 layer against plain stepping on the same mesh
  {
    RunConfig c = preset("te-surface-current", {"pml.sigma_max=0"});
    c.sources.push_back(c.sources.front());
    c.sources.back().kind = SourceKind::azimuthal;
    Simulation sim(c);
    FieldSolver plain(sim.mesh(), sim.solver().hodges(), sim.materials(),
                      SolverOptions{c.boundary, c.mass, true, true});
    FieldState s = FieldState::zeros(sim.mesh(), sim.dt());
    std::vector<double> jp(sim.mesh().num_edges()), jf(sim.mesh().num_faces());
    for (int n = 0; n < 1000; ++n) {
      std::fill(jp.begin(), jp.end(), 0.0);
      std::fill(jf.begin(), jf.end(), 0.0);
      for (const auto& src : sim.sources()) src.add((n + 0.5) * sim.dt(), jp, jf);
      plain.step(s, jp, jf);
      sim.step();
    }
    auto rel = [](const std::vector<double>& a, const std::vector<double>& b) {
      double d = 0, m = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(b[i]));
      }
      return m > 0 ? d / m : d;
    };
    const auto& t = sim.state();
    double worst = std::max({rel(t.e, s.e), rel(t.b, s.b), rel(t.d, s.d), rel(t.h, s.h)});
    ok = ok && worst <= 1e-13;
    detail += fmt("sigma=0 vs plain %.2e; ", worst);
  }

  // closed control keeps its energy
  for (const char* name : {"te-surface-current", "tm-surface-current"}) {
    RunConfig c = preset(name, {"pml.mode=pmc-closed"});
    c.output.energy_every = 1;
    Simulation sim(c);
    const double pulse_end = c.sources.front().pulse.duration();
    sim.advance(3 * c.steps);
    double peak = 0, least_after = 1e300;
    for (const auto& e : sim.energy_history()) {
      double w = e.te_physical + e.tm_physical;
      peak = std::max(peak, w);
      if (e.t > pulse_end) least_after = std::min(least_after, w);
    }
    ok = ok && least_after > 0.5 * peak;
    detail += fmt("closed %s keeps %.3f; ", name[1] == 'e' ? "TE" : "TM", least_after / peak);
  }
  detail += "(< 1e-6, <= 1e-13, > 0.5)";
  return {ok, detail};
}

Outcome reflector_study() {
  struct Case {
    const char* name;
    std::vector<std::string> overrides;
  };
  const std::vector<std::string> common{"mesh.jitter=0"};
  auto run = [&](const std::string& name, std::vector<std::string> extra) {
    std::vector<std::string> o = common;
    o.insert(o.end(), extra.begin(), extra.end());
    RunConfig c = preset(name, o);
    c.output.energy_every = 10;
    auto sim = std::make_unique<Simulation>(c);
    sim->advance(c.steps);
    return sim;
  };
  auto pml_peak = [](const Simulation& sim) {
    double peak = 0;
    for (const auto& e : sim.energy_history())
      peak = std::max(peak, (e.te - e.te_physical) + (e.tm - e.tm_physical));
    return peak;
  };
  double spurious[3];
  std::unique_ptr<Simulation> case3;
  for (int i = 0; i < 3; ++i) {
    auto sim = run("ring-near-pml-case" + std::to_string(i + 1), {});
    spurious[i] = pml_peak(*sim);
    if (i == 2) case3 = std::move(sim);
  }
  // reference: the same run with the front moved out to 2 m
  auto ref = run("ring-near-pml-case3", {"mesh.rho_max=2.0"});
  const auto& a = case3->probes().front().table;
  const auto& b = ref->probes().front().table;
  double diff = 0, near = 0;
  for (std::size_t i = 0; i < std::min(a.rows.size(), b.rows.size()); ++i) {
    double dz = a.rows[i][1] - b.rows[i][1], dr = a.rows[i][2] - b.rows[i][2];
    double dp = a.rows[i][3] - b.rows[i][3];
    diff = std::max(diff, std::sqrt(dz * dz + dr * dr + dp * dp));
    near = std::max(near, std::sqrt(b.rows[i][1] * b.rows[i][1] + b.rows[i][2] * b.rows[i][2] +
                                    b.rows[i][3] * b.rows[i][3]));
  }
  const double perturbation = diff / near;
  bool ok = spurious[0] > spurious[1] && spurious[1] > spurious[2] && perturbation < 0.05;
  return {ok, fmt("PML-interior peak energy %.3e > %.3e > %.3e J, case 3 probe perturbation "
                  "%.2f%% of near field (< 5%%)",
                  spurious[0], spurious[1], spurious[2], 100 * perturbation)};
}

Outcome polarization_isolation() {
  RunConfig base = preset("te-surface-current", {"solver.steps=1500"});
  SourceConfig axial = base.sources.front();
  SourceConfig azimuthal = axial;
  azimuthal.kind = SourceKind::azimuthal;
  auto make = [&](std::vector<SourceConfig> sources, bool particle) {
    RunConfig c = base;
    c.sources = std::move(sources);
    if (particle) c.particles.push_back({-0.2, 0.6, 2e6, 1e6, 0.0, -1.602176634e-13, 9.1093837015e-25});
    return std::make_unique<Simulation>(c);
  };
  auto mixed = make({axial, azimuthal}, false);
  auto te_only = make({axial}, true);
  auto te_plain = make({axial}, false);
  auto tm_only = make({azimuthal}, false);
  auto nonzero = [](const std::vector<double>& v) {
    return std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
  };
  long leak = 0, mismatch = 0;
  for (long n = 0; n < base.steps; ++n) {
    mixed->step();
    te_only->step();
    te_plain->step();
    tm_only->step();
    leak += nonzero(te_only->state().d) + nonzero(te_only->state().h);
    leak += nonzero(te_plain->state().d) + nonzero(te_plain->state().h);
    leak += nonzero(tm_only->state().e) + nonzero(tm_only->state().b);
    mismatch += mixed->state().e != te_plain->state().e || mixed->state().b != te_plain->state().b;
    mismatch += mixed->state().d != tm_only->state().d || mixed->state().h != tm_only->state().h;
  }
  const bool ok = leak == 0 && mismatch == 0;
  return {ok, fmt("%ld steps, cross-polarization nonzero DoFs %ld, mixed vs single-source "
                  "mismatches %ld (both exactly 0)",
                  base.steps, leak, mismatch)};
}

// ---------------------------------------------------------------------------
// Standing z-uniform mode E_z = J0(k rho) cos(w t), B_phi = -(k/w) J1(k rho) sin(w t)
// in a PMC-backed cylinder, the superposition of an outgoing and an incoming
// cylindrical wave.

double gauss_rule(double a, double b, const std::function<double(double)>& f) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  double m = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
  for (int i = 0; i < 5; ++i) s += w[i] * f(m + h * x[i]);
  return s * h;
}

// integral over the triangle of g(rho)
double face_integral(const Mesh& mesh, Index k, const std::function<double(double)>& g) {
  std::array<Point, 3> p;
  for (int i = 0; i < 3; ++i) p[i] = mesh.node(mesh.face(k).nodes[i]);
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.rho < b.rho; });
  auto z_on = [](Point a, Point b, double r) {
    return a.rho == b.rho ? a.z : a.z + (b.z - a.z) * (r - a.rho) / (b.rho - a.rho);
  };
  auto width = [&](double r) {
    double z02 = z_on(p[0], p[2], r);
    double zo = r <= p[1].rho ? z_on(p[0], p[1], r) : z_on(p[1], p[2], r);
    return std::abs(z02 - zo);
  };
  double s = 0;
  if (p[1].rho > p[0].rho) s += gauss_rule(p[0].rho, p[1].rho, [&](double r) { return g(r) * width(r); });
  if (p[2].rho > p[1].rho) s += gauss_rule(p[1].rho, p[2].rho, [&](double r) { return g(r) * width(r); });
  return s;
}

Outcome cylindrical_wave_convergence() {
  const double radius = 1.0, length = 0.25;
  const double k = 3.8317059702075123 / radius;  // first zero of J1
  const double w = c_light * k;
  const double t_end = 2 * two_pi / w;
  Mesh mesh = make_rectangle_mesh(rect(0, length, 0, radius, 2, 8, 0, 1), MeshOptions{.periodic_z = true});
  std::vector<double> errors;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    MaterialMap mats = MaterialMap::vacuum(mesh.num_faces());
    HodgeSet h = assemble_hodges(mesh, mats);
    SolverOptions o;
    o.tm = false;
    FieldSolver solver(mesh, h, mats, o);
    const double dt_guess = solver.estimate_stable_dt(0.5);
    const long steps = std::lround(std::ceil(t_end / dt_guess));
    const double dt = t_end / steps;
    FieldState s = FieldState::zeros(mesh, dt);
    for (Index e = 0; e < mesh.num_edges(); ++e) {
      Point a = mesh.node(mesh.edge(e).a), b = mesh.node(mesh.edge(e).b);
      s.e[e] = gauss_rule(0, 1, [&](double t) {
        return std::cyl_bessel_j(0.0, k * (a.rho + t * (b.rho - a.rho))) * (b.z - a.z);
      });
    }
    auto b_flux = [&](Index f, double t) {
      return face_integral(mesh, f, [&](double r) {
        return -(k / w) * std::cyl_bessel_j(1.0, k * r) * std::sin(w * t);
      });
    };
    for (Index f = 0; f < mesh.num_faces(); ++f) {
      s.b[f] = b_flux(f, -0.5 * dt);
      s.b_prev[f] = b_flux(f, -1.5 * dt);
    }
    solver.enforce_boundaries(s);

    // probe rings on element lines of every level
    std::vector<Point> probes;
    for (double r : {0.25, 0.5, 0.75})
      for (int i = 0; i < 8; ++i) probes.push_back({length * (i + 0.5) / 8, r});
    double err2 = 0, ref2 = 0;
    const long every = std::max(1L, steps / 40);
    for (long n = 1; n <= steps; ++n) {
      solver.step(s, {}, {});
      if (n % every != 0 && n != steps) continue;
      const double t = n * dt;
      for (Point p : probes) {
        auto f = eval_physical_field(mesh, s, mats, p);
        double exact = std::cyl_bessel_j(0.0, k * p.rho) * std::cos(w * t);
        err2 += (f->e_z - exact) * (f->e_z - exact);
        ref2 += exact * exact;
      }
    }
    errors.push_back(std::sqrt(err2 / ref2));
  }
  const double r1 = errors[0] / errors[1], r2 = errors[1] / errors[2];
  bool ok = std::abs(r1 - 4) <= 0.8 && std::abs(r2 - 4) <= 0.8;
  return {ok, fmt("relative L2 errors %.3e, %.3e, %.3e; ratios %.2f, %.2f (4 +- 0.8)", errors[0],
                  errors[1], errors[2], r1, r2)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    Outcome (*run)();
    double time_limit;  // seconds
  };
  const Criterion criteria[] = {
      {1, "exact discrete identities", exact_identities, 2.0},
      {2, "axis robustness", axis_robustness, 1e9},
      {3, "charge conservation", charge_conservation, 10},
      {4, "energy conservation", energy_conservation, 60},
      {5, "gyromotion oracle", gyromotion, 1e9},
      {6, "PML absorption", pml_absorption, 180},
      {7, "reflector placement study", reflector_study, 300},
      {8, "polarization isolation", polarization_isolation, 1e9},
      {9, "cylindrical-wave convergence", cylindrical_wave_convergence, 600},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.time_limit) {
      o.pass = false;
      o.detail += fmt(" runtime over the %.0f s limit", c.time_limit);
    }
    std::printf("criterion %d %-30s %s  %s [%.1f s]\n", c.id, c.title, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}
