#include "borpic/pic.hpp"

#include <cmath>
#include <cstdio>

#include "borpic/constants.hpp"
#include "borpic/error.hpp"

namespace borpic {

namespace {

constexpr double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double gl_nodes[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
                                0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double gl_weights[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                  0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                  0.1294849661688697};

std::vector<Point> clip(std::vector<Point> poly, int axis, double bound, bool keep_above) {
  auto coord = [axis](const Point& p) { return axis == 0 ? p.z : p.rho; };
  auto inside = [&](const Point& p) { return keep_above ? coord(p) >= bound : coord(p) <= bound; };
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      double t = (bound - coord(a)) / (coord(b) - coord(a));
      Point q = lerp(a, b, t);
      if (axis == 0)
        q.z = bound;
      else
        q.rho = bound;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace

double ShapeFunction::value(double u) const {
  const double H = half_width();
  if (std::abs(u) >= H) return 0.0;
  double x = u / H;
  return std::pow(1.0 - x * x, order) / alpha;
}

double ShapeFunction::cumulative(double u) const {
  const double H = half_width();
  double x = std::clamp(u / H, -1.0, 1.0);
  // antiderivative of (1 - t^2)^m from -1 to x, term by term
  double sum = 0.0, sum_lo = 0.0;
  for (int k = 0; k <= order; ++k) {
    double c = binomial(order, k) * (k % 2 ? -1.0 : 1.0) / (2 * k + 1);
    sum += c * std::pow(x, 2 * k + 1);
    sum_lo += c * std::pow(-1.0, 2 * k + 1);
  }
  return H / alpha * (sum - sum_lo);
}

double shape_integral_over_triangle(const ShapeFunction& shape, Point center,
                                    const std::array<Point, 3>& tri) {
  const double H = shape.half_width();
  std::vector<Point> poly(tri.begin(), tri.end());
  poly = clip(std::move(poly), 0, center.z - H, true);
  if (poly.size() >= 3) poly = clip(std::move(poly), 0, center.z + H, false);
  if (poly.size() >= 3) poly = clip(std::move(poly), 1, center.rho - H, true);
  if (poly.size() >= 3) poly = clip(std::move(poly), 1, center.rho + H, false);
  if (poly.size() < 3) return 0.0;
  // Green: integral of P(z)P(rho) dA = loop integral of Pcum(z) P(rho) drho
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    double drho = b.rho - a.rho;
    if (drho == 0.0) continue;
    double acc = 0.0;
    for (int q = 0; q < 7; ++q) {
      double t = 0.5 * (gl_nodes[q] + 1.0);
      Point p = lerp(a, b, t);
      acc += gl_weights[q] * shape.cumulative(p.z - center.z) * shape.value(p.rho - center.rho);
    }
    total += 0.5 * acc * drho;
  }
  return total;
}

Gathered gather(const Mesh& mesh, const FieldState& s, const MaterialMap& materials,
                const Particle& p, Vec3 external_b) {
  auto face = mesh.locate({p.z, p.rho}, p.face >= 0 ? std::optional<Index>(p.face) : std::nullopt);
  if (!face) throw Error("cannot locate particle for gather");
  PhysicalField f = eval_in_face(mesh, s, materials, *face, {p.z, p.rho});
  return {{f.e_z, f.e_rho, f.e_phi}, Vec3{f.b_z, f.b_rho, f.b_phi} + external_b};
}

Vec3 push_velocity(Vec3 v, Vec3 e, Vec3 b, double charge, double mass, double dt) {
  const double s = charge * dt / mass;
  const double hz = 0.5 * s * b.z, hr = 0.5 * s * b.rho, hp = 0.5 * s * b.phi;
  // N = [[1, -hp, hr], [hp, 1, -hz], [-hr, hz, 1]]
  const double n[3][3] = {{1.0, -hp, hr}, {hp, 1.0, -hz}, {-hr, hz, 1.0}};
  const double in[3] = {v.z, v.rho, v.phi};
  double rhs[3];
  const double se[3] = {s * e.z, s * e.rho, s * e.phi};
  for (int i = 0; i < 3; ++i) rhs[i] = n[0][i] * in[0] + n[1][i] * in[1] + n[2][i] * in[2] + se[i];
  double adj[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      adj[i][j] = n[r0][c0] * n[r1][c1] - n[r0][c1] * n[r1][c0];
    }
  const double det = 1.0 + hz * hz + hr * hr + hp * hp;
  double out[3];
  for (int i = 0; i < 3; ++i)
    out[i] = (adj[i][0] * rhs[0] + adj[i][1] * rhs[1] + adj[i][2] * rhs[2]) / det;
  return {out[0], out[1], out[2]};
}

Domain domain_of(const Mesh& mesh, std::optional<double> reflector) {
  return {mesh.z_min(), mesh.z_max(), mesh.periodic(), mesh.rho_max(), reflector};
}

std::vector<Segment> push_position(Particle& p, double dt, const Domain& dom) {
  std::vector<Segment> path;
  Point pos{p.z, p.rho};
  Point target{p.z + dt * p.v_z, p.rho + dt * p.v_rho};
  const double length = dom.z_max - dom.z_min;
  for (int iter = 0; iter < 16; ++iter) {
    enum { none, axis, wall, right, left, lost_rho, lost_z } kind = none;
    double t_hit = 1.0;
    auto consider = [&](double from, double to, double bound, bool above, decltype(kind) k) {
      bool crosses = above ? (to > bound && from <= bound) : (to < bound && from >= bound);
      if (!crosses) return;
      double t = (bound - from) / (to - from);
      if (t < t_hit || kind == none) {
        t_hit = t;
        kind = k;
      }
    };
    consider(pos.rho, target.rho, 0.0, false, axis);
    if (dom.reflector)
      consider(pos.rho, target.rho, *dom.reflector, true, wall);
    else
      consider(pos.rho, target.rho, dom.rho_outer, true, lost_rho);
    consider(pos.z, target.z, dom.z_max, true, dom.periodic_z ? right : lost_z);
    consider(pos.z, target.z, dom.z_min, false, dom.periodic_z ? left : lost_z);
    if (kind == none) {
      path.push_back({pos, target});
      p.z = target.z;
      p.rho = target.rho;
      // a point exactly on z_max belongs to the left boundary
      if (dom.periodic_z && p.z >= dom.z_max) p.z -= length;
      return path;
    }
    Point hit = lerp(pos, target, t_hit);
    switch (kind) {
      case axis:
        hit.rho = 0.0;
        target.rho = -target.rho;
        p.v_rho = -p.v_rho;
        break;
      case wall:
        hit.rho = *dom.reflector;
        target.rho = 2.0 * *dom.reflector - target.rho;
        p.v_rho = -p.v_rho;
        break;
      case right:
        hit.z = dom.z_max;
        break;
      case left:
        hit.z = dom.z_min;
        break;
      default:
        p.alive = false;
        path.clear();
        return path;
    }
    if (t_hit > 0.0) path.push_back({pos, hit});
    pos = hit;
    if (kind == right) {
      pos.z = dom.z_min;
      target.z -= length;
    } else if (kind == left) {
      pos.z = dom.z_max;
      target.z += length;
    }
  }
  std::fprintf(stderr, "warning: particle bounced too often in one step, removed\n");
  p.alive = false;
  path.clear();
  return path;
}

void scatter_te(const Mesh& mesh, std::span<const Segment> path, double weight, double dt,
                std::span<double> j_par, std::optional<Index> hint) {
  const double scale = weight / dt;
  for (const auto& seg : path) {
    auto start = mesh.locate(seg.from, hint);
    if (!start) throw Error("particle path starts outside the mesh");
    auto pieces = mesh.split_segment(*start, seg.from, seg.to);
    for (const auto& piece : pieces) {
      Point a = lerp(seg.from, seg.to, piece.t0);
      Point b = lerp(seg.from, seg.to, piece.t1);
      auto la = mesh.barycentric(piece.face, a);
      auto lb = mesh.barycentric(piece.face, b);
      const auto& f = mesh.face(piece.face);
      for (int l = 0; l < 3; ++l) {
        int i = l, j = (l + 1) % 3;
        if (f.signs[l] < 0) std::swap(i, j);
        j_par[f.edges[l]] += scale * whitney_segment_integral(la[i], la[j], lb[i], lb[j]);
      }
    }
    if (!pieces.empty()) hint = pieces.back().face;
  }
}

void scatter_tm(const Mesh& mesh, const ShapeFunction& shape, Point midpoint, double v_phi,
                double weight, std::span<double> j_perp) {
  if (v_phi == 0.0 || weight == 0.0) return;
  const double H = shape.half_width();
  double norm = 1.0;
  if (shape.renormalize_axis && midpoint.rho < H) norm = 1.0 / (1.0 - shape.cumulative(-midpoint.rho));
  const double length = mesh.z_max() - mesh.z_min();
  const double shifts[3] = {0.0, -length, length};
  const int nshift = mesh.periodic() ? 3 : 1;
  for (int s = 0; s < nshift; ++s) {
    Point c{midpoint.z + shifts[s], midpoint.rho};
    if (c.z + H < mesh.z_min() || c.z - H > mesh.z_max()) continue;
    for (Index k : mesh.faces_in_box(c.z - H, c.z + H, c.rho - H, c.rho + H)) {
      const auto& f = mesh.face(k);
      std::array<Point, 3> tri = {mesh.node(f.nodes[0]), mesh.node(f.nodes[1]),
                                  mesh.node(f.nodes[2])};
      double integral = shape_integral_over_triangle(shape, c, tri);
      if (integral != 0.0) j_perp[k] += norm * weight * v_phi * integral;
    }
  }
}

namespace {

Point path_midpoint(std::span<const Segment> path) {
  double total = 0.0;
  for (const auto& s : path) total += norm(s.to - s.from);
  if (total == 0.0) return path.front().from;
  double half = 0.5 * total;
  for (const auto& s : path) {
    double len = norm(s.to - s.from);
    if (half <= len) return lerp(s.from, s.to, half / len);
    half -= len;
  }
  return path.back().to;
}

}  // namespace

ParticleCensus advance_particles(const Mesh& mesh, const FieldState& s,
                                 const MaterialMap& materials, std::vector<Particle>& particles,
                                 const PicOptions& options, double dt, std::span<double> j_par,
                                 std::span<double> j_perp) {
  ParticleCensus census;
  const Domain dom = domain_of(mesh, options.reflector);
  for (auto& p : particles) {
    if (!p.alive) {
      ++census.lost;
      continue;
    }
    auto face = mesh.locate({p.z, p.rho}, p.face >= 0 ? std::optional<Index>(p.face) : std::nullopt);
    if (!face) {
      p.alive = false;
      ++census.lost;
      continue;
    }
    p.face = *face;
    PhysicalField f = eval_in_face(mesh, s, materials, *face, {p.z, p.rho});
    Vec3 e{f.e_z, f.e_rho, f.e_phi};
    Vec3 b = Vec3{f.b_z, f.b_rho, f.b_phi} + options.external_b;
    Vec3 v = push_velocity({p.v_z, p.v_rho, p.v_phi}, e, b, p.charge, p.mass, dt);
    p.v_z = v.z;
    p.v_rho = v.rho;
    p.v_phi = v.phi;
    auto path = push_position(p, dt, dom);
    if (!p.alive) {
      std::fprintf(stderr, "warning: particle left the domain near z=%g rho=%g\n", p.z, p.rho);
      ++census.lost;
      continue;
    }
    if (!j_par.empty()) scatter_te(mesh, path, p.charge / two_pi, dt, j_par, p.face);
    if (!j_perp.empty() && p.v_phi != 0.0) {
      Point mid = path_midpoint(path);
      double rho_mid = std::max(mid.rho, axis_tolerance);
      scatter_tm(mesh, options.shape, mid, p.v_phi, p.charge / (two_pi * rho_mid), j_perp);
    }
    auto moved = mesh.locate({p.z, p.rho}, p.face);
    if (!moved) {
      p.alive = false;
      ++census.lost;
      continue;
    }
    p.face = *moved;
    ++census.alive;
  }
  return census;
}

}  // namespace borpic
