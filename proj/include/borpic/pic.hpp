#pragma once

#include <optional>
#include <span>
#include <vector>

#include "borpic/field_solver.hpp"
#include "borpic/geometry.hpp"
#include "borpic/mesh.hpp"

namespace borpic {

// A charge ring about the z axis.
struct Particle {
  double z = 0, rho = 0;
  double v_z = 0, v_rho = 0, v_phi = 0;
  double charge = 0;  // total ring charge
  double mass = 0;
  Index face = -1;
  bool alive = true;
};

// Separable shape P(z) P(rho) with P(u) = (1 - (u/H)^2)^m / alpha on |u| < H,
// H = alpha h_m. h_m makes P integrate to one.
struct ShapeFunction {
  int order = 2;
  double alpha = 0.03;  // meters
  bool renormalize_axis = false;

  static constexpr double h_table[4] = {0.5, 0.75, 0.9375, 1.09375};

  double half_width() const { return alpha * h_table[order]; }
  double value(double u) const;
  // integral of P from -H to u
  double cumulative(double u) const;
};

// Integral of the shape centered at `center` over the triangle, exact for
// the polynomial integrand.
double shape_integral_over_triangle(const ShapeFunction& shape, Point center,
                                    const std::array<Point, 3>& tri);

struct Gathered {
  Vec3 e;
  Vec3 b;
};

Gathered gather(const Mesh& mesh, const FieldState& s, const MaterialMap& materials,
                const Particle& p, Vec3 external_b = {});

// v^{n+1/2} = N^{-1}(N^T v^{n-1/2} + s E), s = Q dt / m, N = I - (s/2)[B x]
Vec3 push_velocity(Vec3 v, Vec3 e, Vec3 b, double charge, double mass, double dt);

struct Segment {
  Point from;
  Point to;
};

struct Domain {
  double z_min = 0, z_max = 1;
  bool periodic_z = true;
  double rho_outer = 1;  // particles beyond this are lost
  std::optional<double> reflector;
};

Domain domain_of(const Mesh& mesh, std::optional<double> reflector);

// Moves the particle by dt * (v_z, v_rho), applying periodic wrap, the
// reflector and axis reflection. Returns the straight sub-paths inside the
// domain; the particle is marked dead when it leaves.
std::vector<Segment> push_position(Particle& p, double dt, const Domain& domain);

// j[edge] += weight / dt * integral of the edge 1-form along each piece
void scatter_te(const Mesh& mesh, std::span<const Segment> path, double weight, double dt,
                std::span<double> j_par, std::optional<Index> hint = std::nullopt);

// j[face] += weight * v_phi * integral of S over the face, the face flux of J_phi
void scatter_tm(const Mesh& mesh, const ShapeFunction& shape, Point midpoint, double v_phi,
                double weight, std::span<double> j_perp);

struct PicOptions {
  ShapeFunction shape;
  std::optional<double> reflector;
  Vec3 external_b;
};

struct ParticleCensus {
  std::size_t alive = 0;
  std::size_t lost = 0;
};

// Gather, push and deposit for every live particle. Expects magnetic fields
// already advanced to n + 1/2. Deposits carry the 1/(2 pi) ring factors.
ParticleCensus advance_particles(const Mesh& mesh, const FieldState& s,
                                 const MaterialMap& materials, std::vector<Particle>& particles,
                                 const PicOptions& options, double dt, std::span<double> j_par,
                                 std::span<double> j_perp);

}  // namespace borpic
