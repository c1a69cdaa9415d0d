#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "borpic/mesh.hpp"

namespace borpic::testing {

// 2x2 squares, 8 triangles, touching the axis
inline Mesh tiny_mesh() {
  RectangleSpec s;
  s.nz = 2;
  s.nrho = 2;
  return make_rectangle_mesh(s);
}

// 10x10 squares, 200 triangles
inline Mesh small_mesh(bool periodic = false) {
  RectangleSpec s;
  s.nz = 10;
  s.nrho = 10;
  MeshOptions o;
  o.periodic_z = periodic;
  return make_rectangle_mesh(s, o);
}

inline Mesh irregular_mesh(int nz, int nrho, std::uint64_t seed, bool periodic = false,
                           double rho_min = 0.0) {
  RectangleSpec s;
  s.nz = nz;
  s.nrho = nrho;
  s.rho_min = rho_min;
  s.jitter = 0.25;
  s.random_diagonals = true;
  s.seed = seed;
  MeshOptions o;
  o.periodic_z = periodic;
  return make_rectangle_mesh(s, o);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double rel_diff(double a, double b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace borpic::testing
