#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace borpic {

using Index = std::int32_t;

// meridian-plane point; z plays the role of the first Cartesian axis
struct Point {
  double z = 0.0;
  double rho = 0.0;
};

struct Vec2 {
  double z = 0.0;
  double rho = 0.0;
};

inline Vec2 operator-(Point a, Point b) { return {a.z - b.z, a.rho - b.rho}; }
inline Point operator+(Point a, Vec2 d) { return {a.z + d.z, a.rho + d.rho}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.z, s * v.rho}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.z + b.z, a.rho + b.rho}; }
inline double dot(Vec2 a, Vec2 b) { return a.z * b.z + a.rho * b.rho; }
inline double cross(Vec2 a, Vec2 b) { return a.z * b.rho - a.rho * b.z; }
inline double norm(Vec2 v) { return std::hypot(v.z, v.rho); }

inline Point lerp(Point a, Point b, double t) {
  return {a.z + t * (b.z - a.z), a.rho + t * (b.rho - a.rho)};
}

// ordering (z, rho, phi) is right handed: z x rho = phi
struct Vec3 {
  double z = 0.0;
  double rho = 0.0;
  double phi = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.z + b.z, a.rho + b.rho, a.phi + b.phi}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.z, s * v.rho, s * v.phi}; }
inline double norm(Vec3 v) { return std::sqrt(v.z * v.z + v.rho * v.rho + v.phi * v.phi); }

}  // namespace borpic
