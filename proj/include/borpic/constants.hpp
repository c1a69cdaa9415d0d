#pragma once

#include <cmath>
#include <numbers>

namespace borpic {

inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double mu0 = 1.25663706212e-6;
inline const double c_light = 1.0 / std::sqrt(eps0 * mu0);
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double electron_mass = 9.1093837015e-31;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// entities closer than this to rho = 0 are axis entities
inline constexpr double axis_tolerance = 1e-9;

}  // namespace borpic
