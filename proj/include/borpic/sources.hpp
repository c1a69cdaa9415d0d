#pragma once

#include <span>
#include <vector>

#include "borpic/mesh.hpp"
#include "borpic/run_config.hpp"

namespace borpic {

// Per-unit-K load of a cylinder surface current on the mesh. Axial sources
// load edges (rho-weighted Galerkin integral along the trace), azimuthal
// sources load faces (face flux: trace length inside each face). A trace
// lying on an interior edge is shared half and half by its two faces.
class ImpressedCurrent {
 public:
  // throws ConfigError when the trace meets no mesh entity
  ImpressedCurrent(const Mesh& mesh, const SourceConfig& source);

  SourceKind kind() const { return source_.kind; }
  const SourceConfig& source() const { return source_; }
  // mesh-edge pattern for axial sources, face pattern for azimuthal ones
  std::span<const double> pattern() const { return pattern_; }
  std::span<const Index> support() const { return support_; }

  double amplitude(double t) const { return source_.amplitude * source_.pulse.value(t); }
  // j_par or j_perp += K(t) * pattern; nothing outside the pulse support
  void add(double t, std::span<double> j_par, std::span<double> j_perp) const;

 private:
  SourceConfig source_;
  std::vector<double> pattern_;
  std::vector<Index> support_;
};

}  // namespace borpic
