#include "borpic/sources.hpp"

#include <algorithm>
#include <cmath>

#include "borpic/error.hpp"

namespace borpic {

namespace {

constexpr double on_edge_tol = 1e-9;
constexpr double clip_tol = 1e-12;

// parameter range of p0 + t (p1 - p0) inside the triangle, if any
std::optional<std::array<double, 2>> clip(const Mesh& mesh, Index k, Point p0, Point p1) {
  auto l0 = mesh.barycentric(k, p0);
  auto l1 = mesh.barycentric(k, p1);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 3; ++i) {
    double a = l0[i], d = l1[i] - l0[i];
    if (std::abs(d) < 1e-300) {
      if (a < -clip_tol) return std::nullopt;
      continue;
    }
    double t = (-clip_tol - a) / d;
    if (d > 0)
      lo = std::max(lo, t);
    else
      hi = std::min(hi, t);
  }
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (hi - lo <= 1e-12) return std::nullopt;
  return std::array<double, 2>{lo, hi};
}

}  // namespace

ImpressedCurrent::ImpressedCurrent(const Mesh& mesh, const SourceConfig& source) : source_(source) {
  const bool axial = source.kind == SourceKind::axial;
  pattern_.assign(axial ? mesh.num_edges() : mesh.num_faces(), 0.0);
  const Point p0{source.center_z - 0.5 * source.height, source.radius};
  const Point p1{source.center_z + 0.5 * source.height, source.radius};
  auto candidates = mesh.faces_in_box(p0.z, p1.z, source.radius - 1e-9, source.radius + 1e-9);

  // split the trace at every face crossing so the pieces partition it
  std::vector<double> breaks{0.0, 1.0};
  for (Index k : candidates)
    if (auto range = clip(mesh, k, p0, p1)) {
      breaks.push_back((*range)[0]);
      breaks.push_back((*range)[1]);
    }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  for (double t : breaks)
    if (cuts.empty() || t - cuts.back() > 1e-12) cuts.push_back(t);
  cuts.back() = 1.0;

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double ta = cuts[i], tb = cuts[i + 1];
    const Point mid = lerp(p0, p1, 0.5 * (ta + tb));
    std::vector<Index> owners;
    for (Index k : candidates) {
      auto l = mesh.barycentric(k, mid);
      if (l[0] >= -on_edge_tol && l[1] >= -on_edge_tol && l[2] >= -on_edge_tol) owners.push_back(k);
    }
    if (owners.empty()) continue;
    // a piece on an interior edge is shared by its two faces
    const double weight = 1.0 / static_cast<double>(owners.size());
    const Point q0 = lerp(p0, p1, ta), q1 = lerp(p0, p1, tb);
    for (Index k : owners) {
      if (axial) {
        auto l0 = mesh.barycentric(k, q0);
        auto l1 = mesh.barycentric(k, q1);
        const Face& f = mesh.face(k);
        for (int l = 0; l < 3; ++l) {
          int a = l, b = (l + 1) % 3;
          double w = whitney_segment_integral(l0[a], l0[b], l1[a], l1[b]);
          pattern_[f.edges[l]] += weight * source.radius * f.signs[l] * w;
        }
      } else {
        pattern_[k] += weight * source.height * (tb - ta);
      }
    }
  }
  for (Index i = 0; i < static_cast<Index>(pattern_.size()); ++i)
    if (pattern_[i] != 0.0) support_.push_back(i);
  if (support_.empty())
    throw ConfigError("source trace at rho = " + std::to_string(source.radius) +
                      " meets no mesh " + (axial ? "edge" : "face"));
}

void ImpressedCurrent::add(double t, std::span<double> j_par, std::span<double> j_perp) const {
  const double k = amplitude(t);
  if (k == 0.0) return;
  std::span<double> target = source_.kind == SourceKind::axial ? j_par : j_perp;
  if (target.empty()) return;
  for (Index i : support_) target[i] += k * pattern_[i];
}

}  // namespace borpic
