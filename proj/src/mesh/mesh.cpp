#include "borpic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "borpic/error.hpp"

namespace borpic {

namespace {

double signed_double_area(Point a, Point b, Point c) { return cross(b - a, c - a); }

}  // namespace

Mesh Mesh::from_triangles(std::vector<Point> nodes, std::vector<std::array<Index, 3>> triangles,
                          const MeshOptions& options) {
  Mesh m;
  m.options_ = options;
  for (auto& p : nodes) {
    if (p.rho < -1e-12) throw MeshError("node with negative rho " + std::to_string(p.rho));
    if (p.rho < 0.0) p.rho = 0.0;
  }
  m.nodes_ = std::move(nodes);
  m.faces_.resize(triangles.size());
  for (std::size_t k = 0; k < triangles.size(); ++k) {
    auto t = triangles[k];
    for (Index n : t)
      if (n < 0 || n >= m.num_nodes()) throw MeshError("face references missing node");
    double a2 = signed_double_area(m.nodes_[t[0]], m.nodes_[t[1]], m.nodes_[t[2]]);
    if (a2 == 0.0) throw MeshError("zero-area face " + std::to_string(k));
    if (a2 < 0.0) std::swap(t[1], t[2]);
    m.faces_[k].nodes = t;
  }
  if (m.faces_.empty()) throw MeshError("mesh has no faces");
  m.build_topology();
  m.build_geometry();
  m.build_tags();
  m.build_periodic();
  m.build_buckets();
  return m;
}

void Mesh::build_topology() {
  std::vector<Edge> all;
  all.reserve(faces_.size() * 3);
  for (const auto& f : faces_)
    for (int l = 0; l < 3; ++l) {
      Index a = f.nodes[l], b = f.nodes[(l + 1) % 3];
      all.push_back({std::min(a, b), std::max(a, b)});
    }
  auto less = [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; };
  std::sort(all.begin(), all.end(), less);
  all.erase(std::unique(all.begin(), all.end(),
                        [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
            all.end());
  edges_ = std::move(all);
  edge_faces_.assign(edges_.size(), {-1, -1});
  for (Index k = 0; k < num_faces(); ++k) {
    auto& f = faces_[k];
    for (int l = 0; l < 3; ++l) {
      Index a = f.nodes[l], b = f.nodes[(l + 1) % 3];
      Edge key{std::min(a, b), std::max(a, b)};
      auto it = std::lower_bound(edges_.begin(), edges_.end(), key, less);
      Index e = static_cast<Index>(it - edges_.begin());
      f.edges[l] = e;
      f.signs[l] = a < b ? 1 : -1;
      auto& adj = edge_faces_[e];
      if (adj[0] < 0)
        adj[0] = k;
      else if (adj[1] < 0)
        adj[1] = k;
      else
        throw MeshError("non-manifold edge (" + std::to_string(key.a) + ", " +
                        std::to_string(key.b) + ")");
    }
  }
}

void Mesh::build_geometry() {
  areas_.resize(faces_.size());
  centroids_.resize(faces_.size());
  grads_.resize(faces_.size());
  for (Index k = 0; k < num_faces(); ++k) {
    const auto& n = faces_[k].nodes;
    Point p[3] = {nodes_[n[0]], nodes_[n[1]], nodes_[n[2]]};
    double a2 = signed_double_area(p[0], p[1], p[2]);
    areas_[k] = 0.5 * a2;
    centroids_[k] = {(p[0].z + p[1].z + p[2].z) / 3.0, (p[0].rho + p[1].rho + p[2].rho) / 3.0};
    for (int i = 0; i < 3; ++i) {
      Vec2 opp = p[(i + 2) % 3] - p[(i + 1) % 3];
      grads_[k][i] = {-opp.rho / a2, opp.z / a2};
    }
  }
  z_min_ = rho_min_ = std::numeric_limits<double>::infinity();
  z_max_ = rho_max_ = -std::numeric_limits<double>::infinity();
  for (const auto& p : nodes_) {
    z_min_ = std::min(z_min_, p.z);
    z_max_ = std::max(z_max_, p.z);
    rho_min_ = std::min(rho_min_, p.rho);
    rho_max_ = std::max(rho_max_, p.rho);
  }
}

void Mesh::build_tags() {
  const double tol = options_.tolerance;
  node_tags_.assign(nodes_.size(), tag_interior);
  for (Index i = 0; i < num_nodes(); ++i) {
    const auto& p = nodes_[i];
    if (p.rho < tol) node_tags_[i] |= tag_axis;
    if (std::abs(p.z - z_min_) < tol) node_tags_[i] |= tag_periodic_left;
    if (std::abs(p.z - z_max_) < tol) node_tags_[i] |= tag_periodic_right;
  }
  edge_tags_.assign(edges_.size(), tag_interior);
  for (Index e = 0; e < num_edges(); ++e) {
    if (edge_faces_[e][1] >= 0) continue;
    std::uint8_t common = node_tags_[edges_[e].a] & node_tags_[edges_[e].b];
    std::uint8_t t = common & (tag_axis | tag_periodic_left | tag_periodic_right);
    if (t == tag_interior) {
      t = tag_outer;
      node_tags_[edges_[e].a] |= tag_outer;
      node_tags_[edges_[e].b] |= tag_outer;
    }
    edge_tags_[e] = t;
  }
}

void Mesh::build_periodic() {
  edge_alias_.assign(edges_.size(), {});
  node_alias_.assign(nodes_.size(), {});
  if (!options_.periodic_z) return;
  const double tol = options_.tolerance;
  std::vector<Index> left, right;
  for (Index i = 0; i < num_nodes(); ++i) {
    if (node_tags_[i] & tag_periodic_left) left.push_back(i);
    if (node_tags_[i] & tag_periodic_right) right.push_back(i);
  }
  auto by_rho = [&](Index a, Index b) { return nodes_[a].rho < nodes_[b].rho; };
  std::sort(left.begin(), left.end(), by_rho);
  std::sort(right.begin(), right.end(), by_rho);
  if (left.size() != right.size())
    throw MeshError("unmatched periodic node: " + std::to_string(left.size()) + " left vs " +
                    std::to_string(right.size()) + " right");
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (std::abs(nodes_[left[i]].rho - nodes_[right[i]].rho) > tol)
      throw MeshError("unmatched periodic node at rho = " + std::to_string(nodes_[right[i]].rho));
    node_alias_[right[i]] = {left[i], 1};
  }
  auto less = [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; };
  for (Index e = 0; e < num_edges(); ++e) {
    if (!(edge_tags_[e] & tag_periodic_right)) continue;
    Index pa = node_alias_[edges_[e].a].target;
    Index pb = node_alias_[edges_[e].b].target;
    Edge key{std::min(pa, pb), std::max(pa, pb)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key, less);
    if (it == edges_.end() || it->a != key.a || it->b != key.b)
      throw MeshError("right boundary edge has no left twin");
    edge_alias_[e] = {static_cast<Index>(it - edges_.begin()),
                      static_cast<std::int8_t>(pa < pb ? 1 : -1)};
  }
}

std::size_t Mesh::periodic_pair_count() const {
  return static_cast<std::size_t>(std::count_if(edge_alias_.begin(), edge_alias_.end(),
                                                [](const PeriodicAlias& a) { return a.target >= 0; }));
}

Index Mesh::neighbor(Index k, int l) const {
  const auto& adj = edge_faces_[faces_[k].edges[l]];
  return adj[0] == k ? adj[1] : adj[0];
}

std::array<double, 3> Mesh::barycentric(Index k, Point p) const {
  const auto& n = faces_[k].nodes;
  const double a2 = 2.0 * areas_[k];
  std::array<double, 3> lam;
  for (int i = 0; i < 3; ++i) {
    const Point& q1 = nodes_[n[(i + 1) % 3]];
    const Point& q2 = nodes_[n[(i + 2) % 3]];
    lam[i] = cross(q2 - q1, p - q1) / a2;
  }
  return lam;
}

bool Mesh::contains(Index k, Point p, double tol) const {
  auto lam = barycentric(k, p);
  return lam[0] >= -tol && lam[1] >= -tol && lam[2] >= -tol;
}

std::optional<Index> Mesh::locate(Point p, std::optional<Index> hint) const {
  if (hint && *hint >= 0 && *hint < num_faces()) {
    Index k = *hint;
    const Index limit = 2 * num_faces();
    for (Index step = 0; step < limit; ++step) {
      auto lam = barycentric(k, p);
      int worst = 0;
      for (int i = 1; i < 3; ++i)
        if (lam[i] < lam[worst]) worst = i;
      if (lam[worst] >= -1e-12) return k;
      Index next = neighbor(k, (worst + 1) % 3);
      if (next < 0) break;
      k = next;
    }
  }
  return locate_bucket(p);
}

std::array<Index, 2> Mesh::bucket_of(Point p) const {
  auto iz = static_cast<Index>(std::floor((p.z - z_min_) / bucket_dz_));
  auto ir = static_cast<Index>(std::floor((p.rho - rho_min_) / bucket_drho_));
  return {std::clamp<Index>(iz, 0, buckets_z_ - 1), std::clamp<Index>(ir, 0, buckets_rho_ - 1)};
}

std::optional<Index> Mesh::locate_bucket(Point p) const {
  const double pad = options_.tolerance;
  if (p.z < z_min_ - pad || p.z > z_max_ + pad || p.rho < rho_min_ - pad || p.rho > rho_max_ + pad)
    return std::nullopt;
  auto [iz, ir] = bucket_of(p);
  Index b = iz * buckets_rho_ + ir;
  Index best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  for (Index s = bucket_start_[b]; s < bucket_start_[b + 1]; ++s) {
    Index k = bucket_faces_[s];
    auto lam = barycentric(k, p);
    double mn = std::min({lam[0], lam[1], lam[2]});
    if (mn >= 0.0) return k;
    if (mn > best_min) {
      best_min = mn;
      best = k;
    }
  }
  if (best >= 0 && best_min >= -1e-12) return best;
  return std::nullopt;
}

void Mesh::build_buckets() {
  double wz = std::max(z_max_ - z_min_, 1e-30);
  double wr = std::max(rho_max_ - rho_min_, 1e-30);
  double target = std::max(1.0, std::sqrt(static_cast<double>(faces_.size()) / 2.0));
  double scale = std::sqrt(wz / wr);
  buckets_z_ = std::max<Index>(1, static_cast<Index>(std::ceil(target * scale)));
  buckets_rho_ = std::max<Index>(1, static_cast<Index>(std::ceil(target / scale)));
  bucket_dz_ = wz / buckets_z_;
  bucket_drho_ = wr / buckets_rho_;
  std::vector<std::vector<Index>> lists(static_cast<std::size_t>(buckets_z_) * buckets_rho_);
  const double pad = options_.tolerance;
  for (Index k = 0; k < num_faces(); ++k) {
    const auto& n = faces_[k].nodes;
    double z0 = std::min({nodes_[n[0]].z, nodes_[n[1]].z, nodes_[n[2]].z}) - pad;
    double z1 = std::max({nodes_[n[0]].z, nodes_[n[1]].z, nodes_[n[2]].z}) + pad;
    double r0 = std::min({nodes_[n[0]].rho, nodes_[n[1]].rho, nodes_[n[2]].rho}) - pad;
    double r1 = std::max({nodes_[n[0]].rho, nodes_[n[1]].rho, nodes_[n[2]].rho}) + pad;
    auto lo = bucket_of({z0, r0});
    auto hi = bucket_of({z1, r1});
    for (Index iz = lo[0]; iz <= hi[0]; ++iz)
      for (Index ir = lo[1]; ir <= hi[1]; ++ir) lists[iz * buckets_rho_ + ir].push_back(k);
  }
  bucket_start_.assign(lists.size() + 1, 0);
  bucket_faces_.clear();
  for (std::size_t b = 0; b < lists.size(); ++b) {
    bucket_faces_.insert(bucket_faces_.end(), lists[b].begin(), lists[b].end());
    bucket_start_[b + 1] = static_cast<Index>(bucket_faces_.size());
  }
}

std::vector<Index> Mesh::faces_in_box(double z0, double z1, double rho0, double rho1) const {
  auto lo = bucket_of({z0, rho0});
  auto hi = bucket_of({z1, rho1});
  std::vector<Index> out;
  for (Index iz = lo[0]; iz <= hi[0]; ++iz)
    for (Index ir = lo[1]; ir <= hi[1]; ++ir) {
      Index b = iz * buckets_rho_ + ir;
      for (Index s = bucket_start_[b]; s < bucket_start_[b + 1]; ++s) {
        Index k = bucket_faces_[s];
        const auto& n = faces_[k].nodes;
        double fz0 = std::min({nodes_[n[0]].z, nodes_[n[1]].z, nodes_[n[2]].z});
        double fz1 = std::max({nodes_[n[0]].z, nodes_[n[1]].z, nodes_[n[2]].z});
        double fr0 = std::min({nodes_[n[0]].rho, nodes_[n[1]].rho, nodes_[n[2]].rho});
        double fr1 = std::max({nodes_[n[0]].rho, nodes_[n[1]].rho, nodes_[n[2]].rho});
        if (fz1 < z0 || fz0 > z1 || fr1 < rho0 || fr0 > rho1) continue;
        out.push_back(k);
      }
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PathPiece> Mesh::split_segment(Index start, Point p0, Point p1) const {
  std::vector<PathPiece> pieces;
  Index k = start;
  double t = 0.0;
  int stalls = 0;
  const Index limit = 4 * num_faces() + 16;
  for (Index iter = 0; iter < limit; ++iter) {
    auto l0 = barycentric(k, p0);
    auto l1 = barycentric(k, p1);
    double t_exit = 1.0;
    int exit_node = -1;
    for (int i = 0; i < 3; ++i) {
      if (!(l1[i] < l0[i])) continue;
      double ti = l0[i] / (l0[i] - l1[i]);
      if (ti < t - 1e-13) continue;
      ti = std::max(ti, t);
      if (ti < t_exit) {
        t_exit = ti;
        exit_node = i;
      }
    }
    if (exit_node < 0 || t_exit >= 1.0) {
      if (t < 1.0) pieces.push_back({k, t, 1.0});
      return pieces;
    }
    if (t_exit > t) {
      pieces.push_back({k, t, t_exit});
      stalls = 0;
    } else if (++stalls > 32) {
      // circling a vertex; step slightly forward and relocate
      double tn = std::min(1.0, t + 1e-9);
      auto found = locate(lerp(p0, p1, tn), k);
      if (!found) throw MeshError("segment leaves the mesh");
      k = *found;
      stalls = 0;
      continue;
    }
    Index next = neighbor(k, (exit_node + 1) % 3);
    if (next < 0) {
      if (1.0 - t_exit < 1e-12) {
        pieces.push_back({k, t_exit, 1.0});
        return pieces;
      }
      throw MeshError("segment leaves the mesh");
    }
    k = next;
    t = t_exit;
  }
  throw MeshError("segment walk did not terminate");
}

double Mesh::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges_) m = std::min(m, norm(nodes_[e.b] - nodes_[e.a]));
  return m;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, norm(nodes_[e.b] - nodes_[e.a]));
  return m;
}

IncidenceMatrices build_incidence(const Mesh& mesh) {
  std::vector<Triplet<int>> c, g;
  c.reserve(static_cast<std::size_t>(mesh.num_faces()) * 3);
  for (Index k = 0; k < mesh.num_faces(); ++k) {
    const auto& f = mesh.face(k);
    for (int l = 0; l < 3; ++l) c.push_back({k, f.edges[l], f.signs[l]});
  }
  g.reserve(static_cast<std::size_t>(mesh.num_edges()) * 2);
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    g.push_back({e, mesh.edge(e).a, -1});
    g.push_back({e, mesh.edge(e).b, 1});
  }
  return {IntMatrix::from_triplets(mesh.num_faces(), mesh.num_edges(), std::move(c)),
          IntMatrix::from_triplets(mesh.num_edges(), mesh.num_nodes(), std::move(g))};
}

WhitneyValues whitney_eval(const Mesh& mesh, Index face, Point p) {
  auto lam = mesh.barycentric(face, p);
  for (double l : lam)
    if (l < -1e-12 || l > 1.0 + 1e-12) throw MeshError("point outside face");
  const auto& grad = mesh.grad_lambda(face);
  WhitneyValues w;
  w.lambda = lam;
  for (int l = 0; l < 3; ++l) {
    int i = l, j = (l + 1) % 3;
    if (mesh.face(face).signs[l] < 0) std::swap(i, j);
    w.w1[l] = lam[i] * grad[j] + (-lam[j]) * grad[i];
  }
  w.w2 = 1.0 / mesh.area(face);
  return w;
}

}  // namespace borpic
