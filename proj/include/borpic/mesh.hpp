#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "borpic/geometry.hpp"
#include "borpic/sparse.hpp"

namespace borpic {

enum BoundaryTag : std::uint8_t {
  tag_interior = 0,
  tag_axis = 1,
  tag_periodic_left = 2,
  tag_periodic_right = 4,
  tag_outer = 8,
};

// directed from lower to higher node index
struct Edge {
  Index a;
  Index b;
};

// CCW nodes; local edge l joins nodes[l] -> nodes[(l+1)%3] and sign[l] is +1
// when that traversal agrees with the global edge direction.
struct Face {
  std::array<Index, 3> nodes;
  std::array<Index, 3> edges;
  std::array<std::int8_t, 3> signs;
};

struct MeshOptions {
  bool periodic_z = false;
  double tolerance = 1e-9;
};

// Signed alias of a right-boundary entity onto its left-boundary twin.
struct PeriodicAlias {
  Index target = -1;
  std::int8_t sign = 1;
};

struct PathPiece {
  Index face;
  double t0;
  double t1;
};

class Mesh {
 public:
  static Mesh from_triangles(std::vector<Point> nodes, std::vector<std::array<Index, 3>> triangles,
                             const MeshOptions& options = {});

  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  Index num_faces() const { return static_cast<Index>(faces_.size()); }

  std::span<const Point> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Face> faces() const { return faces_; }
  const Point& node(Index i) const { return nodes_[i]; }
  const Edge& edge(Index i) const { return edges_[i]; }
  const Face& face(Index k) const { return faces_[k]; }

  double area(Index k) const { return areas_[k]; }
  Point centroid(Index k) const { return centroids_[k]; }
  // gradients of the three barycentric coordinates, constant on the face
  const std::array<Vec2, 3>& grad_lambda(Index k) const { return grads_[k]; }
  // faces adjacent to an edge; second is -1 on the boundary
  std::array<Index, 2> edge_faces(Index e) const { return edge_faces_[e]; }
  // face across local edge l of face k, or -1
  Index neighbor(Index k, int l) const;

  std::uint8_t edge_tags(Index e) const { return edge_tags_[e]; }
  std::uint8_t node_tags(Index n) const { return node_tags_[n]; }

  bool periodic() const { return options_.periodic_z; }
  PeriodicAlias edge_alias(Index e) const { return edge_alias_[e]; }
  PeriodicAlias node_alias(Index n) const { return node_alias_[n]; }
  std::size_t periodic_pair_count() const;

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  double rho_max() const { return rho_max_; }
  double tolerance() const { return options_.tolerance; }
  const MeshOptions& options() const { return options_; }

  std::array<double, 3> barycentric(Index k, Point p) const;
  bool contains(Index k, Point p, double tol = 1e-12) const;

  // Barycentric walk from the hint, falling back to the bucket index.
  // nullopt means the point lies outside the mesh.
  std::optional<Index> locate(Point p, std::optional<Index> hint = std::nullopt) const;

  // Faces whose bounding boxes meet the given box.
  std::vector<Index> faces_in_box(double z0, double z1, double rho0, double rho1) const;

  // Split p0 -> p1 at face crossings. p0 must lie in `start`. Throws if the
  // segment leaves the mesh.
  std::vector<PathPiece> split_segment(Index start, Point p0, Point p1) const;

  double min_edge_length() const;
  double max_edge_length() const;

 private:
  void build_topology();
  void build_geometry();
  void build_tags();
  void build_periodic();
  void build_buckets();
  std::optional<Index> locate_bucket(Point p) const;
  std::array<Index, 2> bucket_of(Point p) const;

  MeshOptions options_;
  std::vector<Point> nodes_;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  std::vector<double> areas_;
  std::vector<Point> centroids_;
  std::vector<std::array<Vec2, 3>> grads_;
  std::vector<std::array<Index, 2>> edge_faces_;
  std::vector<std::uint8_t> edge_tags_;
  std::vector<std::uint8_t> node_tags_;
  std::vector<PeriodicAlias> edge_alias_;
  std::vector<PeriodicAlias> node_alias_;
  double z_min_ = 0, z_max_ = 0, rho_min_ = 0, rho_max_ = 0;

  Index buckets_z_ = 1, buckets_rho_ = 1;
  double bucket_dz_ = 1, bucket_drho_ = 1;
  std::vector<Index> bucket_start_;
  std::vector<Index> bucket_faces_;
};

enum class MeshFormat { native, msh2 };

Mesh load_mesh(const std::string& path, MeshFormat format, const MeshOptions& options = {});
Mesh parse_native_mesh(const std::string& text, const MeshOptions& options = {});
Mesh parse_msh2(const std::string& text, const MeshOptions& options = {});
void write_native_mesh(const Mesh& mesh, const std::string& path);

struct RectangleSpec {
  double z_min = 0.0;
  double z_max = 1.0;
  double rho_min = 0.0;
  double rho_max = 1.0;
  int nz = 10;
  int nrho = 10;
  // explicit row coordinates override rho_min/rho_max/nrho when non-empty
  std::vector<double> rho_lines;
  // interior node displacement as a fraction of the local spacing
  double jitter = 0.0;
  bool random_diagonals = false;
  std::uint64_t seed = 1;
};

Mesh make_rectangle_mesh(const RectangleSpec& spec, const MeshOptions& options = {});

// Each triangle split into four through edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

struct IncidenceMatrices {
  IntMatrix curl;  // faces x edges
  IntMatrix grad;  // edges x nodes
};

IncidenceMatrices build_incidence(const Mesh& mesh);

struct WhitneyValues {
  std::array<double, 3> lambda;
  // 1-forms of the face's local edges, in global edge direction
  std::array<Vec2, 3> w1;
  double w2;
};

// Throws when the point is outside the face beyond 1e-12 in barycentric terms.
WhitneyValues whitney_eval(const Mesh& mesh, Index face, Point p);

// Exact integral of the 1-form of edge (a -> b) along the straight segment
// q0 -> q1, from barycentric coordinates of the endpoints.
inline double whitney_segment_integral(double la0, double lb0, double la1, double lb1) {
  return la0 * lb1 - lb0 * la1;
}

}  // namespace borpic
