#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "borpic/error.hpp"
#include "borpic/mesh.hpp"

namespace borpic {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open mesh file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// whitespace tokenizer that skips '#' comments and tracks line numbers
class Tokens {
 public:
  explicit Tokens(const std::string& text) : in_(text) {}

  bool next(std::string& tok) {
    while (true) {
      while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) {
        if (in_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= in_.size()) return false;
      if (in_[pos_] == '#') {
        while (pos_ < in_.size() && in_[pos_] != '\n') ++pos_;
        continue;
      }
      std::size_t start = pos_;
      while (pos_ < in_.size() && !std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
      tok = in_.substr(start, pos_ - start);
      return true;
    }
  }

  std::string word(const char* what) {
    std::string t;
    if (!next(t)) fail(std::string("unexpected end of file, expected ") + what);
    return t;
  }

  double real(const char* what) {
    std::string t = word(what);
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(std::string("bad ") + what + " '" + t + "'");
    }
  }

  long integer(const char* what) {
    std::string t = word(what);
    try {
      std::size_t used = 0;
      long v = std::stol(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(std::string("bad ") + what + " '" + t + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("line " + std::to_string(line_) + ": " + msg);
  }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Mesh parse_native_mesh(const std::string& text, const MeshOptions& options) {
  Tokens tok(text);
  long nn = tok.integer("node count");
  long ne = tok.integer("edge count");
  long nf = tok.integer("face count");
  if (nn <= 0 || ne < 0 || nf <= 0) tok.fail("counts must be positive");
  std::vector<Point> nodes(static_cast<std::size_t>(nn));
  for (auto& p : nodes) {
    p.z = tok.real("z coordinate");
    p.rho = tok.real("rho coordinate");
  }
  // edges are regenerated; listed ones only have to reference real nodes
  for (long e = 0; e < ne; ++e) {
    long a = tok.integer("edge node");
    long b = tok.integer("edge node");
    if (a < 0 || b < 0 || a >= nn || b >= nn || a == b) tok.fail("bad edge");
  }
  std::vector<std::array<Index, 3>> tris(static_cast<std::size_t>(nf));
  for (auto& t : tris)
    for (auto& n : t) {
      long v = tok.integer("face node");
      if (v < 0 || v >= nn) tok.fail("face node out of range");
      n = static_cast<Index>(v);
    }
  return Mesh::from_triangles(std::move(nodes), std::move(tris), options);
}

Mesh parse_msh2(const std::string& text, const MeshOptions& options) {
  Tokens tok(text);
  std::vector<Point> nodes;
  std::map<long, Index> ids;
  std::vector<std::array<Index, 3>> tris;
  std::string t;
  bool saw_format = false;
  while (tok.next(t)) {
    if (t == "$MeshFormat") {
      std::string version = tok.word("version");
      if (version.empty() || version[0] != '2') tok.fail("only MSH version 2 is supported");
      if (tok.integer("file type") != 0) tok.fail("only ASCII MSH is supported");
      tok.integer("data size");
      if (tok.word("$EndMeshFormat") != "$EndMeshFormat") tok.fail("expected $EndMeshFormat");
      saw_format = true;
    } else if (t == "$Nodes") {
      long n = tok.integer("node count");
      for (long i = 0; i < n; ++i) {
        long id = tok.integer("node id");
        double x = tok.real("x");
        double y = tok.real("y");
        tok.real("z");
        ids[id] = static_cast<Index>(nodes.size());
        nodes.push_back({x, y});
      }
      if (tok.word("$EndNodes") != "$EndNodes") tok.fail("expected $EndNodes");
    } else if (t == "$Elements") {
      long n = tok.integer("element count");
      for (long i = 0; i < n; ++i) {
        tok.integer("element id");
        long type = tok.integer("element type");
        long ntags = tok.integer("tag count");
        for (long j = 0; j < ntags; ++j) tok.integer("tag");
        static const std::map<long, int> node_counts = {
            {1, 2}, {2, 3}, {3, 4}, {4, 4}, {5, 8}, {6, 6}, {7, 5}, {8, 3}, {9, 6}, {15, 1}};
        auto it = node_counts.find(type);
        if (it == node_counts.end()) tok.fail("unsupported element type " + std::to_string(type));
        std::array<Index, 3> tri{};
        for (int j = 0; j < it->second; ++j) {
          long id = tok.integer("element node");
          if (type != 2) continue;
          auto f = ids.find(id);
          if (f == ids.end()) tok.fail("element references unknown node " + std::to_string(id));
          tri[j] = f->second;
        }
        if (type == 2) tris.push_back(tri);
      }
      if (tok.word("$EndElements") != "$EndElements") tok.fail("expected $EndElements");
    } else if (t.size() > 1 && t[0] == '$' && t.rfind("$End", 0) != 0) {
      // skip unknown section
      std::string end = "$End" + t.substr(1);
      std::string w;
      while (tok.next(w) && w != end) {
      }
    }
  }
  if (!saw_format) throw MeshError("missing $MeshFormat section");
  if (tris.empty()) throw MeshError("no triangle elements");
  // drop nodes not used by any triangle (gmsh keeps geometry points)
  std::vector<Index> remap(nodes.size(), -1);
  for (auto& tri : tris)
    for (Index n : tri) remap[n] = 0;
  std::vector<Point> used;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (remap[i] == 0) {
      remap[i] = static_cast<Index>(used.size());
      used.push_back(nodes[i]);
    }
  for (auto& tri : tris)
    for (Index& n : tri) n = remap[n];
  return Mesh::from_triangles(std::move(used), std::move(tris), options);
}

Mesh load_mesh(const std::string& path, MeshFormat format, const MeshOptions& options) {
  std::string text = read_file(path);
  try {
    return format == MeshFormat::native ? parse_native_mesh(text, options)
                                        : parse_msh2(text, options);
  } catch (const MeshError& e) {
    throw MeshError(path + ": " + e.what());
  }
}

void write_native_mesh(const Mesh& mesh, const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error("cannot open " + path + " for writing");
  std::fprintf(f.get(), "%d %d %d\n", mesh.num_nodes(), mesh.num_edges(), mesh.num_faces());
  for (const auto& p : mesh.nodes()) std::fprintf(f.get(), "%.17g %.17g\n", p.z, p.rho);
  for (const auto& e : mesh.edges()) std::fprintf(f.get(), "%d %d\n", e.a, e.b);
  for (const auto& fc : mesh.faces())
    std::fprintf(f.get(), "%d %d %d\n", fc.nodes[0], fc.nodes[1], fc.nodes[2]);
}

Mesh make_rectangle_mesh(const RectangleSpec& spec, const MeshOptions& options) {
  if (spec.nz < 1) throw MeshError("rectangle mesh needs nz >= 1");
  std::vector<double> rows = spec.rho_lines;
  if (rows.empty()) {
    if (spec.nrho < 1) throw MeshError("rectangle mesh needs nrho >= 1");
    for (int j = 0; j <= spec.nrho; ++j)
      rows.push_back(j == spec.nrho ? spec.rho_max
                                    : spec.rho_min + (spec.rho_max - spec.rho_min) * j / spec.nrho);
  }
  if (rows.size() < 2 || !std::is_sorted(rows.begin(), rows.end()) ||
      std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw MeshError("rho lines must be strictly increasing");
  const int nz = spec.nz;
  const int nr = static_cast<int>(rows.size()) - 1;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(nz + 1) * (nr + 1));
  const double dz = (spec.z_max - spec.z_min) / nz;
  for (int j = 0; j <= nr; ++j)
    for (int i = 0; i <= nz; ++i) {
      Point p{i == nz ? spec.z_max : spec.z_min + dz * i, rows[j]};
      if (spec.jitter > 0.0 && i > 0 && i < nz && j > 0 && j < nr) {
        double dr = std::min(rows[j] - rows[j - 1], rows[j + 1] - rows[j]);
        p.z += spec.jitter * dz * unit(rng);
        p.rho += spec.jitter * dr * unit(rng);
      }
      nodes.push_back(p);
    }
  auto id = [&](int i, int j) { return static_cast<Index>(j * (nz + 1) + i); };
  std::bernoulli_distribution coin(0.5);
  std::vector<std::array<Index, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2) * nz * nr);
  for (int j = 0; j < nr; ++j)
    for (int i = 0; i < nz; ++i) {
      Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      bool diag = spec.random_diagonals ? coin(rng) : ((i + j) % 2 == 0);
      if (diag) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return Mesh::from_triangles(std::move(nodes), std::move(tris), options);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> nodes(mesh.nodes().begin(), mesh.nodes().end());
  std::vector<Index> mid(mesh.num_edges());
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edge(e);
    const Point& a = mesh.node(ed.a);
    const Point& b = mesh.node(ed.b);
    mid[e] = static_cast<Index>(nodes.size());
    nodes.push_back({0.5 * (a.z + b.z), 0.5 * (a.rho + b.rho)});
  }
  std::vector<std::array<Index, 3>> tris;
  tris.reserve(static_cast<std::size_t>(mesh.num_faces()) * 4);
  for (const auto& f : mesh.faces()) {
    Index m0 = mid[f.edges[0]], m1 = mid[f.edges[1]], m2 = mid[f.edges[2]];
    tris.push_back({f.nodes[0], m0, m2});
    tris.push_back({m0, f.nodes[1], m1});
    tris.push_back({m2, m1, f.nodes[2]});
    tris.push_back({m0, m1, m2});
  }
  return Mesh::from_triangles(std::move(nodes), std::move(tris), mesh.options());
}

}  // namespace borpic
