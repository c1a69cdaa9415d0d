#include "borpic/output.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "borpic/error.hpp"

namespace borpic {

namespace {

using File = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

File open_for_write(const std::string& path) {
  File f(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) throw Error("cannot write " + path + ": " + std::strerror(errno));
  return f;
}

void close_checked(File& f, const std::string& path) {
  std::FILE* raw = f.release();
  bool bad = std::ferror(raw) != 0;
  if (std::fclose(raw) != 0 || bad) throw Error("error writing " + path);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw Error("no column named " + name);
}

void write_csv(const std::string& path, const CsvTable& table) {
  File f = open_for_write(path);
  for (std::size_t c = 0; c < table.header.size(); ++c)
    std::fprintf(f.get(), c ? ",%s" : "%s", table.header[c].c_str());
  std::fputc('\n', f.get());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) std::fprintf(f.get(), c ? ",%.17g" : "%.17g", row[c]);
    std::fputc('\n', f.get());
  }
  close_checked(f, path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  t.header = split(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw Error(path + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        throw Error(path + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<SnapshotRow> snapshot_rows(const Mesh& mesh, const FieldState& state,
                                       const MaterialMap& materials) {
  std::vector<SnapshotRow> rows(mesh.num_faces());
  for (Index k = 0; k < mesh.num_faces(); ++k) {
    Point c = mesh.centroid(k);
    PhysicalField f = eval_in_face(mesh, state, materials, k, c);
    const Material& m = materials[k];
    auto& r = rows[k];
    r.face = k;
    r.z = c.z;
    r.rho = c.rho;
    r.e_par = std::hypot(f.e_z, f.e_rho);
    r.e_phi = std::abs(f.e_phi);
    r.h_par = std::hypot(f.b_z / m.mu_z, f.b_rho / m.mu_rho);
    r.h_phi = std::abs(f.b_phi / m.mu_phi);
  }
  return rows;
}

void write_snapshot(const std::string& path, const Mesh& mesh,
                    const std::vector<SnapshotRow>& rows, SnapshotFormat format) {
  if (format == SnapshotFormat::csv) {
    CsvTable t;
    t.header = {"face", "z", "rho", "e_par", "e_phi", "h_par", "h_phi"};
    t.rows.reserve(rows.size());
    for (const auto& r : rows)
      t.rows.push_back({static_cast<double>(r.face), r.z, r.rho, r.e_par, r.e_phi, r.h_par, r.h_phi});
    write_csv(path, t);
    return;
  }
  File f = open_for_write(path);
  std::FILE* out = f.get();
  std::fprintf(out, "# vtk DataFile Version 3.0\nfield magnitudes\nASCII\nDATASET UNSTRUCTURED_GRID\n");
  std::fprintf(out, "POINTS %lld double\n", static_cast<long long>(mesh.num_nodes()));
  for (const Point& p : mesh.nodes()) std::fprintf(out, "%.17g %.17g 0\n", p.z, p.rho);
  std::fprintf(out, "CELLS %lld %lld\n", static_cast<long long>(mesh.num_faces()),
               4LL * mesh.num_faces());
  for (const Face& face : mesh.faces())
    std::fprintf(out, "3 %lld %lld %lld\n", static_cast<long long>(face.nodes[0]),
                 static_cast<long long>(face.nodes[1]), static_cast<long long>(face.nodes[2]));
  std::fprintf(out, "CELL_TYPES %lld\n", static_cast<long long>(mesh.num_faces()));
  for (Index k = 0; k < mesh.num_faces(); ++k) std::fprintf(out, "5\n");
  std::fprintf(out, "CELL_DATA %lld\n", static_cast<long long>(rows.size()));
  auto scalars = [&](const char* name, double SnapshotRow::*field) {
    std::fprintf(out, "SCALARS %s double 1\nLOOKUP_TABLE default\n", name);
    for (const auto& r : rows) std::fprintf(out, "%.17g\n", r.*field);
  };
  scalars("e_par", &SnapshotRow::e_par);
  scalars("e_phi", &SnapshotRow::e_phi);
  scalars("h_par", &SnapshotRow::h_par);
  scalars("h_phi", &SnapshotRow::h_phi);
  close_checked(f, path);
}

std::vector<SnapshotRow> read_snapshot_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  if (t.header.size() != 7 || t.header[0] != "face") throw Error(path + ": not a snapshot file");
  std::vector<SnapshotRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows)
    rows.push_back({static_cast<Index>(r[0]), r[1], r[2], r[3], r[4], r[5], r[6]});
  return rows;
}

}  // namespace borpic
