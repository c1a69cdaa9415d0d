#pragma once

#include <string>
#include <vector>

#include "borpic/constitutive.hpp"
#include "borpic/field_solver.hpp"
#include "borpic/mesh.hpp"

namespace borpic {

// A CSV with a header row and numeric columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // throws Error for an unknown column
  std::vector<double> column(const std::string& name) const;
};

// 17 significant digits, so that read_csv recovers the values exactly
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

enum class SnapshotFormat { csv, vtk };

// Field magnitudes at face centroids.
struct SnapshotRow {
  Index face = 0;
  double z = 0, rho = 0;
  double e_par = 0, e_phi = 0;
  double h_par = 0, h_phi = 0;
};

std::vector<SnapshotRow> snapshot_rows(const Mesh& mesh, const FieldState& state,
                                       const MaterialMap& materials);

// throws Error when the file cannot be written
void write_snapshot(const std::string& path, const Mesh& mesh,
                    const std::vector<SnapshotRow>& rows, SnapshotFormat format);
std::vector<SnapshotRow> read_snapshot_csv(const std::string& path);

}  // namespace borpic
