#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "cellopt/mesh.hpp"

namespace cellopt {

// Plain-text native mesh format: vertex count, vertex lines "x y", triangle
// count, triangle lines "i j k", periodic pair count, pair lines "s m".
void write_mesh_txt(const UnitCellMesh& mesh, const std::string& path);
UnitCellMesh read_mesh_txt(const std::string& path);

// Legacy ASCII VTK. Writing emits an UNSTRUCTURED_GRID with triangle cells;
// reading accepts UNSTRUCTURED_GRID and POLYDATA. Periodic pairing is
// rebuilt from boundary coordinates on import.
struct VtkPointData {
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<std::pair<std::string, std::vector<Mat2>>> tensors;
};

void write_vtk(const UnitCellMesh& mesh, const std::string& path,
               const VtkPointData& data = {});
UnitCellMesh read_vtk(const std::string& path,
                      std::vector<double>* first_scalar = nullptr);

// Vertex table "x,y,rho" with full round-trip precision.
void write_density_csv(const UnitCellMesh& mesh, const Eigen::VectorXd& rho,
                       const std::string& path);
Eigen::VectorXd read_density_csv(const std::string& path);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace cellopt
