#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <cstdint>
#include <memory>

#include "cellopt/mesh.hpp"

namespace cellopt {

// Bulk material plus the SIMP interpolation exponents. Conductivity is
// diagonal at the bulk level; homogenization may still produce off-diagonal
// terms.
struct MaterialLaw {
  double E = 1.0;
  double nu = 0.3;
  double k11 = 1.0;
  double k22 = 1.0;
  double p = 4.0;  // elastic SIMP exponent
  double s = 4.0;  // thermal SIMP exponent
  bool plane_stress = true;

  void validate() const;
};

// 3x3 Voigt stiffness mapping (e11, e22, 2*e12) to (s11, s22, s12).
Eigen::Matrix3d elastic_constitutive(const MaterialLaw& law);

// Piecewise-linear nodal relative density on a mesh, periodic by
// construction (slave values mirror their master).
struct DensityField {
  Eigen::VectorXd values;
  double rho_min = 1e-4;

  void clamp();
  void sync_periodic(const UnitCellMesh& mesh);
  void validate(const UnitCellMesh& mesh) const;
};

DensityField uniform_density(const UnitCellMesh& mesh, double value,
                             double rho_min = 1e-4);

// Element densities: mean of the three nodal values (the rule shared by
// assembly, homogenization and the sensitivities).
Eigen::VectorXd element_mean_density(const UnitCellMesh& mesh,
                                     const Eigen::VectorXd& nodal);

// Content hash used to detect stale cell solutions.
std::uint64_t density_stamp(const DensityField& rho);

// Merged periodic scalar dofs: every vertex maps to the dof of its
// representative vertex. Periodicity is enforced by index merging.
struct PeriodicDofMap {
  std::vector<int> vertex_dof;  // vertex -> merged dof
  std::vector<int> dof_vertex;  // merged dof -> owning (master) vertex
  int n_dofs = 0;

  static PeriodicDofMap build(const UnitCellMesh& mesh);
};

// The three elastic and two thermal fluctuation fields for one density.
// Fields are stored nodally on all vertices; slave entries equal their
// master bitwise and the pinned anchor vertex carries exact zeros.
struct CellSolutions {
  std::array<Eigen::VectorXd, 3> elastic;  // load order 11, 22, 12 (2*nv each)
  std::array<Eigen::VectorXd, 2> thermal;  // load order x, y (nv each)
  std::uint64_t stamp = 0;
};

// Sparse SPD solve shared by the cell problems and the Helmholtz filter.
// Factors once per matrix, checks the relative residual against `tol` and
// applies iterative refinement before giving up.
class SpdSolver {
 public:
  void analyze(const Eigen::SparseMatrix<double>& A);
  void factorize(const Eigen::SparseMatrix<double>& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol = 1e-10) const;

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  const Eigen::SparseMatrix<double>* matrix_ = nullptr;
  bool analyzed_ = false;
};

// Periodic cell problems for one physics on a fixed mesh. The sparsity
// pattern and dof maps are built once; factorizations are redone per
// density and reused across the load cases.
class ElasticCellSolver {
 public:
  ElasticCellSolver(const UnitCellMesh& mesh, const MaterialLaw& law,
                    int pin_vertex = -1);

  // rho_e: per-element density (already averaged); returns the three
  // fluctuation fields for the reference strains 11, 22, 12.
  std::array<Eigen::VectorXd, 3> solve(const Eigen::VectorXd& rho_e) const;

  const UnitCellMesh& mesh() const { return mesh_; }

 private:
  const UnitCellMesh& mesh_;
  MaterialLaw law_;
  Eigen::Matrix3d E_;
  PeriodicDofMap dofs_;
  int pin_dof_;
  mutable SpdSolver solver_;
  mutable bool analyzed_ = false;
};

class ThermalCellSolver {
 public:
  ThermalCellSolver(const UnitCellMesh& mesh, const MaterialLaw& law,
                    int pin_vertex = -1);

  std::array<Eigen::VectorXd, 2> solve(const Eigen::VectorXd& rho_e) const;

  const UnitCellMesh& mesh() const { return mesh_; }

 private:
  const UnitCellMesh& mesh_;
  MaterialLaw law_;
  Mat2 k_;
  PeriodicDofMap dofs_;
  int pin_dof_;
  mutable SpdSolver solver_;
  mutable bool analyzed_ = false;
};

// Convenience wrappers taking a nodal density.
std::array<Eigen::VectorXd, 3> solve_elastic_cell_problems(
    const UnitCellMesh& mesh, const DensityField& rho, const MaterialLaw& law,
    int pin_vertex = -1);
std::array<Eigen::VectorXd, 2> solve_thermal_cell_problems(
    const UnitCellMesh& mesh, const DensityField& rho, const MaterialLaw& law,
    int pin_vertex = -1);
CellSolutions solve_cell_problems(const UnitCellMesh& mesh,
                                  const DensityField& rho,
                                  const MaterialLaw& law);

// P1 gradient operator of one triangle: grads.col(i) = grad(phi_i).
Eigen::Matrix<double, 2, 3> p1_gradients(const UnitCellMesh& mesh, int t);

// Strain-displacement matrix (3x6) in the (e11, e22, 2*e12) convention.
Eigen::Matrix<double, 3, 6> strain_matrix(const UnitCellMesh& mesh, int t);

// Assembled SIMP-weighted stiffness matrices on merged periodic dofs,
// without the anchor pin (nullspace intact). Exposed for verification.
Eigen::SparseMatrix<double> assemble_elastic_stiffness(
    const UnitCellMesh& mesh, const Eigen::VectorXd& rho_e,
    const MaterialLaw& law, const PeriodicDofMap& dofs);
Eigen::SparseMatrix<double> assemble_thermal_stiffness(
    const UnitCellMesh& mesh, const Eigen::VectorXd& rho_e,
    const MaterialLaw& law, const PeriodicDofMap& dofs);

}  // namespace cellopt
