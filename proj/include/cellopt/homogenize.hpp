#pragma once

#include <Eigen/Dense>
#include <array>

#include "cellopt/fem.hpp"
#include "cellopt/mesh.hpp"

namespace cellopt {

struct HomogenizedTensors {
  Eigen::Matrix3d EH = Eigen::Matrix3d::Zero();  // Voigt 11, 22, 12
  Mat2 kH = Mat2::Zero();
};

// Energy averages of the corrected reference fields. Integrands are
// elementwise constant for P1 fields, so the centroid rule is exact; the
// element density is the mean of the nodal values, matching assembly.
Eigen::Matrix3d elastic_tensor(const UnitCellMesh& mesh,
                               const DensityField& rho, const MaterialLaw& law,
                               const std::array<Eigen::VectorXd, 3>& u);
Mat2 thermal_tensor(const UnitCellMesh& mesh, const DensityField& rho,
                    const MaterialLaw& law,
                    const std::array<Eigen::VectorXd, 2>& theta);

// Variants over per-element densities (used by the re-analysis step).
Eigen::Matrix3d elastic_tensor_elem(const UnitCellMesh& mesh,
                                    const Eigen::VectorXd& rho_e,
                                    const MaterialLaw& law,
                                    const std::array<Eigen::VectorXd, 3>& u);
Mat2 thermal_tensor_elem(const UnitCellMesh& mesh,
                         const Eigen::VectorXd& rho_e, const MaterialLaw& law,
                         const std::array<Eigen::VectorXd, 2>& theta);

HomogenizedTensors homogenize(const UnitCellMesh& mesh,
                              const DensityField& rho, const MaterialLaw& law,
                              const CellSolutions& sols);

struct EngineeringModuli {
  double Ex = 0, Ey = 0, G = 0;
  double k11 = 0, k22 = 0;
};

// Directional moduli from the compliance matrix C = EH^{-1}:
// Ex = 1/C11, Ey = 1/C22, G = 1/C33. Throws DegenerateTensorError when EH
// is singular or indefinite.
EngineeringModuli engineering_moduli(const Eigen::Matrix3d& EH, const Mat2& kH);

// Per-element corrected strain (Voigt) of one load case.
Eigen::Vector3d corrected_strain(const UnitCellMesh& mesh, int t, int load_case,
                                 const Eigen::VectorXd& u);

}  // namespace cellopt
