#include "cellopt/homogenize.hpp"

#include <cmath>

namespace cellopt {

Eigen::Vector3d corrected_strain(const UnitCellMesh& mesh, int t, int load_case,
                                 const Eigen::VectorXd& u) {
  const auto B = strain_matrix(mesh, t);
  const auto& tri = mesh.triangles[t];
  Eigen::Matrix<double, 6, 1> ue;
  for (int i = 0; i < 3; ++i) {
    ue[2 * i] = u[2 * tri[i]];
    ue[2 * i + 1] = u[2 * tri[i] + 1];
  }
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[load_case] = 1.0;
  return e - B * ue;
}

Eigen::Matrix3d elastic_tensor_elem(const UnitCellMesh& mesh,
                                    const Eigen::VectorXd& rho_e,
                                    const MaterialLaw& law,
                                    const std::array<Eigen::VectorXd, 3>& u) {
  for (const auto& field : u)
    if (field.size() != 2 * mesh.num_vertices())
      throw std::invalid_argument("fluctuation field does not match mesh");
  const Eigen::Matrix3d E = elastic_constitutive(law);
  Eigen::Matrix3d EH = Eigen::Matrix3d::Zero();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double w = std::pow(rho_e[t], law.p) * mesh.area(t);
    Eigen::Matrix3d eps;  // columns: corrected strains of the 3 load cases
    for (int lc = 0; lc < 3; ++lc) eps.col(lc) = corrected_strain(mesh, t, lc, u[lc]);
    EH += w * (eps.transpose() * E * eps);
  }
  return EH / mesh.total_area();
}

Mat2 thermal_tensor_elem(const UnitCellMesh& mesh, const Eigen::VectorXd& rho_e,
                         const MaterialLaw& law,
                         const std::array<Eigen::VectorXd, 2>& theta) {
  for (const auto& field : theta)
    if (field.size() != mesh.num_vertices())
      throw std::invalid_argument("fluctuation field does not match mesh");
  Mat2 k = Mat2::Zero();
  k(0, 0) = law.k11;
  k(1, 1) = law.k22;
  Mat2 kH = Mat2::Zero();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double w = std::pow(rho_e[t], law.s) * mesh.area(t);
    const auto g = p1_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    Mat2 grads;  // columns: corrected gradients of the 2 load cases
    for (int lc = 0; lc < 2; ++lc) {
      Vec2 gt = Vec2::Zero();
      for (int i = 0; i < 3; ++i) gt += g.col(i) * theta[lc][tri[i]];
      Vec2 ref = Vec2::Zero();
      ref[lc] = 1.0;
      grads.col(lc) = ref - gt;
    }
    kH += w * (grads.transpose() * k * grads);
  }
  return kH / mesh.total_area();
}

Eigen::Matrix3d elastic_tensor(const UnitCellMesh& mesh,
                               const DensityField& rho, const MaterialLaw& law,
                               const std::array<Eigen::VectorXd, 3>& u) {
  if (rho.values.size() != mesh.num_vertices())
    throw std::invalid_argument("density does not match mesh");
  return elastic_tensor_elem(mesh, element_mean_density(mesh, rho.values), law, u);
}

Mat2 thermal_tensor(const UnitCellMesh& mesh, const DensityField& rho,
                    const MaterialLaw& law,
                    const std::array<Eigen::VectorXd, 2>& theta) {
  if (rho.values.size() != mesh.num_vertices())
    throw std::invalid_argument("density does not match mesh");
  return thermal_tensor_elem(mesh, element_mean_density(mesh, rho.values), law,
                             theta);
}

HomogenizedTensors homogenize(const UnitCellMesh& mesh,
                              const DensityField& rho, const MaterialLaw& law,
                              const CellSolutions& sols) {
  HomogenizedTensors H;
  H.EH = elastic_tensor(mesh, rho, law, sols.elastic);
  H.kH = thermal_tensor(mesh, rho, law, sols.thermal);
  return H;
}

EngineeringModuli engineering_moduli(const Eigen::Matrix3d& EH, const Mat2& kH) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(EH);
  const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(2);
  if (lmin <= 0.0 || lmax / lmin > 1e12)
    throw DegenerateTensorError("homogenized elastic tensor is singular or "
                                "indefinite");
  const Eigen::Matrix3d C = EH.inverse();
  EngineeringModuli m;
  m.Ex = 1.0 / C(0, 0);
  m.Ey = 1.0 / C(1, 1);
  m.G = 1.0 / C(2, 2);
  m.k11 = kH(0, 0);
  m.k22 = kH(1, 1);
  return m;
}

}  // namespace cellopt
