#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cellopt/fem.hpp"
#include "cellopt/mesh.hpp"

namespace cellopt {

struct FilterParams {
  double tau = 0.02;       // diffusion radius of the Helmholtz kernel
  double beta = 5.0;       // Heaviside sharpness
  double eta = 0.5;        // projection threshold

  void validate() const;
};

// Solves -tau^2 Lap(rt) + rt = rho with periodic boundary conditions (P1,
// lumped mass) and clamps the result into [rho_min, 1]. Lumping gives the
// discrete maximum principle on non-obtuse meshes, so the clamp normally
// never bites and the field mean is preserved exactly.
DensityField helmholtz_filter(const UnitCellMesh& mesh, const DensityField& rho,
                              double tau);

// Nodewise tanh projection
//   rb = [tanh(beta*eta) + tanh(beta*(rt - eta))]
//      / [tanh(beta*eta) + tanh(beta*(1 - eta))],
// the identity in the beta -> 0 limit.
Eigen::VectorXd heaviside_project(const Eigen::VectorXd& rt, double beta,
                                  double eta);
double heaviside_point(double rt, double beta, double eta);
double heaviside_slope(double rt, double beta, double eta);

DensityField heaviside_filter(const UnitCellMesh& mesh, const DensityField& rho,
                              double beta, double eta);

// heaviside(helmholtz(rho)) with tangent/adjoint of the smooth chain (the
// clamp is a safeguard and is treated as inactive for differentiation).
// Used by the filtered-optimization mode.
class FilterChain {
 public:
  FilterChain(const UnitCellMesh& mesh, const FilterParams& params,
              double rho_min);

  Eigen::VectorXd smooth(const Eigen::VectorXd& rho) const;  // Helmholtz only
  Eigen::VectorXd apply(const Eigen::VectorXd& rho) const;   // full, clamped

  // Directional derivative at rho: d(chain)/d(rho) * v.
  Eigen::VectorXd tangent(const Eigen::VectorXd& rho,
                          const Eigen::VectorXd& v) const;
  // Transpose action: (d(chain)/d(rho))^T * g, for sensitivity rows.
  Eigen::VectorXd adjoint(const Eigen::VectorXd& rho,
                          const Eigen::VectorXd& g) const;

  const FilterParams& params() const { return params_; }

 private:
  Eigen::VectorXd helmholtz_reduced(const Eigen::VectorXd& nodal) const;

  const UnitCellMesh& mesh_;
  FilterParams params_;
  double rho_min_;
  PeriodicDofMap dofs_;
  Eigen::VectorXd lumped_mass_;  // per merged dof
  Eigen::SparseMatrix<double> A_;
  SpdSolver solver_;
  bool identity_ = false;  // tau == 0
};

}  // namespace cellopt
