#include "cellopt/filters.hpp"

#include <cmath>

namespace cellopt {

void FilterParams::validate() const {
  if (tau < 0.0) throw std::invalid_argument("filter radius must be >= 0");
  if (beta < 0.0) throw std::invalid_argument("Heaviside sharpness must be >= 0");
  if (eta <= 0.0 || eta >= 1.0)
    throw std::invalid_argument("projection threshold must lie in (0,1)");
}

namespace {

// Stiffness + lumped mass on merged periodic dofs: A = tau^2 K + M_L.
void build_helmholtz(const UnitCellMesh& mesh, double tau,
                     const PeriodicDofMap& dofs,
                     Eigen::SparseMatrix<double>& A, Eigen::VectorXd& mass) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(12 * mesh.num_triangles());
  mass = Eigen::VectorXd::Zero(dofs.n_dofs);
  const double t2 = tau * tau;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = p1_gradients(mesh, t);
    const double area = mesh.area(t);
    const Eigen::Matrix3d Ke = (t2 * area) * (g.transpose() * g);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int di = dofs.vertex_dof[tri[i]];
      mass[di] += area / 3.0;
      trips.emplace_back(di, di, area / 3.0);
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(di, dofs.vertex_dof[tri[j]], Ke(i, j));
    }
  }
  A.resize(dofs.n_dofs, dofs.n_dofs);
  A.setFromTriplets(trips.begin(), trips.end());
}

}  // namespace

DensityField helmholtz_filter(const UnitCellMesh& mesh, const DensityField& rho,
                              double tau) {
  if (tau < 0.0) throw std::invalid_argument("filter radius must be >= 0");
  if (rho.values.size() != mesh.num_vertices())
    throw std::invalid_argument("density does not match mesh");

  DensityField out = rho;
  if (tau > 0.0) {
    PeriodicDofMap dofs = PeriodicDofMap::build(mesh);
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd mass;
    build_helmholtz(mesh, tau, dofs, A, mass);

    Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs.n_dofs);
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (mesh.canonical(v) == v) b[dofs.vertex_dof[v]] = rho.values[v];
    b = mass.cwiseProduct(b);

    SpdSolver solver;
    solver.factorize(A);
    Eigen::VectorXd x = solver.solve(b);
    for (int v = 0; v < mesh.num_vertices(); ++v)
      out.values[v] = x[dofs.vertex_dof[v]];
  }
  out.clamp();
  return out;
}

double heaviside_point(double rt, double beta, double eta) {
  // Below this the tanh expression is the identity to round-off; evaluating
  // it would underflow for extreme beta.
  if (beta * std::max(eta, 1.0 - eta) < 1e-30) return rt;
  const double a = std::tanh(beta * eta);
  return (a + std::tanh(beta * (rt - eta))) / (a + std::tanh(beta * (1.0 - eta)));
}

double heaviside_slope(double rt, double beta, double eta) {
  if (beta * std::max(eta, 1.0 - eta) < 1e-30) return 1.0;
  const double a = std::tanh(beta * eta);
  const double t = std::tanh(beta * (rt - eta));
  return beta * (1.0 - t * t) / (a + std::tanh(beta * (1.0 - eta)));
}

Eigen::VectorXd heaviside_project(const Eigen::VectorXd& rt, double beta,
                                  double eta) {
  if (beta < 0.0) throw std::invalid_argument("Heaviside sharpness must be >= 0");
  if (eta <= 0.0 || eta >= 1.0)
    throw std::invalid_argument("projection threshold must lie in (0,1)");
  Eigen::VectorXd out(rt.size());
  for (int i = 0; i < rt.size(); ++i) out[i] = heaviside_point(rt[i], beta, eta);
  return out;
}

DensityField heaviside_filter(const UnitCellMesh& mesh, const DensityField& rho,
                              double beta, double eta) {
  (void)mesh;
  DensityField out = rho;
  out.values = heaviside_project(rho.values, beta, eta);
  out.clamp();
  return out;
}

FilterChain::FilterChain(const UnitCellMesh& mesh, const FilterParams& params,
                         double rho_min)
    : mesh_(mesh), params_(params), rho_min_(rho_min),
      dofs_(PeriodicDofMap::build(mesh)) {
  params.validate();
  if (params.tau > 0.0) {
    build_helmholtz(mesh, params.tau, dofs_, A_, lumped_mass_);
    solver_.factorize(A_);
  } else {
    identity_ = true;
  }
}

Eigen::VectorXd FilterChain::helmholtz_reduced(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs_.n_dofs);
  for (int v = 0; v < mesh_.num_vertices(); ++v)
    if (mesh_.canonical(v) == v) b[dofs_.vertex_dof[v]] = nodal[v];
  Eigen::VectorXd x = solver_.solve(lumped_mass_.cwiseProduct(b));
  Eigen::VectorXd out(mesh_.num_vertices());
  for (int v = 0; v < mesh_.num_vertices(); ++v) out[v] = x[dofs_.vertex_dof[v]];
  return out;
}

Eigen::VectorXd FilterChain::smooth(const Eigen::VectorXd& rho) const {
  return identity_ ? rho : helmholtz_reduced(rho);
}

Eigen::VectorXd FilterChain::apply(const Eigen::VectorXd& rho) const {
  Eigen::VectorXd out =
      heaviside_project(smooth(rho), params_.beta, params_.eta);
  for (int i = 0; i < out.size(); ++i)
    out[i] = std::min(1.0, std::max(rho_min_, out[i]));
  return out;
}

Eigen::VectorXd FilterChain::tangent(const Eigen::VectorXd& rho,
                                     const Eigen::VectorXd& v) const {
  Eigen::VectorXd rt = smooth(rho);
  Eigen::VectorXd dv = smooth(v);
  for (int i = 0; i < dv.size(); ++i)
    dv[i] *= heaviside_slope(rt[i], params_.beta, params_.eta);
  return dv;
}

Eigen::VectorXd FilterChain::adjoint(const Eigen::VectorXd& rho,
                                     const Eigen::VectorXd& g) const {
  Eigen::VectorXd rt = smooth(rho);
  Eigen::VectorXd gp(g.size());
  for (int i = 0; i < g.size(); ++i)
    gp[i] = g[i] * heaviside_slope(rt[i], params_.beta, params_.eta);
  if (identity_) return gp;

  // (A^{-1} M_L)^T = M_L A^{-1}: accumulate onto merged dofs, solve, then
  // scale by the lumped masses and scatter back.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs_.n_dofs);
  for (int v = 0; v < mesh_.num_vertices(); ++v) b[dofs_.vertex_dof[v]] += gp[v];
  Eigen::VectorXd x = lumped_mass_.cwiseProduct(solver_.solve(b));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_vertices());
  for (int v = 0; v < mesh_.num_vertices(); ++v)
    if (mesh_.canonical(v) == v) out[v] = x[dofs_.vertex_dof[v]];
  return out;
}

}  // namespace cellopt
