#include "cellopt/fem.hpp"

#include <cmath>
#include <cstring>
#include <vector>

namespace cellopt {

void MaterialLaw::validate() const {
  if (E <= 0.0) throw std::invalid_argument("Young modulus must be positive");
  if (nu <= -1.0 || nu >= 0.5)
    throw std::invalid_argument("Poisson ratio must lie in (-1, 0.5)");
  if (k11 <= 0.0 || k22 <= 0.0)
    throw std::invalid_argument("conductivities must be positive");
  if (p < 1.0 || s < 1.0)
    throw std::invalid_argument("SIMP exponents must be >= 1");
}

Eigen::Matrix3d elastic_constitutive(const MaterialLaw& law) {
  law.validate();
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  if (law.plane_stress) {
    const double f = law.E / (1.0 - law.nu * law.nu);
    C(0, 0) = C(1, 1) = f;
    C(0, 1) = C(1, 0) = f * law.nu;
    C(2, 2) = f * (1.0 - law.nu) / 2.0;
  } else {
    const double f = law.E / ((1.0 + law.nu) * (1.0 - 2.0 * law.nu));
    C(0, 0) = C(1, 1) = f * (1.0 - law.nu);
    C(0, 1) = C(1, 0) = f * law.nu;
    C(2, 2) = f * (1.0 - 2.0 * law.nu) / 2.0;
  }
  return C;
}

void DensityField::clamp() {
  for (int i = 0; i < values.size(); ++i)
    values[i] = std::min(1.0, std::max(rho_min, values[i]));
}

void DensityField::sync_periodic(const UnitCellMesh& mesh) {
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    int r = mesh.canonical(v);
    if (r != v) values[v] = values[r];
  }
}

void DensityField::validate(const UnitCellMesh& mesh) const {
  if (values.size() != mesh.num_vertices())
    throw std::invalid_argument("density size does not match mesh");
  for (int i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw SolverError("density is not finite at node " + std::to_string(i));
    if (values[i] < rho_min * (1.0 - 1e-12) || values[i] > 1.0 + 1e-12)
      throw SolverError("density outside [rho_min, 1] at node " +
                        std::to_string(i));
  }
}

DensityField uniform_density(const UnitCellMesh& mesh, double value,
                             double rho_min) {
  DensityField rho;
  rho.rho_min = rho_min;
  rho.values = Eigen::VectorXd::Constant(mesh.num_vertices(), value);
  return rho;
}

Eigen::VectorXd element_mean_density(const UnitCellMesh& mesh,
                                     const Eigen::VectorXd& nodal) {
  Eigen::VectorXd out(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out[t] = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
  }
  return out;
}

std::uint64_t density_stamp(const DensityField& rho) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* data, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(rho.values.data(), sizeof(double) * rho.values.size());
  mix(&rho.rho_min, sizeof(double));
  return h;
}

PeriodicDofMap PeriodicDofMap::build(const UnitCellMesh& mesh) {
  PeriodicDofMap map;
  map.vertex_dof.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.canonical(v) == v) {
      map.vertex_dof[v] = map.n_dofs++;
      map.dof_vertex.push_back(v);
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v)
    map.vertex_dof[v] = map.vertex_dof[mesh.canonical(v)];
  return map;
}

Eigen::Matrix<double, 2, 3> p1_gradients(const UnitCellMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]],
             &c = mesh.vertices[tri[2]];
  const double inv2A = 1.0 / (2.0 * mesh.signed_area(t));
  Eigen::Matrix<double, 2, 3> g;
  g.col(0) = Vec2(b.y() - c.y(), c.x() - b.x()) * inv2A;
  g.col(1) = Vec2(c.y() - a.y(), a.x() - c.x()) * inv2A;
  g.col(2) = Vec2(a.y() - b.y(), b.x() - a.x()) * inv2A;
  return g;
}

Eigen::Matrix<double, 3, 6> strain_matrix(const UnitCellMesh& mesh, int t) {
  const auto g = p1_gradients(mesh, t);
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    B(0, 2 * i) = g(0, i);
    B(1, 2 * i + 1) = g(1, i);
    B(2, 2 * i) = g(1, i);
    B(2, 2 * i + 1) = g(0, i);
  }
  return B;
}

namespace {

Eigen::SparseMatrix<double> assemble_scalar(
    const UnitCellMesh& mesh, const Eigen::VectorXd& weight,
    const Mat2& coeff, const PeriodicDofMap& dofs) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = p1_gradients(mesh, t);
    const double w = weight[t] * mesh.area(t);
    const Eigen::Matrix3d Ke = w * g.transpose() * coeff * g;
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(dofs.vertex_dof[tri[i]], dofs.vertex_dof[tri[j]],
                           Ke(i, j));
  }
  Eigen::SparseMatrix<double> A(dofs.n_dofs, dofs.n_dofs);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::SparseMatrix<double> assemble_vector(
    const UnitCellMesh& mesh, const Eigen::VectorXd& weight,
    const Eigen::Matrix3d& E, const PeriodicDofMap& dofs) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto B = strain_matrix(mesh, t);
    const double w = weight[t] * mesh.area(t);
    const Eigen::Matrix<double, 6, 6> Ke = w * B.transpose() * E * B;
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int ci = 0; ci < 2; ++ci)
        for (int j = 0; j < 3; ++j)
          for (int cj = 0; cj < 2; ++cj)
            trips.emplace_back(2 * dofs.vertex_dof[tri[i]] + ci,
                               2 * dofs.vertex_dof[tri[j]] + cj,
                               Ke(2 * i + ci, 2 * j + cj));
  }
  Eigen::SparseMatrix<double> A(2 * dofs.n_dofs, 2 * dofs.n_dofs);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Drops the rows/columns listed in `pinned` (sorted), keeping SPD structure.
Eigen::SparseMatrix<double> drop_dofs(const Eigen::SparseMatrix<double>& A,
                                      const std::vector<int>& pinned) {
  std::vector<int> newidx(A.rows());
  int next = 0;
  size_t k = 0;
  for (int i = 0; i < A.rows(); ++i) {
    if (k < pinned.size() && pinned[k] == i) {
      newidx[i] = -1;
      ++k;
    } else {
      newidx[i] = next++;
    }
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros());
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
      if (newidx[it.row()] >= 0 && newidx[it.col()] >= 0)
        trips.emplace_back(newidx[it.row()], newidx[it.col()], it.value());
  Eigen::SparseMatrix<double> R(next, next);
  R.setFromTriplets(trips.begin(), trips.end());
  return R;
}

Eigen::VectorXd drop_entries(const Eigen::VectorXd& b,
                             const std::vector<int>& pinned) {
  Eigen::VectorXd r(b.size() - (int)pinned.size());
  int next = 0;
  size_t k = 0;
  for (int i = 0; i < b.size(); ++i) {
    if (k < pinned.size() && pinned[k] == i)
      ++k;
    else
      r[next++] = b[i];
  }
  return r;
}

Eigen::VectorXd insert_entries(const Eigen::VectorXd& x,
                               const std::vector<int>& pinned, int full_size) {
  Eigen::VectorXd r(full_size);
  int src = 0;
  size_t k = 0;
  for (int i = 0; i < full_size; ++i) {
    if (k < pinned.size() && pinned[k] == i) {
      r[i] = 0.0;
      ++k;
    } else {
      r[i] = x[src++];
    }
  }
  return r;
}

void check_density(const Eigen::VectorXd& rho_e) {
  for (int t = 0; t < rho_e.size(); ++t)
    if (!(rho_e[t] > 0.0) || !std::isfinite(rho_e[t]))
      throw SolverError("non-positive element density at element " +
                        std::to_string(t));
}

}  // namespace

Eigen::SparseMatrix<double> assemble_elastic_stiffness(
    const UnitCellMesh& mesh, const Eigen::VectorXd& rho_e,
    const MaterialLaw& law, const PeriodicDofMap& dofs) {
  Eigen::VectorXd w(rho_e.size());
  for (int t = 0; t < rho_e.size(); ++t) w[t] = std::pow(rho_e[t], law.p);
  return assemble_vector(mesh, w, elastic_constitutive(law), dofs);
}

Eigen::SparseMatrix<double> assemble_thermal_stiffness(
    const UnitCellMesh& mesh, const Eigen::VectorXd& rho_e,
    const MaterialLaw& law, const PeriodicDofMap& dofs) {
  Eigen::VectorXd w(rho_e.size());
  for (int t = 0; t < rho_e.size(); ++t) w[t] = std::pow(rho_e[t], law.s);
  Mat2 k = Mat2::Zero();
  k(0, 0) = law.k11;
  k(1, 1) = law.k22;
  return assemble_scalar(mesh, w, k, dofs);
}

void SpdSolver::analyze(const Eigen::SparseMatrix<double>& A) {
  ldlt_.analyzePattern(A);
  analyzed_ = true;
}

void SpdSolver::factorize(const Eigen::SparseMatrix<double>& A) {
  if (!analyzed_) analyze(A);
  ldlt_.factorize(A);
  if (ldlt_.info() != Eigen::Success)
    throw SolverError("sparse factorization failed (singular system?)");
  matrix_ = &A;
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b, double tol) const {
  if (!matrix_) throw SolverError("solve called before factorize");
  const double bnorm = b.norm();
  Eigen::VectorXd x = ldlt_.solve(b);
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
  // Iterative refinement; the factorization is reused for the corrections.
  for (int it = 0; it < 5; ++it) {
    Eigen::VectorXd r = b - (*matrix_) * x;
    if (r.norm() <= tol * bnorm) return x;
    x += ldlt_.solve(r);
  }
  Eigen::VectorXd r = b - (*matrix_) * x;
  if (r.norm() > tol * bnorm)
    throw SolverError("linear solve residual " + std::to_string(r.norm() / bnorm) +
                      " exceeds tolerance");
  return x;
}

ElasticCellSolver::ElasticCellSolver(const UnitCellMesh& mesh,
                                     const MaterialLaw& law, int pin_vertex)
    : mesh_(mesh), law_(law), E_(elastic_constitutive(law)),
      dofs_(PeriodicDofMap::build(mesh)) {
  int v = pin_vertex >= 0 ? pin_vertex : mesh.corner_group[0];
  pin_dof_ = dofs_.vertex_dof[mesh.canonical(v)];
}

std::array<Eigen::VectorXd, 3> ElasticCellSolver::solve(
    const Eigen::VectorXd& rho_e) const {
  check_density(rho_e);
  Eigen::VectorXd w(rho_e.size());
  for (int t = 0; t < rho_e.size(); ++t) w[t] = std::pow(rho_e[t], law_.p);

  Eigen::SparseMatrix<double> A = assemble_vector(mesh_, w, E_, dofs_);
  const std::vector<int> pinned = {2 * pin_dof_, 2 * pin_dof_ + 1};
  Eigen::SparseMatrix<double> Ar = drop_dofs(A, pinned);
  if (!analyzed_) {
    solver_.analyze(Ar);
    analyzed_ = true;
  }
  solver_.factorize(Ar);

  // Loads from the reference displacements u0_11=[x,0], u0_22=[0,y],
  // u0_12=[y,0]: unit Voigt strains.
  std::array<Eigen::VectorXd, 3> fields;
  for (int lc = 0; lc < 3; ++lc) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[lc] = 1.0;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * dofs_.n_dofs);
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const auto B = strain_matrix(mesh_, t);
      const Eigen::Matrix<double, 6, 1> fe =
          (w[t] * mesh_.area(t)) * (B.transpose() * (E_ * e));
      const auto& tri = mesh_.triangles[t];
      for (int i = 0; i < 3; ++i) {
        f[2 * dofs_.vertex_dof[tri[i]]] += fe[2 * i];
        f[2 * dofs_.vertex_dof[tri[i]] + 1] += fe[2 * i + 1];
      }
    }
    Eigen::VectorXd x = insert_entries(
        solver_.solve(drop_entries(f, pinned)), pinned, 2 * dofs_.n_dofs);
    Eigen::VectorXd full(2 * mesh_.num_vertices());
    for (int v = 0; v < mesh_.num_vertices(); ++v) {
      full[2 * v] = x[2 * dofs_.vertex_dof[v]];
      full[2 * v + 1] = x[2 * dofs_.vertex_dof[v] + 1];
    }
    fields[lc] = std::move(full);
  }
  return fields;
}

ThermalCellSolver::ThermalCellSolver(const UnitCellMesh& mesh,
                                     const MaterialLaw& law, int pin_vertex)
    : mesh_(mesh), law_(law), dofs_(PeriodicDofMap::build(mesh)) {
  law.validate();
  k_ = Mat2::Zero();
  k_(0, 0) = law.k11;
  k_(1, 1) = law.k22;
  int v = pin_vertex >= 0 ? pin_vertex : mesh.corner_group[0];
  pin_dof_ = dofs_.vertex_dof[mesh.canonical(v)];
}

std::array<Eigen::VectorXd, 2> ThermalCellSolver::solve(
    const Eigen::VectorXd& rho_e) const {
  check_density(rho_e);
  Eigen::VectorXd w(rho_e.size());
  for (int t = 0; t < rho_e.size(); ++t) w[t] = std::pow(rho_e[t], law_.s);

  Eigen::SparseMatrix<double> A = assemble_scalar(mesh_, w, k_, dofs_);
  const std::vector<int> pinned = {pin_dof_};
  Eigen::SparseMatrix<double> Ar = drop_dofs(A, pinned);
  if (!analyzed_) {
    solver_.analyze(Ar);
    analyzed_ = true;
  }
  solver_.factorize(Ar);

  std::array<Eigen::VectorXd, 2> fields;
  for (int lc = 0; lc < 2; ++lc) {
    Vec2 g = Vec2::Zero();
    g[lc] = 1.0;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs_.n_dofs);
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const auto gr = p1_gradients(mesh_, t);
      const Eigen::Vector3d fe =
          (w[t] * mesh_.area(t)) * (gr.transpose() * (k_ * g));
      const auto& tri = mesh_.triangles[t];
      for (int i = 0; i < 3; ++i) f[dofs_.vertex_dof[tri[i]]] += fe[i];
    }
    Eigen::VectorXd x = insert_entries(solver_.solve(drop_entries(f, pinned)),
                                       pinned, dofs_.n_dofs);
    Eigen::VectorXd full(mesh_.num_vertices());
    for (int v = 0; v < mesh_.num_vertices(); ++v)
      full[v] = x[dofs_.vertex_dof[v]];
    fields[lc] = std::move(full);
  }
  return fields;
}

std::array<Eigen::VectorXd, 3> solve_elastic_cell_problems(
    const UnitCellMesh& mesh, const DensityField& rho, const MaterialLaw& law,
    int pin_vertex) {
  rho.validate(mesh);
  ElasticCellSolver solver(mesh, law, pin_vertex);
  return solver.solve(element_mean_density(mesh, rho.values));
}

std::array<Eigen::VectorXd, 2> solve_thermal_cell_problems(
    const UnitCellMesh& mesh, const DensityField& rho, const MaterialLaw& law,
    int pin_vertex) {
  rho.validate(mesh);
  ThermalCellSolver solver(mesh, law, pin_vertex);
  return solver.solve(element_mean_density(mesh, rho.values));
}

CellSolutions solve_cell_problems(const UnitCellMesh& mesh,
                                  const DensityField& rho,
                                  const MaterialLaw& law) {
  CellSolutions out;
  out.elastic = solve_elastic_cell_problems(mesh, rho, law);
  out.thermal = solve_thermal_cell_problems(mesh, rho, law);
  out.stamp = density_stamp(rho);
  return out;
}

}  // namespace cellopt
