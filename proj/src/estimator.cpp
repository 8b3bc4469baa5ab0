#include "cellopt/estimator.hpp"

#include <cmath>

namespace cellopt {

namespace {

std::vector<Vec2> raw_gradients(const UnitCellMesh& mesh,
                                const Eigen::VectorXd& rho) {
  std::vector<Vec2> g(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto grads = p1_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    g[t] = grads.col(0) * rho[tri[0]] + grads.col(1) * rho[tri[1]] +
           grads.col(2) * rho[tri[2]];
  }
  return g;
}

}  // namespace

std::vector<Vec2> recover_gradient(const UnitCellMesh& mesh,
                                   const Eigen::VectorXd& rho) {
  const auto raw = raw_gradients(mesh, rho);
  std::vector<Vec2> rec(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 acc = Vec2::Zero();
    double area = 0.0;
    for (int k : mesh.patch(t)) {
      const double a = mesh.area(k);
      acc += a * raw[k];
      area += a;
    }
    rec[t] = acc / area;
  }
  return rec;
}

PatchData patch_gradient_matrices(const UnitCellMesh& mesh,
                                  const Eigen::VectorXd& rho) {
  const auto raw = raw_gradients(mesh, rho);
  const auto rec = recover_gradient(mesh, rho);
  PatchData out;
  out.G.resize(mesh.num_triangles());
  out.patch_area.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Mat2 G = Mat2::Zero();
    double area = 0.0;
    for (int k : mesh.patch(t)) {
      const Vec2 e = rec[k] - raw[k];
      G += mesh.area(k) * (e * e.transpose());
      area += mesh.area(k);
    }
    out.G[t] = G;
    out.patch_area[t] = area;
  }
  return out;
}

double element_eta2(const ElementGeometry& geom, const Mat2& G) {
  const double q1 = geom.r1.dot(G * geom.r1);
  const double q2 = geom.r2.dot(G * geom.r2);
  return (geom.lam1 * geom.lam1 * q1 + geom.lam2 * geom.lam2 * q2) /
         (geom.lam1 * geom.lam2);
}

LocalEstimate local_estimator(const UnitCellMesh& mesh,
                              const Eigen::VectorXd& rho) {
  const PatchData patches = patch_gradient_matrices(mesh, rho);
  LocalEstimate est;
  est.eta2.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    est.eta2[t] = element_eta2(element_anisotropy(mesh, t), patches.G[t]);
    est.eta2_total += est.eta2[t];
  }
  return est;
}

ElementMetric metric_from_patch(const Mat2& G, double patch_area,
                                double lam12_K, double tol, int n_triangles,
                                const MetricOptions& opts) {
  if (std::abs(G(0, 1) - G(1, 0)) >
      1e-10 * (std::abs(G(0, 0)) + std::abs(G(1, 1)) + 1e-300))
    throw std::invalid_argument("patch matrix must be symmetric");
  if (tol <= 0.0) throw std::invalid_argument("TOL must be positive");

  const Mat2 Ghat = G / patch_area;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(Ghat);
  double g2 = eig.eigenvalues()(0);  // ascending
  double g1 = eig.eigenvalues()(1);
  const Vec2 v2 = eig.eigenvectors().col(0);

  ElementMetric m;
  // Floors: Eq.-level formula divides by the eigenvalues; rank-deficient
  // patches (constant-gradient regions) are regularized by the aspect cap.
  const double eps_g = 1e-14 * std::max(g1, 0.0) + 1e-30;
  double g1f = std::max(g1, eps_g);
  double g2f = std::max({g2, g1f / (opts.aspect_max * opts.aspect_max), eps_g});
  if (g1f != g1 || g2f != g2) m.regularized = true;

  const double ref_patch = patch_area / lam12_K;
  const double factor =
      std::sqrt(tol * tol / (2.0 * n_triangles * ref_patch));
  double lam1 = factor / std::sqrt(g2f);
  double lam2 = factor / std::sqrt(g1f);

  auto clampv = [&](double v) {
    double c = std::min(opts.h_max, std::max(opts.h_min, v));
    if (c != v) m.regularized = true;
    return c;
  };
  m.lam1 = clampv(lam1);
  m.lam2 = clampv(lam2);
  m.r1 = v2;  // stretch along the small-eigenvalue direction
  return m;
}

std::vector<ElementMetric> compute_metric(const UnitCellMesh& mesh,
                                          const PatchData& patches, double tol,
                                          const MetricOptions& opts) {
  const int nt = mesh.num_triangles();
  std::vector<ElementMetric> out(nt);
  for (int t = 0; t < nt; ++t) {
    const ElementGeometry geom = element_anisotropy(mesh, t);
    out[t] = metric_from_patch(patches.G[t], patches.patch_area[t],
                               geom.lam1 * geom.lam2, tol, nt, opts);
  }
  return out;
}

double predicted_eta2(const ElementMetric& m, const Mat2& Ghat,
                      double ref_patch_area) {
  const Vec2 r2(-m.r1.y(), m.r1.x());
  const double q1 = m.r1.dot(Ghat * m.r1);
  const double q2 = r2.dot(Ghat * r2);
  return (m.lam1 * m.lam1 * q1 + m.lam2 * m.lam2 * q2) * ref_patch_area;
}

double rescale_metric_to_budget(const UnitCellMesh& mesh,
                                std::vector<ElementMetric>& metrics,
                                int max_triangles, const MetricOptions& opts) {
  double predicted = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    predicted += mesh.area(t) / (kRefElementArea * metrics[t].lam1 * metrics[t].lam2);
  if (predicted <= max_triangles) return 1.0;

  const double scale = std::sqrt(predicted / max_triangles);
  for (auto& m : metrics) {
    m.lam1 = std::min(opts.h_max, std::max(opts.h_min, m.lam1 * scale));
    m.lam2 = std::min(opts.h_max, std::max(opts.h_min, m.lam2 * scale));
  }
  return scale;
}

Mat2 metric_tensor(const ElementMetric& m) {
  const Vec2 r2(-m.r1.y(), m.r1.x());
  return m.r1 * m.r1.transpose() / (m.lam1 * m.lam1) +
         r2 * r2.transpose() / (m.lam2 * m.lam2);
}

Mat2 isotropic_metric(double h) { return Mat2::Identity() / (h * h); }

std::vector<Mat2> vertex_metric(const std::vector<ElementMetric>& metrics,
                                const UnitCellMesh& mesh) {
  if ((int)metrics.size() != mesh.num_triangles())
    throw std::invalid_argument("metric size does not match mesh");
  std::vector<Mat2> out(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& tris = mesh.incident_triangles(v);
    if (tris.empty())
      throw MeshIntegrityError("vertex " + std::to_string(v) +
                               " has no incident elements");
    Mat2 acc = Mat2::Zero();
    for (int t : tris) acc += metric_tensor(metrics[t]);
    out[v] = acc / double(tris.size());
  }
  return out;
}

}  // namespace cellopt
