#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cellopt/fem.hpp"
#include "cellopt/mesh.hpp"

namespace cellopt {

// Recovered gradient per element: area-weighted patch average of the raw
// P1 gradient,  P(grad rho)|_K = (1/|D_K|) sum_{T in D_K} |T| grad(rho)|_T.
std::vector<Vec2> recover_gradient(const UnitCellMesh& mesh,
                                   const Eigen::VectorXd& rho);

// Per-element patch matrix of the recovered error E = P(grad) - grad,
//   G_K[i][j] = sum_{T in D_K} |T| E_i|_T E_j|_T,
// together with the patch area |D_K|. E is elementwise constant, so the
// integration is exact.
struct PatchData {
  std::vector<Mat2> G;
  std::vector<double> patch_area;
};
PatchData patch_gradient_matrices(const UnitCellMesh& mesh,
                                  const Eigen::VectorXd& rho);

// eta_K^2 = (lam1*lam2)^{-1} sum_i lam_i^2 (r_i^T G_K r_i).
double element_eta2(const ElementGeometry& geom, const Mat2& G);

struct LocalEstimate {
  std::vector<double> eta2;  // per element
  double eta2_total = 0.0;
};
LocalEstimate local_estimator(const UnitCellMesh& mesh,
                              const Eigen::VectorXd& rho);

struct MetricOptions {
  double aspect_max = 100.0;  // cap on lam1/lam2
  double h_min = 1e-3;
  double h_max = 0.5;
};

struct ElementMetric {
  double lam1 = 0, lam2 = 0;  // target lengths, lam1 >= lam2
  Vec2 r1 = Vec2(1, 0);       // direction of lam1; r2 is the orthogonal
  bool regularized = false;   // an eigenvalue floor or length clamp fired
};

// Optimal metric of one element: eigen-decompose Ghat = G/|D_K| with
// g1 >= g2 > 0 (after floor regularization) and set
//   lam1 = g2^{-1/2} sqrt(TOL^2 / (2 nT |Dhat_K|)),   r1 = eigvec(g2),
//   lam2 = g1^{-1/2} sqrt(TOL^2 / (2 nT |Dhat_K|)),
// with |Dhat_K| = |D_K|/(lam1_K lam2_K) the patch area pulled back through
// the current element map.
ElementMetric metric_from_patch(const Mat2& G, double patch_area,
                                double lam12_K, double tol, int n_triangles,
                                const MetricOptions& opts);

std::vector<ElementMetric> compute_metric(const UnitCellMesh& mesh,
                                          const PatchData& patches, double tol,
                                          const MetricOptions& opts = {});

// Error the metric predicts for its own element once equidistributed:
// [lam1^2 (r1' Ghat r1) + lam2^2 (r2' Ghat r2)] * |Dhat_K|. Equals
// TOL^2 / nT on elements where no regularization fired.
double predicted_eta2(const ElementMetric& m, const Mat2& Ghat,
                      double ref_patch_area);

// Uniformly rescales target lengths so the predicted cardinality
// sum_K |K| / (ref_area * lam1 lam2) stays within `max_triangles`;
// grading and anisotropy ratios are preserved. Returns the scale factor.
double rescale_metric_to_budget(const UnitCellMesh& mesh,
                                std::vector<ElementMetric>& metrics,
                                int max_triangles, const MetricOptions& opts);

// Per-vertex SPD metric tensors: arithmetic mean over incident elements of
// M_K = R diag(lam1^-2, lam2^-2) R^T.
std::vector<Mat2> vertex_metric(const std::vector<ElementMetric>& metrics,
                                const UnitCellMesh& mesh);

Mat2 metric_tensor(const ElementMetric& m);
Mat2 isotropic_metric(double h);

}  // namespace cellopt
