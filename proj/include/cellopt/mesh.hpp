#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "cellopt/errors.hpp"

namespace cellopt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Tolerance for matching periodic partner coordinates (fraction of the cell).
inline constexpr double kPeriodicTol = 1e-9;

// Area of the reference element: equilateral triangle inscribed in the unit
// circle. Fixes the constant linking lam1*lam2 to |K|.
inline const double kRefElementArea = 3.0 * std::sqrt(3.0) / 4.0;

// Triangulation of the periodic unit cell Y = (0,1)^2. Opposite boundary
// traces are identified vertex by vertex via periodic_pairs (slave, master);
// the four corners collapse onto a single master. The mesh is immutable
// after finalize(): all queries are const and safe for concurrent reads.
class UnitCellMesh {
 public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;       // CCW vertex triples
  std::vector<std::pair<int, int>> periodic_pairs; // (slave, master)
  std::array<int, 4> corner_group{-1, -1, -1, -1}; // master first

  // Builds adjacency and the canonical (periodic representative) map and
  // checks the mesh invariants. Throws MeshIntegrityError on violation.
  void finalize();
  bool finalized() const { return finalized_; }

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double signed_area(int t) const;
  double area(int t) const { return signed_area(t); }
  Vec2 centroid(int t) const;
  double total_area() const { return total_area_; }

  // Periodic representative of a vertex (master for slaves, self otherwise).
  int canonical(int v) const { return canonical_[v]; }
  const std::vector<int>& canonical_map() const { return canonical_; }

  const std::vector<int>& incident_triangles(int v) const { return v2t_[v]; }

  // Patch Delta_K: all triangles sharing at least one vertex with t,
  // including t itself. Patches never wrap across periodic boundaries.
  std::vector<int> patch(int t) const;

  bool is_boundary_vertex(int v) const;

 private:
  void build_canonical();
  void build_adjacency();
  void validate() const;

  std::vector<std::vector<int>> v2t_;
  std::vector<int> canonical_;
  double total_area_ = 0.0;
  bool finalized_ = false;
};

// Structured mesh with n subdivisions per side; each square is split along
// the (i,j)-(i+1,j+1) diagonal. (n+1)^2 vertices, 2n^2 triangles.
UnitCellMesh build_structured_mesh(int n);

// Anisotropy of a triangle: semi-axes and directions of the ellipse
// circumscribed to K, i.e. the image of the reference element's circumcircle
// under the affine map T_K. lam1 >= lam2 > 0, r1 ⟂ r2, |r_i| = 1, and
// lam1*lam2 = |K| / kRefElementArea.
struct ElementGeometry {
  double area;
  double lam1, lam2;
  Vec2 r1, r2;
};

ElementGeometry element_anisotropy(const Vec2& a, const Vec2& b, const Vec2& c);
ElementGeometry element_anisotropy(const UnitCellMesh& mesh, int t);

// Rebuilds periodic_pairs/corner_group from vertex coordinates (used by
// import paths). Boundary vertices are matched across opposite sides within
// kPeriodicTol. Throws MeshIntegrityError when traces do not match.
void rebuild_periodic_pairs(UnitCellMesh& mesh);

}  // namespace cellopt
