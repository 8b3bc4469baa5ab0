#include "cellopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace cellopt {

namespace {

double tri_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

bool on_line(double coord, double value) {
  return std::abs(coord - value) <= kPeriodicTol;
}

}  // namespace

double UnitCellMesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  return tri_signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 UnitCellMesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

bool UnitCellMesh::is_boundary_vertex(int v) const {
  const Vec2& p = vertices[v];
  return on_line(p.x(), 0.0) || on_line(p.x(), 1.0) || on_line(p.y(), 0.0) ||
         on_line(p.y(), 1.0);
}

void UnitCellMesh::build_canonical() {
  canonical_.resize(vertices.size());
  for (int v = 0; v < num_vertices(); ++v) canonical_[v] = v;
  for (const auto& [slave, master] : periodic_pairs) canonical_[slave] = master;
  // Resolve chains (a corner slave may point to a side master that is itself
  // paired); the structured builder emits direct links but imports may not.
  for (int v = 0; v < num_vertices(); ++v) {
    int r = canonical_[v];
    int guard = 0;
    while (canonical_[r] != r) {
      r = canonical_[r];
      if (++guard > num_vertices())
        throw MeshIntegrityError("periodic pairing contains a cycle");
    }
    canonical_[v] = r;
  }
}

void UnitCellMesh::build_adjacency() {
  v2t_.assign(vertices.size(), {});
  for (int t = 0; t < num_triangles(); ++t)
    for (int v : triangles[t]) v2t_[v].push_back(t);
}

void UnitCellMesh::validate() const {
  const int nv = num_vertices();
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles[t])
      if (v < 0 || v >= nv)
        throw MeshIntegrityError("triangle references missing vertex");
    if (signed_area(t) <= 0.0)
      throw MeshIntegrityError("triangle " + std::to_string(t) +
                               " has non-positive area");
  }

  // Manifold edges: every edge in at most two triangles, and edges with a
  // single triangle must lie on the boundary of Y.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) throw MeshIntegrityError("non-manifold edge");
    if (count == 1) {
      const Vec2& p = vertices[edge.first];
      const Vec2& q = vertices[edge.second];
      bool on_side =
          (on_line(p.x(), 0.0) && on_line(q.x(), 0.0)) ||
          (on_line(p.x(), 1.0) && on_line(q.x(), 1.0)) ||
          (on_line(p.y(), 0.0) && on_line(q.y(), 0.0)) ||
          (on_line(p.y(), 1.0) && on_line(q.y(), 1.0));
      if (!on_side)
        throw MeshIntegrityError("boundary edge not on the cell boundary");
    }
  }

  // Slave/master coordinates must match modulo 1 in the periodic direction.
  for (const auto& [slave, master] : periodic_pairs) {
    Vec2 d = vertices[slave] - vertices[master];
    double dx = std::abs(d.x()) < 0.5 ? std::abs(d.x()) : std::abs(std::abs(d.x()) - 1.0);
    double dy = std::abs(d.y()) < 0.5 ? std::abs(d.y()) : std::abs(std::abs(d.y()) - 1.0);
    if (dx > kPeriodicTol || dy > kPeriodicTol)
      throw MeshIntegrityError("periodic pair coordinates do not match");
  }

  // Boundary traces on opposite sides must match one-to-one.
  auto trace = [&](int axis, double value) {
    std::vector<double> coords;
    for (int v = 0; v < nv; ++v)
      if (on_line(vertices[v][axis], value))
        coords.push_back(vertices[v][1 - axis]);
    std::sort(coords.begin(), coords.end());
    return coords;
  };
  for (int axis = 0; axis < 2; ++axis) {
    auto lo = trace(axis, 0.0), hi = trace(axis, 1.0);
    if (lo.size() != hi.size())
      throw MeshIntegrityError("opposite boundary traces differ in size");
    for (size_t i = 0; i < lo.size(); ++i)
      if (std::abs(lo[i] - hi[i]) > kPeriodicTol)
        throw MeshIntegrityError("opposite boundary traces do not match");
  }
}

void UnitCellMesh::finalize() {
  build_canonical();
  build_adjacency();
  validate();
  total_area_ = 0.0;
  for (int t = 0; t < num_triangles(); ++t) total_area_ += signed_area(t);
  finalized_ = true;
}

std::vector<int> UnitCellMesh::patch(int t) const {
  std::vector<int> out;
  for (int v : triangles[t])
    out.insert(out.end(), v2t_[v].begin(), v2t_[v].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

UnitCellMesh build_structured_mesh(int n) {
  if (n < 1) throw std::invalid_argument("subdivision count must be >= 1");
  UnitCellMesh mesh;
  const int stride = n + 1;
  auto vid = [stride](int i, int j) { return j * stride + i; };

  mesh.vertices.reserve(stride * stride);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(double(i) / n, double(j) / n);

  mesh.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }

  for (int j = 1; j < n; ++j) mesh.periodic_pairs.push_back({vid(n, j), vid(0, j)});
  for (int i = 1; i < n; ++i) mesh.periodic_pairs.push_back({vid(i, n), vid(i, 0)});
  mesh.periodic_pairs.push_back({vid(n, 0), vid(0, 0)});
  mesh.periodic_pairs.push_back({vid(0, n), vid(0, 0)});
  mesh.periodic_pairs.push_back({vid(n, n), vid(0, 0)});
  mesh.corner_group = {vid(0, 0), vid(n, 0), vid(0, n), vid(n, n)};

  mesh.finalize();
  return mesh;
}

ElementGeometry element_anisotropy(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double area = tri_signed_area(a, b, c);
  if (std::abs(area) < 1e-14)
    throw DegenerateElementError("zero-area triangle");

  // Affine map from the reference equilateral triangle inscribed in the unit
  // circle; the singular values/vectors of its Jacobian give the semi-axes
  // of the circumscribed ellipse.
  static const Mat2 ref_inv = [] {
    const Vec2 q0(1.0, 0.0);
    const Vec2 q1(-0.5, std::sqrt(3.0) / 2.0);
    const Vec2 q2(-0.5, -std::sqrt(3.0) / 2.0);
    Mat2 R;
    R.col(0) = q1 - q0;
    R.col(1) = q2 - q0;
    return Mat2(R.inverse());
  }();

  Mat2 P;
  P.col(0) = b - a;
  P.col(1) = c - a;
  const Mat2 J = P * ref_inv;

  Eigen::SelfAdjointEigenSolver<Mat2> eig(J * J.transpose());
  ElementGeometry g;
  g.area = area;
  g.lam2 = std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
  g.lam1 = std::sqrt(std::max(eig.eigenvalues()(1), 0.0));
  g.r1 = eig.eigenvectors().col(1);
  g.r2 = Vec2(-g.r1.y(), g.r1.x());
  return g;
}

ElementGeometry element_anisotropy(const UnitCellMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return element_anisotropy(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                            mesh.vertices[tri[2]]);
}

void rebuild_periodic_pairs(UnitCellMesh& mesh) {
  mesh.periodic_pairs.clear();

  const int nv = mesh.num_vertices();
  int c00 = -1, c10 = -1, c01 = -1, c11 = -1;
  std::vector<std::pair<double, int>> left, right, bottom, top;
  for (int v = 0; v < nv; ++v) {
    const Vec2& p = mesh.vertices[v];
    const bool x0 = on_line(p.x(), 0.0), x1 = on_line(p.x(), 1.0);
    const bool y0 = on_line(p.y(), 0.0), y1 = on_line(p.y(), 1.0);
    if (x0 && y0) { c00 = v; continue; }
    if (x1 && y0) { c10 = v; continue; }
    if (x0 && y1) { c01 = v; continue; }
    if (x1 && y1) { c11 = v; continue; }
    if (x0) left.push_back({p.y(), v});
    if (x1) right.push_back({p.y(), v});
    if (y0) bottom.push_back({p.x(), v});
    if (y1) top.push_back({p.x(), v});
  }
  if (c00 < 0 || c10 < 0 || c01 < 0 || c11 < 0)
    throw MeshIntegrityError("unit cell corners missing");

  auto pair_sides = [&](std::vector<std::pair<double, int>>& master,
                        std::vector<std::pair<double, int>>& slave) {
    std::sort(master.begin(), master.end());
    std::sort(slave.begin(), slave.end());
    if (master.size() != slave.size())
      throw MeshIntegrityError("opposite boundary traces differ in size");
    for (size_t i = 0; i < master.size(); ++i) {
      if (std::abs(master[i].first - slave[i].first) > kPeriodicTol)
        throw MeshIntegrityError("opposite boundary traces do not match");
      mesh.periodic_pairs.push_back({slave[i].second, master[i].second});
    }
  };
  pair_sides(left, right);
  pair_sides(bottom, top);

  mesh.periodic_pairs.push_back({c10, c00});
  mesh.periodic_pairs.push_back({c01, c00});
  mesh.periodic_pairs.push_back({c11, c00});
  mesh.corner_group = {c00, c10, c01, c11};
}

}  // namespace cellopt
