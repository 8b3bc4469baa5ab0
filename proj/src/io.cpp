#include "cellopt/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cellopt {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_mesh_txt(const UnitCellMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << mesh.num_vertices() << "\n";
  for (const auto& p : mesh.vertices)
    out << format_double(p.x()) << " " << format_double(p.y()) << "\n";
  out << mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << mesh.periodic_pairs.size() << "\n";
  for (const auto& [s, m] : mesh.periodic_pairs) out << s << " " << m << "\n";
  if (!out) throw IoError("write failed: " + path);
}

UnitCellMesh read_mesh_txt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  UnitCellMesh mesh;
  int nv = 0, nt = 0, np = 0;
  if (!(in >> nv) || nv <= 0) throw IoError("bad vertex count in " + path);
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices)
    if (!(in >> p.x() >> p.y())) throw IoError("bad vertex line in " + path);
  if (!(in >> nt) || nt <= 0) throw IoError("bad triangle count in " + path);
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles)
    if (!(in >> t[0] >> t[1] >> t[2]))
      throw IoError("bad triangle line in " + path);
  if (!(in >> np) || np < 0) throw IoError("bad pair count in " + path);
  mesh.periodic_pairs.resize(np);
  for (auto& [s, m] : mesh.periodic_pairs)
    if (!(in >> s >> m)) throw IoError("bad periodic pair in " + path);
  rebuild_periodic_pairs(mesh);  // also recovers the corner group
  mesh.finalize();
  return mesh;
}

void write_vtk(const UnitCellMesh& mesh, const std::string& path,
               const VtkPointData& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# vtk DataFile Version 2.0\n";
  out << "cellopt unit cell\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices)
    out << format_double(p.x()) << " " << format_double(p.y()) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles()
      << "\n";
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";

  if (!data.scalars.empty() || !data.tensors.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << "\n";
    for (const auto& [name, values] : data.scalars) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : values) out << format_double(v) << "\n";
    }
    for (const auto& [name, tensors] : data.tensors) {
      out << "TENSORS " << name << " double\n";
      for (const Mat2& m : tensors) {
        out << format_double(m(0, 0)) << " " << format_double(m(0, 1)) << " 0\n";
        out << format_double(m(1, 0)) << " " << format_double(m(1, 1)) << " 0\n";
        out << "0 0 0\n";
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

UnitCellMesh read_vtk(const std::string& path, std::vector<double>* first_scalar) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  UnitCellMesh mesh;
  std::string line;
  bool have_points = false, have_cells = false;
  int npoints = 0;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "POINTS") {
      ls >> npoints;
      mesh.vertices.resize(npoints);
      for (auto& p : mesh.vertices) {
        double z;
        if (!(in >> p.x() >> p.y() >> z)) throw IoError("bad POINTS in " + path);
      }
      have_points = true;
    } else if (key == "CELLS" || key == "POLYGONS") {
      int ncells = 0, total = 0;
      ls >> ncells >> total;
      for (int c = 0; c < ncells; ++c) {
        int k;
        if (!(in >> k)) throw IoError("bad cell in " + path);
        std::vector<int> ids(k);
        for (int& id : ids)
          if (!(in >> id)) throw IoError("bad cell vertex in " + path);
        if (k == 3)
          mesh.triangles.push_back({ids[0], ids[1], ids[2]});
        else if (k != 1)  // silently skip vertices, reject anything else
          throw IoError("non-triangle cell in " + path);
      }
      have_cells = true;
    } else if (key == "SCALARS" && first_scalar && first_scalar->empty()) {
      std::getline(in, line);  // LOOKUP_TABLE
      first_scalar->resize(npoints);
      for (double& v : *first_scalar)
        if (!(in >> v)) throw IoError("bad SCALARS in " + path);
    }
  }
  if (!have_points || !have_cells)
    throw IoError("not a triangle mesh VTK file: " + path);

  // Reorient clockwise triangles; VTK files carry no orientation guarantee.
  for (auto& t : mesh.triangles) {
    const Vec2 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]],
               &c = mesh.vertices[t[2]];
    if ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()) < 0)
      std::swap(t[1], t[2]);
  }

  rebuild_periodic_pairs(mesh);
  mesh.finalize();
  return mesh;
}

void write_density_csv(const UnitCellMesh& mesh, const Eigen::VectorXd& rho,
                       const std::string& path) {
  if (rho.size() != mesh.num_vertices())
    throw std::invalid_argument("density size does not match mesh");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "x,y,rho\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << format_double(mesh.vertices[v].x()) << ","
        << format_double(mesh.vertices[v].y()) << ","
        << format_double(rho[v]) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

Eigen::VectorXd read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y, r;
    if (ls >> x >> y >> r) values.push_back(r);  // header line parses false
  }
  if (values.empty()) throw IoError("no density rows in " + path);
  return Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace cellopt
