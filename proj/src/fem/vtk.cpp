#include "fem/vtk.hpp"

#include <fmt/format.h>

#include <fstream>
#include <ostream>

#include "core/error.hpp"

namespace rivet::fem {

void write_vtk(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& z, const std::string& title) {
  const int n = mesh.num_nodes();
  if (u.size() != 2 * n || z.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "write_vtk: field sizes do not match the mesh");
  }
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << fmt::format("POINTS {} double\n", n);
  for (const auto& p : mesh.nodes) os << fmt::format("{:.15g} {:.15g} 0\n", p.x(), p.y());
  long size = 0;
  for (const auto& e : mesh.elements) size += 1 + e.size();
  os << fmt::format("CELLS {} {}\n", mesh.num_elements(), size);
  for (const auto& e : mesh.elements) {
    os << e.size();
    for (int a = 0; a < e.size(); ++a) os << ' ' << e.nodes[a];
    os << '\n';
  }
  os << fmt::format("CELL_TYPES {}\n", mesh.num_elements());
  for (const auto& e : mesh.elements) os << (e.type == ElementType::Quad4 ? 9 : 5) << '\n';
  os << fmt::format("POINT_DATA {}\nSCALARS z double 1\nLOOKUP_TABLE default\n", n);
  for (int i = 0; i < n; ++i) os << fmt::format("{:.15g}\n", z[i]);
  os << "VECTORS u double\n";
  for (int i = 0; i < n; ++i) os << fmt::format("{:.15g} {:.15g} 0\n", u[2 * i], u[2 * i + 1]);
}

void write_vtk_file(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& z, const std::string& title) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  write_vtk(os, mesh, u, z, title);
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace rivet::fem
