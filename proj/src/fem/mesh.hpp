#pragma once

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rivet::fem {

enum class ElementType { Quad4, Tri3 };

struct Element {
  ElementType type = ElementType::Quad4;
  std::array<int, 4> nodes{{0, 0, 0, 0}};  ///< counter-clockwise; tri3 uses the first three

  int size() const { return type == ElementType::Quad4 ? 4 : 3; }
};

/// Nodes in mm, elements as zero-based node indices, named node sets.
/// External ids from the mesh file are kept for error messages and output.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<Element> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::vector<long> node_ids;
  std::vector<long> element_ids;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  /// Throws a mesh error naming the set when it does not exist.
  const std::vector<int>& node_set(const std::string& name) const;

  /// Element edges whose two end nodes both belong to the set.
  std::vector<std::array<int, 2>> set_edges(const std::string& name) const;

  /// Index range, duplicate nodes within an element, set references, and a
  /// positive Jacobian at every quadrature point.
  void validate() const;

  void add_set(const std::string& name, std::vector<int> nodes);
};

/// Plain-text format, one record per line:
///   N <id> <x> <y>
///   E <id> quad4|tri3 <n1> <n2> <n3> [<n4>]
///   S <name> <id> <id> ...
/// '#' starts a comment. Several S lines with the same name are merged.
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

/// nx-by-ny quad4 grid on [x0,x1]x[y0,y1] with sets left/right/bottom/top.
Mesh structured_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                          bool triangles = false);

}  // namespace rivet::fem
