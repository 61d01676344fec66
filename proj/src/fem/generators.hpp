#pragma once

#include <functional>
#include <vector>

#include "fem/mesh.hpp"

namespace rivet::fem {

/// Tensor-product quad block given by its grid lines.
struct Block {
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Quad mesh from several blocks. Nodes at equal coordinates are merged
/// unless `keep_apart` returns true for that location, in which case each
/// block keeps its own copy (a slit).
Mesh merge_blocks(const std::vector<Block>& blocks,
                  const std::function<bool(const Eigen::Vector2d&)>& keep_apart = {});

/// n cells on [a, b] whose widths grow geometrically by `ratio` away from a.
std::vector<double> graded(double a, double b, int n, double ratio);

/// Adds a node set of all nodes within tol of the line y = value (or x = value).
void add_line_set(Mesh& m, const std::string& name, int axis, double value, double tol = 1e-9);

/// Unit square with a horizontal slit from the left edge to its centre,
/// rows graded toward the slit. Sets: bottom, top.
Mesh ct_mesh(int nx = 20, int ny = 20, double ratio = 1.2);

/// L-shaped panel (mm) with the re-entrant corner at (250, 250), three
/// blocks graded toward the corner. Sets: bottom, load (node nearest to
/// (470, 250)).
Mesh lshape_mesh(int n = 13, double ratio = 1.15);

}  // namespace rivet::fem
