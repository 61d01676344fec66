#pragma once

#include <array>
#include <vector>

#include "fem/mesh.hpp"

namespace rivet::fem {

/// Shape function values and physical gradients at one quadrature point.
/// `w` already includes the Jacobian determinant.
struct QuadPoint {
  std::array<double, 4> N{};
  std::array<double, 4> dNdx{};
  std::array<double, 4> dNdy{};
  double w = 0.0;
};

struct ElementGeometry {
  int nen = 4;
  std::vector<QuadPoint> qp;
};

/// Reference shape functions and derivatives (xi, eta). Quad4 on [-1,1]^2,
/// tri3 on the unit triangle.
void reference_shape(ElementType type, double xi, double eta, std::array<double, 4>& N,
                     std::array<double, 4>& dN_dxi, std::array<double, 4>& dN_deta);

struct RefPoint {
  double xi, eta, weight;
};
/// 2x2 Gauss for quad4; 3-point interior rule for tri3.
const std::vector<RefPoint>& quadrature_rule(ElementType type);

/// Throws a mesh error naming the element when det J <= 0 at a quadrature point.
ElementGeometry element_geometry(const Mesh& mesh, int e);

/// A mesh together with its precomputed quadrature data.
struct Discretization {
  Mesh mesh;
  std::vector<ElementGeometry> elements;

  explicit Discretization(Mesh m);
  int num_nodes() const { return mesh.num_nodes(); }
  double area() const;
};

}  // namespace rivet::fem
