#include "fem/element.hpp"

#include <fmt/format.h>

#include <cmath>

#include "core/error.hpp"

namespace rivet::fem {

void reference_shape(ElementType type, double xi, double eta, std::array<double, 4>& N,
                     std::array<double, 4>& dxi, std::array<double, 4>& deta) {
  if (type == ElementType::Quad4) {
    static constexpr double sx[4] = {-1, 1, 1, -1};
    static constexpr double sy[4] = {-1, -1, 1, 1};
    for (int a = 0; a < 4; ++a) {
      N[a] = 0.25 * (1 + sx[a] * xi) * (1 + sy[a] * eta);
      dxi[a] = 0.25 * sx[a] * (1 + sy[a] * eta);
      deta[a] = 0.25 * sy[a] * (1 + sx[a] * xi);
    }
  } else {
    N = {1.0 - xi - eta, xi, eta, 0.0};
    dxi = {-1.0, 1.0, 0.0, 0.0};
    deta = {-1.0, 0.0, 1.0, 0.0};
  }
}

const std::vector<RefPoint>& quadrature_rule(ElementType type) {
  static const std::vector<RefPoint> quad = [] {
    const double g = 1.0 / std::sqrt(3.0);
    return std::vector<RefPoint>{{-g, -g, 1.0}, {g, -g, 1.0}, {g, g, 1.0}, {-g, g, 1.0}};
  }();
  static const std::vector<RefPoint> tri = {
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
  };
  return type == ElementType::Quad4 ? quad : tri;
}

ElementGeometry element_geometry(const Mesh& mesh, int e) {
  const Element& el = mesh.elements[e];
  ElementGeometry g;
  g.nen = el.size();
  for (const auto& rp : quadrature_rule(el.type)) {
    QuadPoint q;
    std::array<double, 4> dxi{}, deta{};
    reference_shape(el.type, rp.xi, rp.eta, q.N, dxi, deta);
    double J00 = 0, J01 = 0, J10 = 0, J11 = 0;
    for (int a = 0; a < g.nen; ++a) {
      const auto& X = mesh.nodes[el.nodes[a]];
      J00 += dxi[a] * X.x();
      J01 += dxi[a] * X.y();
      J10 += deta[a] * X.x();
      J11 += deta[a] * X.y();
    }
    const double det = J00 * J11 - J01 * J10;
    if (!(det > 0.0)) {
      throw Error(ErrorKind::Mesh,
                  fmt::format("element {}: non-positive Jacobian ({:.3e}); check node order",
                              mesh.element_ids.empty() ? e : mesh.element_ids[e], det));
    }
    for (int a = 0; a < g.nen; ++a) {
      q.dNdx[a] = (J11 * dxi[a] - J01 * deta[a]) / det;
      q.dNdy[a] = (-J10 * dxi[a] + J00 * deta[a]) / det;
    }
    q.w = rp.weight * det;
    g.qp.push_back(q);
  }
  return g;
}

Discretization::Discretization(Mesh m) : mesh(std::move(m)) {
  mesh.validate();
  elements.reserve(mesh.elements.size());
  for (int e = 0; e < mesh.num_elements(); ++e) elements.push_back(element_geometry(mesh, e));
}

double Discretization::area() const {
  double a = 0.0;
  for (const auto& g : elements)
    for (const auto& q : g.qp) a += q.w;
  return a;
}

}  // namespace rivet::fem
