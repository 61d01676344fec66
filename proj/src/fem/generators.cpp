#include "fem/generators.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "core/error.hpp"

namespace rivet::fem {

namespace {

std::pair<long long, long long> key(const Eigen::Vector2d& p) {
  return {std::llround(p.x() * 1e9), std::llround(p.y() * 1e9)};
}

}  // namespace

std::vector<double> graded(double a, double b, int n, double ratio) {
  if (n < 1 || !(ratio > 0.0)) throw Error(ErrorKind::InvalidArgument, "graded: bad arguments");
  std::vector<double> w(n);
  double total = 0.0, cur = 1.0;
  for (int i = 0; i < n; ++i) {
    w[i] = cur;
    total += cur;
    cur *= ratio;
  }
  std::vector<double> x(n + 1);
  x[0] = a;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    x[i + 1] = a + (b - a) * acc / total;
  }
  x[n] = b;
  return x;
}

Mesh merge_blocks(const std::vector<Block>& blocks,
                  const std::function<bool(const Eigen::Vector2d&)>& keep_apart) {
  Mesh m;
  std::map<std::pair<long long, long long>, int> shared;
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    const int nx = static_cast<int>(b.xs.size()) - 1, ny = static_cast<int>(b.ys.size()) - 1;
    std::vector<int> local((nx + 1) * (ny + 1));
    std::map<std::pair<long long, long long>, int> own;
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const Eigen::Vector2d p(b.xs[i], b.ys[j]);
        const auto k = key(p);
        auto& table = (keep_apart && keep_apart(p)) ? own : shared;
        auto it = table.find(k);
        if (it == table.end()) {
          m.nodes.push_back(p);
          it = table.emplace(k, m.num_nodes() - 1).first;
        }
        local[j * (nx + 1) + i] = it->second;
      }
    }
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        auto id = [&](int a, int c) { return local[c * (nx + 1) + a]; };
        m.elements.push_back({ElementType::Quad4, {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
      }
    }
  }
  for (int n = 0; n < m.num_nodes(); ++n) m.node_ids.push_back(n + 1);
  for (int e = 0; e < m.num_elements(); ++e) m.element_ids.push_back(e + 1);
  return m;
}

void add_line_set(Mesh& m, const std::string& name, int axis, double value, double tol) {
  std::vector<int> ids;
  for (int n = 0; n < m.num_nodes(); ++n)
    if (std::abs(m.nodes[n][axis] - value) <= tol) ids.push_back(n);
  m.add_set(name, ids);
}

Mesh ct_mesh(int nx, int ny, double ratio) {
  if (nx < 2 || ny < 2 || nx % 2 || ny % 2) {
    throw Error(ErrorKind::InvalidArgument, "ct_mesh: cell counts must be even and >= 2");
  }
  std::vector<double> xs(nx + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = static_cast<double>(i) / nx;
  // Lower half graded toward y = 0.5 from above, upper half mirrored.
  std::vector<double> up = graded(0.5, 1.0, ny / 2, ratio);
  std::vector<double> lo(up.size());
  for (size_t i = 0; i < up.size(); ++i) lo[up.size() - 1 - i] = 1.0 - up[i];
  Mesh m = merge_blocks({{xs, lo}, {xs, up}}, [](const Eigen::Vector2d& p) {
    return std::abs(p.y() - 0.5) < 1e-12 && p.x() < 0.5 - 1e-12;
  });
  add_line_set(m, "bottom", 1, 0.0);
  add_line_set(m, "top", 1, 1.0);
  return m;
}

Mesh lshape_mesh(int n, double ratio) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "lshape_mesh: n must be >= 2");
  const std::vector<double> away = graded(250.0, 500.0, n, ratio);  // fine at 250
  std::vector<double> toward(away.size());
  for (size_t i = 0; i < away.size(); ++i) toward[away.size() - 1 - i] = 500.0 - away[i];  // [0, 250], fine at 250
  Mesh m = merge_blocks({{toward, toward}, {toward, away}, {away, away}});
  add_line_set(m, "bottom", 1, 0.0);
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m.num_nodes(); ++k) {
    const double d = (m.nodes[k] - Eigen::Vector2d(470.0, 250.0)).norm();
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  m.add_set("load", {best});
  return m;
}

}  // namespace rivet::fem
