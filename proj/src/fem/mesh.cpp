#include "fem/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "core/error.hpp"
#include "fem/element.hpp"

namespace rivet::fem {

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw Error(ErrorKind::Mesh, "unknown node set '" + name + "'");
  return it->second;
}

std::vector<std::array<int, 2>> Mesh::set_edges(const std::string& name) const {
  const auto& ids = node_set(name);
  const std::set<int> in(ids.begin(), ids.end());
  std::set<std::array<int, 2>> seen;
  std::vector<std::array<int, 2>> edges;
  for (const auto& el : elements) {
    const int n = el.size();
    for (int a = 0; a < n; ++a) {
      const int i = el.nodes[a], j = el.nodes[(a + 1) % n];
      if (!in.count(i) || !in.count(j)) continue;
      const std::array<int, 2> key{std::min(i, j), std::max(i, j)};
      if (seen.insert(key).second) edges.push_back({i, j});
    }
  }
  return edges;
}

void Mesh::add_set(const std::string& name, std::vector<int> ids) {
  auto& s = node_sets[name];
  s.insert(s.end(), ids.begin(), ids.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

void Mesh::validate() const {
  const int n = num_nodes();
  if (n == 0) throw Error(ErrorKind::Mesh, "mesh has no nodes");
  if (elements.empty()) throw Error(ErrorKind::Mesh, "mesh has no elements");
  for (int e = 0; e < num_elements(); ++e) {
    const auto& el = elements[e];
    const long id = element_ids.empty() ? e : element_ids[e];
    for (int a = 0; a < el.size(); ++a) {
      if (el.nodes[a] < 0 || el.nodes[a] >= n) {
        throw Error(ErrorKind::Mesh, fmt::format("element {}: node index out of range", id));
      }
      for (int b = 0; b < a; ++b) {
        if (el.nodes[a] == el.nodes[b]) {
          throw Error(ErrorKind::Mesh, fmt::format("element {}: repeated node", id));
        }
      }
    }
    element_geometry(*this, e);
  }
  for (const auto& [name, ids] : node_sets) {
    for (int i : ids) {
      if (i < 0 || i >= n) {
        throw Error(ErrorKind::Mesh, fmt::format("set '{}' references a missing node", name));
      }
    }
  }
}

Mesh read_mesh(std::istream& is) {
  Mesh m;
  std::unordered_map<long, int> index;
  struct PendingElement {
    long id;
    ElementType type;
    std::vector<long> nodes;
    int line;
  };
  std::vector<PendingElement> pending;
  std::vector<std::pair<std::string, std::vector<long>>> sets;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Mesh, fmt::format("mesh line {}: {}", lineno, msg));
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "N") {
      long id;
      double x, y;
      if (!(ls >> id >> x >> y)) fail("expected 'N <id> <x> <y>'");
      if (!index.emplace(id, m.num_nodes()).second) fail(fmt::format("duplicate node id {}", id));
      m.nodes.emplace_back(x, y);
      m.node_ids.push_back(id);
    } else if (tag == "E") {
      long id;
      std::string kind;
      if (!(ls >> id >> kind)) fail("expected 'E <id> <type> <nodes...>'");
      PendingElement pe{id, ElementType::Quad4, {}, lineno};
      int need = 0;
      if (kind == "quad4") {
        need = 4;
      } else if (kind == "tri3") {
        pe.type = ElementType::Tri3;
        need = 3;
      } else {
        fail("unknown element type '" + kind + "'");
      }
      long v;
      while (ls >> v) pe.nodes.push_back(v);
      if (static_cast<int>(pe.nodes.size()) != need) {
        fail(fmt::format("{} needs {} nodes, got {}", kind, need, pe.nodes.size()));
      }
      pending.push_back(std::move(pe));
    } else if (tag == "S") {
      std::string name;
      if (!(ls >> name)) fail("expected 'S <name> <ids...>'");
      std::vector<long> ids;
      long v;
      while (ls >> v) ids.push_back(v);
      if (!ls.eof()) fail("non-integer node id in set");
      sets.emplace_back(name, std::move(ids));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  for (const auto& pe : pending) {
    Element el;
    el.type = pe.type;
    for (std::size_t a = 0; a < pe.nodes.size(); ++a) {
      auto it = index.find(pe.nodes[a]);
      if (it == index.end()) {
        throw Error(ErrorKind::Mesh,
                    fmt::format("mesh line {}: element {} references unknown node {}", pe.line,
                                pe.id, pe.nodes[a]));
      }
      el.nodes[a] = it->second;
    }
    m.elements.push_back(el);
    m.element_ids.push_back(pe.id);
  }
  for (auto& [name, ids] : sets) {
    std::vector<int> idx;
    for (long id : ids) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw Error(ErrorKind::Mesh, fmt::format("set '{}' references unknown node {}", name, id));
      }
      idx.push_back(it->second);
    }
    m.add_set(name, std::move(idx));
  }
  m.validate();
  return m;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open mesh file " + path);
  return read_mesh(is);
}

void write_mesh(std::ostream& os, const Mesh& m) {
  auto nid = [&](int i) { return m.node_ids.empty() ? static_cast<long>(i + 1) : m.node_ids[i]; };
  for (int i = 0; i < m.num_nodes(); ++i) {
    os << fmt::format("N {} {:.17g} {:.17g}\n", nid(i), m.nodes[i].x(), m.nodes[i].y());
  }
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto& el = m.elements[e];
    os << fmt::format("E {} {}", m.element_ids.empty() ? e + 1 : m.element_ids[e],
                      el.type == ElementType::Quad4 ? "quad4" : "tri3");
    for (int a = 0; a < el.size(); ++a) os << ' ' << nid(el.nodes[a]);
    os << '\n';
  }
  for (const auto& [name, ids] : m.node_sets) {
    os << "S " << name;
    for (int i : ids) os << ' ' << nid(i);
    os << '\n';
  }
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh structured_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                          bool triangles) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) {
    throw Error(ErrorKind::InvalidArgument, "structured_rectangle: bad extents");
  }
  Mesh m;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.nodes.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
      m.node_ids.push_back(id(i, j) + 1);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (triangles) {
        m.elements.push_back({ElementType::Tri3, {a, b, c, 0}});
        m.elements.push_back({ElementType::Tri3, {a, c, d, 0}});
      } else {
        m.elements.push_back({ElementType::Quad4, {a, b, c, d}});
      }
    }
  }
  for (int e = 0; e < m.num_elements(); ++e) m.element_ids.push_back(e + 1);
  std::vector<int> left, right, bottom, top;
  for (int j = 0; j <= ny; ++j) {
    left.push_back(id(0, j));
    right.push_back(id(nx, j));
  }
  for (int i = 0; i <= nx; ++i) {
    bottom.push_back(id(i, 0));
    top.push_back(id(i, ny));
  }
  m.add_set("left", left);
  m.add_set("right", right);
  m.add_set("bottom", bottom);
  m.add_set("top", top);
  return m;
}

}  // namespace rivet::fem
