#include "loopgas/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace loopgas {

bool plaquettes_adjacent(const Plaquette& a, const Plaquette& b) {
  if (a == b) return false;
  const Vertex a0 = a.base(), a1 = a.tip();
  const Vertex b0 = b.base(), b1 = b.tip();
  return a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1;
}

bool plaquettes_incompatible(const Plaquette& a, const Plaquette& b) {
  return a == b || plaquettes_adjacent(a, b);
}

int plaquette_distance(const Plaquette& a, const Plaquette& b) {
  const int d = std::abs(a.x - b.x) + std::abs(a.y - b.y);
  return d + (a.axis != b.axis ? 1 : 0);
}

Contour::Contour(std::vector<Plaquette> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("contour: duplicate plaquette");
}

bool Contour::contains(const Plaquette& p) const {
  return std::binary_search(edges_.begin(), edges_.end(), p);
}

Contour Contour::translated(std::int32_t dx, std::int32_t dy) const {
  Contour out;
  out.edges_ = edges_;
  for (auto& p : out.edges_) {
    p.x += dx;
    p.y += dy;
  }
  return out;  // translation preserves sort order
}

bool all_degrees_even(std::span<const Plaquette> edges) {
  std::map<Vertex, int> deg;
  for (const auto& p : edges) {
    ++deg[p.base()];
    ++deg[p.tip()];
  }
  for (const auto& [v, d] : deg)
    if (d != 2 && d != 4) return false;
  return true;
}

bool edge_set_connected(std::span<const Plaquette> edges) {
  if (edges.empty()) return true;
  // BFS over the vertex-incidence graph.
  std::map<Vertex, std::vector<std::size_t>> at;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    at[edges[i].base()].push_back(i);
    at[edges[i].tip()].push_back(i);
  }
  std::vector<char> seen(edges.size(), 0);
  std::vector<std::size_t> stack = {0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (const Vertex v : {edges[i].base(), edges[i].tip()}) {
      for (const auto j : at[v]) {
        if (!seen[j]) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
      }
    }
  }
  return reached == edges.size();
}

bool is_contour(std::span<const Plaquette> edges) {
  if (edges.size() < 4) return false;
  return all_degrees_even(edges) && edge_set_connected(edges);
}

bool contours_incompatible(const Contour& a, const Contour& b) {
  for (const auto& p : a.edges())
    for (const auto& q : b.edges())
      if (plaquettes_incompatible(p, q)) return true;
  return false;
}

int contour_distance(const Contour& a, const Contour& b) {
  int best = plaquette_distance(a.edges().front(), b.edges().front());
  for (const auto& p : a.edges())
    for (const auto& q : b.edges())
      best = std::min(best, plaquette_distance(p, q));
  return best;
}

Contour canonical_shape(const Contour& c) {
  if (c.empty()) return c;
  const auto a = c.anchor();
  return c.translated(-a.x, -a.y);
}

std::string to_string(const Contour& c) {
  std::ostringstream os;
  bool first = true;
  for (const auto& p : c.edges()) {
    if (!first) os << ';';
    first = false;
    os << p.x << ',' << p.y << ',' << int(p.axis);
  }
  return os.str();
}

Contour contour_from_string(const std::string& s) {
  std::vector<Plaquette> edges;
  std::istringstream is(s);
  std::string part;
  while (std::getline(is, part, ';')) {
    Plaquette p;
    char c1 = 0, c2 = 0;
    int axis = 0;
    std::istringstream ps(part);
    if (!(ps >> p.x >> c1 >> p.y >> c2 >> axis) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("contour_from_string: bad token '" + part + "'");
    p.axis = static_cast<std::int8_t>(axis);
    edges.push_back(p);
  }
  return Contour(std::move(edges));
}

}  // namespace loopgas
