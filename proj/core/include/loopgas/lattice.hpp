#pragma once

// Edge geometry of the square lattice.
//
// A plaquette is an undirected unit edge of Z^2, identified by its lexicographically
// smaller endpoint (the base vertex) and the axis it extends along: axis 0 runs from
// (x,y) to (x+1,y), axis 1 from (x,y) to (x,y+1).  A contour is a finite, connected
// set of plaquettes in which every touched vertex has even degree (2 or 4); the
// smallest is the unit square with 4 edges.  Two contours are incompatible when they
// share a plaquette or contain plaquettes that touch at a vertex.

#include <cstdint>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace loopgas {

struct Vertex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Plaquette {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int8_t axis = 0;  // 0 horizontal, 1 vertical

  Vertex base() const { return {x, y}; }
  Vertex tip() const { return axis == 0 ? Vertex{x + 1, y} : Vertex{x, y + 1}; }

  friend auto operator<=>(const Plaquette&, const Plaquette&) = default;
};

// True when the two edges touch at a vertex or coincide.
bool plaquettes_incompatible(const Plaquette& a, const Plaquette& b);

// Strict adjacency: shared endpoint, distinct edges.
bool plaquettes_adjacent(const Plaquette& a, const Plaquette& b);

// L1 distance on the (base vertex, axis) encoding: |dx| + |dy| plus 1 when the
// axes differ.  A true metric (zero iff equal, symmetric, triangle holds).
// Perpendicular touching pairs can land at 2 or 3 rather than 1; the half-unit
// offset between midpoints of perpendicular edges makes any integer convention
// off by one somewhere, and this encoding keeps the metric integer and cheap.
int plaquette_distance(const Plaquette& a, const Plaquette& b);

// A contour is kept sorted and duplicate-free; size() is the perimeter |gamma|.
class Contour {
 public:
  Contour() = default;
  explicit Contour(std::vector<Plaquette> edges);  // sorts, rejects duplicates

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Plaquette>& edges() const { return edges_; }
  const Plaquette& anchor() const { return edges_.front(); }  // lex-smallest edge

  bool contains(const Plaquette& p) const;
  Contour translated(std::int32_t dx, std::int32_t dy) const;

  friend auto operator<=>(const Contour&, const Contour&) = default;

 private:
  std::vector<Plaquette> edges_;
};

// Every touched vertex has degree exactly 2 or 4.
bool all_degrees_even(std::span<const Plaquette> edges);

// Connected under shared-endpoint adjacency (empty set counts as connected).
bool edge_set_connected(std::span<const Plaquette> edges);

// Closed + connected + size >= 4; the definition of a valid contour.
bool is_contour(std::span<const Plaquette> edges);

// Share an edge, or contain a touching pair.  Symmetric; gamma is always
// incompatible with itself.
bool contours_incompatible(const Contour& a, const Contour& b);

// Minimum plaquette_distance over all pairs; 0 when they share an edge.
int contour_distance(const Contour& a, const Contour& b);

// Translate so the anchor's base vertex is the origin.  Two contours are the
// same shape iff their canonical forms compare equal.
Contour canonical_shape(const Contour& c);

// "x,y,a;x,y,a;..." in sorted order; used for logs and JSON.
std::string to_string(const Contour& c);
Contour contour_from_string(const std::string& s);

}  // namespace loopgas
