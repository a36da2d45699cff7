#pragma once

// Exhaustive contour enumeration and the derived shape table.
//
// enumerate_through grows connected edge sets out of a fixed plaquette by
// depth-first search and records every closed one.  The shape table
// canonicalizes those contours into translation classes and precomputes the
// offset sets that the samplers hit in hot loops: which translates of a shape
// cover a given plaquette, and which translates of one shape are incompatible
// with another.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "loopgas/lattice.hpp"

namespace loopgas {

// Every contour gamma with p in gamma and |gamma| <= n_max, sorted by
// (size, lexicographic).  Empty when n_max < 4.
std::vector<Contour> enumerate_through(const Plaquette& p, int n_max);

struct Shape {
  Contour form;  // anchored: lexicographically smallest plaquette at (0,0)
  // Vertex bounding box of the form, tips included.
  std::int32_t vx_min = 0, vx_max = 0, vy_min = 0, vy_max = 0;
};

// A contour placed on the lattice, as (shape, translation).  The packed key
// fits a flat hash map; offsets beyond +-2^23 never occur at desk scale.
struct PlacedContour {
  std::uint32_t shape = 0;
  std::int32_t dx = 0;
  std::int32_t dy = 0;

  std::uint64_t key() const {
    return (std::uint64_t(shape) << 48) |
           (std::uint64_t(std::uint32_t(dx) & 0xffffff) << 24) |
           std::uint64_t(std::uint32_t(dy) & 0xffffff);
  }
  static PlacedContour from_key(std::uint64_t k);
  friend bool operator==(const PlacedContour&, const PlacedContour&) = default;
};

class ShapeTable {
 public:
  explicit ShapeTable(int n_max);

  int n_max() const { return n_max_; }
  const std::vector<Shape>& shapes() const { return shapes_; }
  const Shape& shape(std::uint32_t id) const { return shapes_[id]; }
  std::size_t size(std::uint32_t id) const { return shapes_[id].form.size(); }

  // Contours of size n through any fixed plaquette; both axes give the same
  // number by lattice symmetry.  Sums to through_total().
  const std::map<int, std::uint64_t>& per_plaquette_counts() const { return a_n_; }
  std::uint64_t per_plaquette_count(int n) const;

  // Translations t such that shape id translated by t contains the plaquette
  // ((0,0), axis).  |result| = number of axis-parallel edges in the shape.
  std::span<const Vertex> covering_offsets(std::uint32_t id, int axis) const;

  // Translations t such that shape `a` at the origin and shape `b` translated
  // by t share or touch a plaquette.  t = 0 with a == b is included
  // (self-incompatibility).
  std::span<const Vertex> incompatible_offsets(std::uint32_t a, std::uint32_t b) const;

  Contour realize(const PlacedContour& pc) const;

  // Shape id of a canonical form; throws if the contour is not in the table.
  std::uint32_t id_of(const Contour& canonical_form) const;

  // Shortcut for the common lookup chain on arbitrary placements.
  std::uint32_t id_of_placed(const Contour& c) const { return id_of(canonical_shape(c)); }

 private:
  int n_max_;
  std::vector<Shape> shapes_;
  std::map<Contour, std::uint32_t> id_by_form_;
  std::map<int, std::uint64_t> a_n_;
  // covering_[2*id + axis], incompat_[a*shapes+b]
  std::vector<std::vector<Vertex>> covering_;
  std::vector<std::vector<Vertex>> incompat_;
};

// Process-wide table per cutoff, built on first use and never torn down.
// Tables are immutable, so sharing needs no further locking.
const ShapeTable& shared_shape_table(int n_max);

}  // namespace loopgas
