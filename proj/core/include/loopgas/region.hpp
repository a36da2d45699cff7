#pragma once

#include <cstdint>
#include <vector>

#include "loopgas/lattice.hpp"

namespace loopgas {

// Axis-aligned box of side_x by side_y unit cells with lower-left cell corner at
// (x0, y0).  An edge belongs to the box when both endpoints lie in the closed
// vertex square, so a box of side L holds L*(L+1) edges per axis.
struct Box {
  std::int32_t x0 = 0;
  std::int32_t y0 = 0;
  std::int32_t side_x = 0;
  std::int32_t side_y = 0;

  static Box square(std::int32_t side, std::int32_t x0 = 0, std::int32_t y0 = 0) {
    return Box{x0, y0, side, side};
  }

  bool contains(const Plaquette& p) const {
    if (p.axis == 0)
      return p.x >= x0 && p.x <= x0 + side_x - 1 && p.y >= y0 && p.y <= y0 + side_y;
    return p.x >= x0 && p.x <= x0 + side_x && p.y >= y0 && p.y <= y0 + side_y - 1;
  }

  bool contains(const Contour& c) const {
    for (const auto& p : c.edges())
      if (!contains(p)) return false;
    return true;
  }

  // Any plaquette of the contour inside the box.
  bool intersects(const Contour& c) const {
    for (const auto& p : c.edges())
      if (contains(p)) return true;
    return false;
  }

  std::vector<Plaquette> plaquettes() const;
  std::size_t plaquette_count() const {
    return std::size_t(side_x) * (side_y + 1) + std::size_t(side_x + 1) * side_y;
  }
};

}  // namespace loopgas
