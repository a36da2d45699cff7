#include "loopgas/region.hpp"

namespace loopgas {

std::vector<Plaquette> Box::plaquettes() const {
  std::vector<Plaquette> out;
  out.reserve(plaquette_count());
  for (std::int32_t x = x0; x <= x0 + side_x - 1; ++x)
    for (std::int32_t y = y0; y <= y0 + side_y; ++y)
      out.push_back({x, y, 0});
  for (std::int32_t x = x0; x <= x0 + side_x; ++x)
    for (std::int32_t y = y0; y <= y0 + side_y - 1; ++y)
      out.push_back({x, y, 1});
  return out;
}

}  // namespace loopgas
