#include "loopgas/enumerate.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

namespace loopgas {

namespace {

// DFS state shared across the recursion.
struct Grower {
  int n_max;
  std::vector<Plaquette> edges;       // current set, kept sorted on record
  std::map<Vertex, int> degree;
  std::set<std::vector<Plaquette>> out;

  int odd_count = 0;

  void bump(const Vertex& v, int delta) {
    int& d = degree[v];
    const bool was_odd = d % 2 != 0;
    d += delta;
    const bool is_odd = d % 2 != 0;
    if (was_odd != is_odd) odd_count += is_odd ? 1 : -1;
    if (d == 0) degree.erase(v);
  }

  void add(const Plaquette& e) {
    edges.push_back(e);
    bump(e.base(), 1);
    bump(e.tip(), 1);
  }
  void remove_last() {
    const Plaquette e = edges.back();
    edges.pop_back();
    bump(e.base(), -1);
    bump(e.tip(), -1);
  }

  bool present(const Plaquette& e) const {
    return std::find(edges.begin(), edges.end(), e) != edges.end();
  }

  // Any contour is an arc-by-arc traversal of one of its Eulerian circuits, so
  // growing at the smallest odd vertex (or anywhere on the set once it closes)
  // reaches every closed edge set through the seed.
  void grow() {
    if (odd_count == 0) {
      if (edges.size() >= 4) {
        auto sorted = edges;
        std::sort(sorted.begin(), sorted.end());
        out.insert(std::move(sorted));
      }
      if (int(edges.size()) + 4 > n_max) return;  // re-closing costs >= one more loop
      // Expand from any touched vertex; duplicates collapse in `out` and the
      // candidate ordering keeps the walk finite.
      std::vector<Plaquette> cands;
      for (const auto& [v, d] : degree) {
        (void)d;
        for (const Plaquette e : incident(v))
          if (!present(e)) cands.push_back(e);
      }
      std::sort(cands.begin(), cands.end());
      cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      for (const auto& e : cands) {
        add(e);
        grow();
        remove_last();
      }
      return;
    }
    if (int(edges.size()) + odd_count / 2 > n_max) return;  // each edge fixes <= 2 odd vertices
    Vertex target{};
    bool found = false;
    for (const auto& [v, d] : degree) {
      if (d % 2 != 0) {
        target = v;
        found = true;
        break;  // map iteration is ordered, so this is the smallest odd vertex
      }
    }
    if (!found) return;
    for (const Plaquette e : incident(target)) {
      if (present(e)) continue;
      add(e);
      grow();
      remove_last();
    }
  }

  static std::array<Plaquette, 4> incident(const Vertex& v) {
    return {Plaquette{v.x, v.y, 0}, Plaquette{v.x - 1, v.y, 0}, Plaquette{v.x, v.y, 1},
            Plaquette{v.x, v.y - 1, 1}};
  }
};

}  // namespace

std::vector<Contour> enumerate_through(const Plaquette& p, int n_max) {
  std::vector<Contour> result;
  if (n_max < 4) return result;
  Grower g;
  g.n_max = n_max;
  g.add(p);
  g.grow();
  result.reserve(g.out.size());
  for (const auto& edges : g.out) result.emplace_back(edges);
  std::sort(result.begin(), result.end(), [](const Contour& a, const Contour& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return result;
}

PlacedContour PlacedContour::from_key(std::uint64_t k) {
  PlacedContour pc;
  pc.shape = std::uint32_t(k >> 48);
  // Sign-extend the 24-bit offsets.
  pc.dx = std::int32_t(std::uint32_t(k >> 24) & 0xffffff) << 8 >> 8;
  pc.dy = std::int32_t(std::uint32_t(k) & 0xffffff) << 8 >> 8;
  return pc;
}

ShapeTable::ShapeTable(int n_max) : n_max_(n_max) {
  if (n_max < 4) throw std::invalid_argument("ShapeTable: n_max below smallest contour");
  // Every contour has a horizontal edge, so canonicalizing the contours
  // through one horizontal plaquette yields every translation class.
  const Plaquette anchor{0, 0, 0};
  for (const auto& c : enumerate_through(anchor, n_max)) {
    ++a_n_[int(c.size())];
    auto canon = canonical_shape(c);
    if (id_by_form_.emplace(canon, std::uint32_t(shapes_.size())).second) {
      Shape s;
      s.form = std::move(canon);
      s.vx_min = s.vy_min = INT32_MAX;
      s.vx_max = s.vy_max = INT32_MIN;
      for (const auto& e : s.form.edges()) {
        for (const Vertex v : {e.base(), e.tip()}) {
          s.vx_min = std::min(s.vx_min, v.x);
          s.vx_max = std::max(s.vx_max, v.x);
          s.vy_min = std::min(s.vy_min, v.y);
          s.vy_max = std::max(s.vy_max, v.y);
        }
      }
      shapes_.push_back(std::move(s));
    }
  }

  covering_.resize(shapes_.size() * 2);
  for (std::uint32_t id = 0; id < shapes_.size(); ++id) {
    for (int axis = 0; axis < 2; ++axis) {
      auto& offs = covering_[2 * id + axis];
      for (const auto& e : shapes_[id].form.edges())
        if (e.axis == axis) offs.push_back({-e.x, -e.y});  // moves e onto ((0,0),axis)
      std::sort(offs.begin(), offs.end());
    }
  }

  // Pairwise incompatible offsets, dense scan over the Minkowski window.
  incompat_.resize(shapes_.size() * shapes_.size());
  for (std::uint32_t a = 0; a < shapes_.size(); ++a) {
    const Shape& sa = shapes_[a];
    for (std::uint32_t b = 0; b < shapes_.size(); ++b) {
      const Shape& sb = shapes_[b];
      auto& offs = incompat_[a * shapes_.size() + b];
      // b+t touches a only if the vertex boxes overlap after inflating by 1.
      for (int dx = sa.vx_min - sb.vx_max - 1; dx <= sa.vx_max - sb.vx_min + 1; ++dx)
        for (int dy = sa.vy_min - sb.vy_max - 1; dy <= sa.vy_max - sb.vy_min + 1; ++dy)
          if (contours_incompatible(sa.form, sb.form.translated(dx, dy)))
            offs.push_back({dx, dy});
    }
  }
}

std::uint64_t ShapeTable::per_plaquette_count(int n) const {
  auto it = a_n_.find(n);
  return it == a_n_.end() ? 0 : it->second;
}

std::span<const Vertex> ShapeTable::covering_offsets(std::uint32_t id, int axis) const {
  return covering_[2 * id + axis];
}

std::span<const Vertex> ShapeTable::incompatible_offsets(std::uint32_t a, std::uint32_t b) const {
  return incompat_[a * shapes_.size() + b];
}

Contour ShapeTable::realize(const PlacedContour& pc) const {
  return shapes_[pc.shape].form.translated(pc.dx, pc.dy);
}

std::uint32_t ShapeTable::id_of(const Contour& canonical_form) const {
  auto it = id_by_form_.find(canonical_form);
  if (it == id_by_form_.end()) throw std::out_of_range("ShapeTable: unknown shape");
  return it->second;
}

const ShapeTable& shared_shape_table(int n_max) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<ShapeTable>> tables;
  std::scoped_lock lock(mutex);
  auto it = tables.find(n_max);
  if (it == tables.end())
    it = tables.emplace(n_max, std::make_unique<ShapeTable>(n_max)).first;
  return *it->second;
}

}  // namespace loopgas
