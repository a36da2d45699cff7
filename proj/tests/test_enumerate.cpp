#include "loopgas/enumerate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "loopgas/lattice.hpp"

using namespace loopgas;

namespace {

// ---------------------------------------------------------------------------
// Oracle 1: literal brute force.  Slide a window of boxes over all positions
// containing p and test is_contour on every edge subset of the right parity
// that includes p.  Only feasible for n <= 6 (the subset count explodes after
// that), which is exactly the regime where we want a second opinion that makes
// no structural assumptions at all.
// ---------------------------------------------------------------------------
std::set<std::vector<Plaquette>> brute_force_through(const Plaquette& p, int n_max) {
  std::set<std::vector<Plaquette>> found;
  const int side = n_max / 2 + 1;  // window side in cells
  // Window with lower-left vertex (x0,y0) holds vertices [x0,x0+side]^2.
  const int px1 = p.axis == 0 ? p.x + 1 : p.x;
  const int py1 = p.axis == 0 ? p.y : p.y + 1;
  for (int x0 = px1 - side; x0 <= p.x; ++x0) {
    for (int y0 = py1 - side; y0 <= p.y; ++y0) {
      std::vector<Plaquette> window;
      for (int x = x0; x <= x0 + side; ++x)
        for (int y = y0; y <= y0 + side; ++y) {
          if (x < x0 + side) window.push_back({x, y, 0});
          if (y < y0 + side) window.push_back({x, y, 1});
        }
      // Subsets that contain p: choose k-1 of the others, k = 4 or 6.
      std::vector<Plaquette> others;
      for (const auto& q : window)
        if (!(q == p)) others.push_back(q);
      const int m = int(others.size());
      for (int k = 4; k <= n_max; k += 2) {
        std::vector<int> idx(k - 1);
        for (int i = 0; i < k - 1; ++i) idx[i] = i;
        while (true) {
          std::vector<Plaquette> cand;
          cand.reserve(k);
          cand.push_back(p);
          for (int i : idx) cand.push_back(others[i]);
          std::sort(cand.begin(), cand.end());
          if (is_contour(cand)) found.insert(cand);
          // next combination
          int i = k - 2;
          while (i >= 0 && idx[i] == m - (k - 1) + i) --i;
          if (i < 0) break;
          ++idx[i];
          for (int j = i + 1; j < k - 1; ++j) idx[j] = idx[j - 1] + 1;
        }
      }
    }
  }
  return found;
}

// ---------------------------------------------------------------------------
// Oracle 2: cell-set boundaries.  Every finite edge set with even vertex
// degrees is the boundary of a unique finite set of unit cells, so contours
// through p of size n are exactly the connected boundaries dS with |dS| = n
// where S contains exactly one of the two cells flanking p.  Enumerating cell
// subsets (|S| <= 6 suffices for n <= 10: seven cells force perimeter >= 12)
// is vastly cheaper than enumerating edge subsets, and shares no code with the
// DFS under test.
// ---------------------------------------------------------------------------
struct CellOracle {
  std::map<int, std::uint64_t> count_by_size;  // contours through p, by |dS|
};

// Multiplicity grid sized for cell coordinates in [-8, 8); edges kept once.
struct BoundaryScratch {
  static constexpr int kHalf = 8, kSide = 2 * kHalf + 2;
  std::vector<std::uint8_t> mult = std::vector<std::uint8_t>(kSide * kSide * 2, 0);
  std::vector<int> touched;

  static int index(int x, int y, int axis) {
    return ((x + kHalf) * kSide + (y + kHalf)) * 2 + axis;
  }

  std::vector<Plaquette> edges;

  const std::vector<Plaquette>& boundary(const std::vector<std::pair<int, int>>& cells) {
    touched.clear();
    auto bump = [&](int x, int y, int axis) {
      const int i = index(x, y, axis);
      if (mult[i]++ == 0) touched.push_back(i);
    };
    for (auto [cx, cy] : cells) {
      bump(cx, cy, 0);
      bump(cx, cy + 1, 0);
      bump(cx, cy, 1);
      bump(cx + 1, cy, 1);
    }
    edges.clear();
    for (int i : touched) {
      if (mult[i] == 1) {
        const int axis = i % 2, rest = i / 2;
        edges.push_back({rest / kSide - kHalf, rest % kSide - kHalf, std::int8_t(axis)});
      }
      mult[i] = 0;
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  }
};

CellOracle cell_oracle_through(const Plaquette& p, int n_max) {
  CellOracle out;
  // The two cells flanking p; exactly one must lie in S for p to sit on dS.
  const std::pair<int, int> flank[2] = {
      p.axis == 0 ? std::pair<int, int>{p.x, p.y} : std::pair<int, int>{p.x, p.y},
      p.axis == 0 ? std::pair<int, int>{p.x, p.y - 1} : std::pair<int, int>{p.x - 1, p.y}};
  // Any cell of a qualifying S sits within this window around p.
  std::vector<std::pair<int, int>> window;
  for (int cx = p.x - 4; cx <= p.x + 3; ++cx)
    for (int cy = p.y - 4; cy <= p.y + 3; ++cy) window.push_back({cx, cy});

  const int max_cells = n_max / 2 + 1;  // perimeter of k cells is >= 2*ceil(2*sqrt(k))
  BoundaryScratch scratch;
  for (int which = 0; which < 2; ++which) {
    const auto inside = flank[which];
    const auto outside = flank[1 - which];
    std::vector<std::pair<int, int>> others;
    for (auto c : window)
      if (c != inside && c != outside) others.push_back(c);
    const int m = int(others.size());
    // All subsets of `others` of size <= max_cells-1, plus the forced cell.
    std::vector<int> idx;
    std::vector<std::pair<int, int>> cells = {inside};
    // Iterative combination enumeration over sizes.
    for (int extra = 0; extra + 1 <= max_cells; ++extra) {
      idx.assign(extra, 0);
      for (int i = 0; i < extra; ++i) idx[i] = i;
      if (extra > m) break;
      while (true) {
        cells.resize(1);
        for (int i : idx) cells.push_back(others[i]);
        const auto& edges = scratch.boundary(cells);
        const int n = int(edges.size());
        if (n <= n_max && n >= 4 && edge_set_connected(edges)) {
          // p is on dS by the flank constraint; assert anyway.
          EXPECT_TRUE(std::find(edges.begin(), edges.end(), p) != edges.end());
          ++out.count_by_size[n];
        }
        if (extra == 0) break;
        int i = extra - 1;
        while (i >= 0 && idx[i] == m - extra + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < extra; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  return out;
}

std::map<int, std::uint64_t> counts_by_size(const std::vector<Contour>& list) {
  std::map<int, std::uint64_t> m;
  for (const auto& c : list) ++m[int(c.size())];
  return m;
}

}  // namespace

// Counts through a fixed plaquette, frozen from the two oracles above before
// the DFS existed: a_4 = 2, a_6 = 6, a_8 = 36, a_10 = 180.  One oracle run
// serves both the frozen-count check and the cross-check against the DFS;
// each TEST is its own process, so shared work has to live in one body.
TEST(EnumerationOracles, CellCountsFrozenAndMatchSearch) {
  const Plaquette p{0, 0, 0};
  auto cells = cell_oracle_through(p, 10);
  EXPECT_EQ(cells.count_by_size[4], 2u);
  EXPECT_EQ(cells.count_by_size[6], 6u);
  EXPECT_EQ(cells.count_by_size[8], 36u);
  EXPECT_EQ(cells.count_by_size[10], 180u);
  EXPECT_EQ(counts_by_size(enumerate_through(p, 10)), cells.count_by_size);
}

TEST(EnumerationOracles, BruteForceAgreesAtSix) {
  // Vertical anchor this time; the two oracle mechanisms share nothing.
  const Plaquette p{2, -1, 1};
  auto brute = brute_force_through(p, 6);
  auto by_size = std::map<int, std::uint64_t>{};
  for (const auto& c : brute) ++by_size[int(c.size())];
  EXPECT_EQ(by_size[4], 2u);
  EXPECT_EQ(by_size[6], 6u);
  EXPECT_EQ(by_size, cell_oracle_through(p, 6).count_by_size);

  auto got = enumerate_through(p, 6);
  ASSERT_EQ(got.size(), brute.size());
  for (const auto& c : got) EXPECT_TRUE(brute.count(c.edges()));
}

TEST(EnumerateThrough, EmptyBelowMinimalLoop) {
  EXPECT_TRUE(enumerate_through({0, 0, 0}, 3).empty());
  EXPECT_TRUE(enumerate_through({0, 0, 0}, 0).empty());
}

TEST(EnumerateThrough, TwoSquaresAtFour) {
  auto got = enumerate_through({0, 0, 0}, 4);
  ASSERT_EQ(got.size(), 2u);
  for (const auto& c : got) {
    EXPECT_EQ(c.size(), 4u);
    EXPECT_TRUE(c.contains({0, 0, 0}));
    EXPECT_TRUE(is_contour(c.edges()));
  }
  EXPECT_TRUE(got[0] < got[1] || got[1] < got[0]);
}

TEST(EnumerateThrough, SortedDeduplicatedValid) {
  auto got = enumerate_through({0, 0, 0}, 8);
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_TRUE(is_contour(got[i].edges()));
    EXPECT_TRUE(got[i].contains({0, 0, 0}));
    EXPECT_EQ(got[i].size() % 2, 0u);  // closure parity
    if (i + 1 < got.size()) {
      const bool size_order = got[i].size() < got[i + 1].size();
      const bool lex_order = got[i].size() == got[i + 1].size() && got[i] < got[i + 1];
      EXPECT_TRUE(size_order || lex_order);
    }
  }
}

TEST(EnumerateThrough, CountsIndependentOfAnchor) {
  auto base = counts_by_size(enumerate_through({0, 0, 0}, 8));
  EXPECT_EQ(counts_by_size(enumerate_through({7, -3, 0}, 8)), base);
  EXPECT_EQ(counts_by_size(enumerate_through({0, 0, 1}, 8)), base);
  EXPECT_EQ(counts_by_size(enumerate_through({-2, 5, 1}, 8)), base);
}

TEST(ShapeTable, PerPlaquetteCountsMatchEnumeration) {
  ShapeTable t(10);
  EXPECT_EQ(t.per_plaquette_count(4), 2u);
  EXPECT_EQ(t.per_plaquette_count(6), 6u);
  EXPECT_EQ(t.per_plaquette_count(8), 36u);
  EXPECT_EQ(t.per_plaquette_count(10), 180u);
  // Shape classes: 1 + 2 + 9 + 36; counts relate by a_n = n * classes_n / 2.
  std::map<int, int> classes;
  for (const auto& s : t.shapes()) ++classes[int(s.form.size())];
  EXPECT_EQ(classes[4], 1);
  EXPECT_EQ(classes[6], 2);
  EXPECT_EQ(classes[8], 9);
  EXPECT_EQ(classes[10], 36);
}

TEST(ShapeTable, CoveringOffsetsAreExactlyTheCoveringTranslates) {
  ShapeTable t(8);
  for (std::uint32_t id = 0; id < t.shapes().size(); ++id) {
    for (int axis = 0; axis < 2; ++axis) {
      const Plaquette target{0, 0, std::int8_t(axis)};
      auto offs = t.covering_offsets(id, axis);
      std::set<std::pair<int, int>> offset_set;
      for (const auto& v : offs) offset_set.insert({v.x, v.y});
      EXPECT_EQ(offset_set.size(), offs.size());
      // Every listed translate covers the target...
      for (const auto& v : offs)
        EXPECT_TRUE(t.shape(id).form.translated(v.x, v.y).contains(target));
      // ...and the count equals the number of axis-parallel edges.
      std::size_t parallel = 0;
      for (const auto& e : t.shape(id).form.edges())
        if (e.axis == axis) ++parallel;
      EXPECT_EQ(offs.size(), parallel);
    }
  }
}

TEST(ShapeTable, IncompatibleOffsetsMatchDirectCheck) {
  ShapeTable t(6);
  for (std::uint32_t a = 0; a < t.shapes().size(); ++a) {
    for (std::uint32_t b = 0; b < t.shapes().size(); ++b) {
      std::set<std::pair<int, int>> listed;
      for (const auto& v : t.incompatible_offsets(a, b)) listed.insert({v.x, v.y});
      // Direct scan over a window comfortably larger than both shapes.
      for (int dx = -8; dx <= 8; ++dx)
        for (int dy = -8; dy <= 8; ++dy) {
          const bool inc = contours_incompatible(t.shape(a).form,
                                                 t.shape(b).form.translated(dx, dy));
          EXPECT_EQ(listed.count({dx, dy}) == 1, inc)
              << "shapes " << a << "," << b << " at " << dx << "," << dy;
        }
    }
  }
}

TEST(ShapeTable, SelfIncompatibilityAtZeroOffset) {
  ShapeTable t(4);
  auto offs = t.incompatible_offsets(0, 0);
  bool has_zero = false;
  for (const auto& v : offs) has_zero |= (v.x == 0 && v.y == 0);
  EXPECT_TRUE(has_zero);
}

TEST(PlacedContourKey, RoundTrip) {
  PlacedContour pc{7, -1234, 4096};
  auto back = PlacedContour::from_key(pc.key());
  EXPECT_EQ(back, pc);
  PlacedContour neg{0, -1, -1};
  EXPECT_EQ(PlacedContour::from_key(neg.key()), neg);
}

TEST(PlacedContourKey, RealizeTranslates) {
  ShapeTable t(6);
  PlacedContour pc{1, 3, -2};
  auto c = t.realize(pc);
  EXPECT_EQ(c, t.shape(1).form.translated(3, -2));
}
