#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "loopgas/catalog.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"

namespace loopgas {

// A contour with a temporal extent: born at `birth`, gone at `birth + lifetime`.
struct Cylinder {
  Contour basis;
  double birth = 0.0;
  double lifetime = 0.0;

  double death() const { return birth + lifetime; }
  friend bool operator==(const Cylinder&, const Cylinder&) = default;
};

// Birth proposals on a window [0, t_end), ordered by (time, basis). Each
// contour's times form an independent Poisson process of rate equal to its
// catalog weight; lifetimes are independent Exp(1).
struct MarkStream {
  double t_end = 0.0;
  std::vector<Cylinder> marks;
};

// Superposition over every catalog entry lying inside the volume.
MarkStream generate_marks(const WeightedCatalog& catalog, const Box& volume, double t_end,
                          Rng& rng);

// Initial state: one cylinder per contour, born at time zero with a fresh
// Exp(1) lifetime.
std::vector<Cylinder> initial_cylinders(const std::vector<Contour>& state, Rng& rng);

struct TrajectoryEvent {
  enum class Kind { kept, erased, death };
  double time = 0.0;
  Kind kind = Kind::kept;
  Contour basis;

  friend bool operator==(const TrajectoryEvent&, const TrajectoryEvent&) = default;
};

struct Trajectory {
  double t_end = 0.0;
  std::vector<Contour> initial_state;   // bases present at time zero, sorted
  std::vector<TrajectoryEvent> events;  // time-ordered, deaths before births on ties
  std::vector<Contour> final_state;     // alive bases at t_end, sorted
};

// Mark-by-mark evolution: a proposed cylinder is kept exactly when its basis
// is compatible with everything alive, and kept cylinders die on schedule.
// Pure function of its inputs; all randomness lives in the arguments.
// Throws if the initial cylinders are pairwise incompatible or duplicated.
Trajectory evolve(const std::vector<Cylinder>& initial, const MarkStream& marks);

// Single forward pass over a trajectory answering state queries at
// nondecreasing times.
class StateReplay {
 public:
  explicit StateReplay(const Trajectory& trajectory);

  // Alive bases at time t (inclusive of events at exactly t), sorted.
  const std::vector<Contour>& advance_to(double t);

 private:
  const Trajectory* trajectory_;
  std::size_t next_ = 0;
  double cursor_ = -std::numeric_limits<double>::infinity();
  std::vector<Contour> alive_;
};

struct CouplingResult {
  Trajectory from_full;
  Trajectory from_empty;
  // Cylinder-level symmetric difference after every event of either run.
  std::vector<std::pair<double, std::uint32_t>> discrepancy_steps;
  bool coalesced = false;
  double coalescence_time = std::numeric_limits<double>::infinity();
};

// Two evolutions driven by the identical mark stream. Discrepancy compares
// alive cylinders (basis and death time), so zero discrepancy really does
// persist: from that point both runs face the same future with the same
// state.
CouplingResult couple(const std::vector<Cylinder>& full_initial,
                      const std::vector<Cylinder>& empty_initial, const MarkStream& marks);

}  // namespace loopgas
