#include "loopgas/forward.hpp"

#include <algorithm>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_set>
#include <utility>

namespace loopgas {
namespace {

bool cylinder_order(const Cylinder& a, const Cylinder& b) {
  return std::tie(a.birth, a.basis) < std::tie(b.birth, b.basis);
}

// Evolution event with full cylinder identity, used internally so the
// coupling can track alive sets exactly.  `id` names the cylinder across
// runs: marks share the id of their stream position, initial cylinders get
// ids assigned by the caller.
struct DetailedEvent {
  double time = 0.0;
  TrajectoryEvent::Kind kind = TrajectoryEvent::Kind::kept;
  Cylinder cylinder;
  std::int64_t id = 0;
};

void check_initial(const std::vector<Cylinder>& initial) {
  for (std::size_t i = 0; i < initial.size(); ++i) {
    for (std::size_t j = i + 1; j < initial.size(); ++j) {
      if (contours_incompatible(initial[i].basis, initial[j].basis)) {
        throw std::invalid_argument("incompatible initial configuration");
      }
    }
  }
}

// Runs the exclusion dynamics and reports every event.  Initial cylinder k
// gets id initial_ids[k]; the mark at stream position i gets id i.
std::vector<DetailedEvent> run_detailed(const std::vector<Cylinder>& initial,
                                        const std::vector<std::int64_t>& initial_ids,
                                        const MarkStream& marks) {
  check_initial(initial);

  struct Alive {
    Cylinder cylinder;
    std::int64_t id;
  };
  std::vector<Alive> alive;

  // Pending deaths keyed by (time, basis) so simultaneous events resolve the
  // same way every run; deaths are handled before the mark at an equal time.
  using DeathKey = std::pair<double, std::size_t>;  // (death time, index into alive)
  auto death_after = [&alive](const DeathKey& a, const DeathKey& b) {
    if (a.first != b.first) return a.first > b.first;
    return alive[b.second].cylinder.basis < alive[a.second].cylinder.basis;
  };
  std::priority_queue<DeathKey, std::vector<DeathKey>, decltype(death_after)> deaths(death_after);

  std::vector<DetailedEvent> events;
  events.reserve(initial.size() + 2 * marks.marks.size());

  auto admit = [&](const Cylinder& c, std::int64_t id) {
    alive.push_back({c, id});
    deaths.push({c.death(), alive.size() - 1});
  };
  for (std::size_t k = 0; k < initial.size(); ++k) admit(initial[k], initial_ids[k]);

  std::unordered_set<std::size_t> dead_slots;
  auto pop_deaths_through = [&](double t) {
    while (!deaths.empty() && deaths.top().first <= t) {
      auto [when, slot] = deaths.top();
      deaths.pop();
      events.push_back({when, TrajectoryEvent::Kind::death, alive[slot].cylinder, alive[slot].id});
      dead_slots.insert(slot);
    }
  };

  for (std::size_t i = 0; i < marks.marks.size(); ++i) {
    const Cylinder& mark = marks.marks[i];
    pop_deaths_through(mark.birth);
    bool blocked = false;
    for (std::size_t slot = 0; slot < alive.size(); ++slot) {
      if (dead_slots.count(slot)) continue;
      if (contours_incompatible(alive[slot].cylinder.basis, mark.basis)) {
        blocked = true;
        break;
      }
    }
    if (blocked) {
      events.push_back({mark.birth, TrajectoryEvent::Kind::erased, mark,
                        static_cast<std::int64_t>(i)});
    } else {
      events.push_back({mark.birth, TrajectoryEvent::Kind::kept, mark,
                        static_cast<std::int64_t>(i)});
      admit(mark, static_cast<std::int64_t>(i));
    }
  }
  pop_deaths_through(marks.t_end);
  return events;
}

}  // namespace

MarkStream generate_marks(const WeightedCatalog& catalog, const Box& volume, double t_end,
                          Rng& rng) {
  if (t_end < 0.0) throw std::invalid_argument("mark window length must be nonnegative");
  MarkStream stream;
  stream.t_end = t_end;
  for (const CatalogEntry& entry : catalog.entries()) {
    if (!volume.contains(entry.contour)) continue;
    const std::uint64_t count = rng.poisson(entry.weight * t_end);
    for (std::uint64_t k = 0; k < count; ++k) {
      const double birth = t_end * rng.uniform01();
      stream.marks.push_back({entry.contour, birth, rng.exponential(1.0)});
    }
  }
  std::sort(stream.marks.begin(), stream.marks.end(), cylinder_order);
  return stream;
}

std::vector<Cylinder> initial_cylinders(const std::vector<Contour>& state, Rng& rng) {
  std::vector<Cylinder> out;
  out.reserve(state.size());
  for (const Contour& contour : state) {
    out.push_back({contour, 0.0, rng.exponential(1.0)});
  }
  return out;
}

Trajectory evolve(const std::vector<Cylinder>& initial, const MarkStream& marks) {
  std::vector<std::int64_t> ids(initial.size());
  for (std::size_t k = 0; k < initial.size(); ++k) ids[k] = -1 - static_cast<std::int64_t>(k);
  const std::vector<DetailedEvent> detailed = run_detailed(initial, ids, marks);

  Trajectory out;
  out.t_end = marks.t_end;
  out.events.reserve(detailed.size());
  for (const Cylinder& c : initial) out.initial_state.push_back(c.basis);
  std::sort(out.initial_state.begin(), out.initial_state.end());

  std::vector<Cylinder> alive = initial;
  for (const DetailedEvent& ev : detailed) {
    out.events.push_back({ev.time, ev.kind, ev.cylinder.basis});
    if (ev.kind == TrajectoryEvent::Kind::kept) {
      alive.push_back(ev.cylinder);
    } else if (ev.kind == TrajectoryEvent::Kind::death) {
      alive.erase(std::find_if(alive.begin(), alive.end(),
                               [&](const Cylinder& c) { return c == ev.cylinder; }));
    }
  }
  for (const Cylinder& c : alive) out.final_state.push_back(c.basis);
  std::sort(out.final_state.begin(), out.final_state.end());
  return out;
}

StateReplay::StateReplay(const Trajectory& trajectory)
    : trajectory_(&trajectory), alive_(trajectory.initial_state) {}

const std::vector<Contour>& StateReplay::advance_to(double t) {
  if (t < cursor_) throw std::invalid_argument("replay times must be nondecreasing");
  cursor_ = t;
  const auto& events = trajectory_->events;
  while (next_ < events.size() && events[next_].time <= t) {
    const TrajectoryEvent& ev = events[next_];
    ++next_;
    if (ev.kind == TrajectoryEvent::Kind::kept) {
      alive_.insert(std::upper_bound(alive_.begin(), alive_.end(), ev.basis), ev.basis);
    } else if (ev.kind == TrajectoryEvent::Kind::death) {
      auto it = std::lower_bound(alive_.begin(), alive_.end(), ev.basis);
      if (it == alive_.end() || *it != ev.basis) {
        throw std::logic_error("trajectory death without a matching alive contour");
      }
      alive_.erase(it);
    }
  }
  return alive_;
}

CouplingResult couple(const std::vector<Cylinder>& full_initial,
                      const std::vector<Cylinder>& empty_initial, const MarkStream& marks) {
  // Initial cylinders are identified by value, so handing both runs the same
  // starting state yields discrepancy zero from the outset.
  std::vector<Cylinder> seen;
  auto value_id = [&seen](const Cylinder& c) -> std::int64_t {
    for (std::size_t k = 0; k < seen.size(); ++k) {
      if (seen[k] == c) return -1 - static_cast<std::int64_t>(k);
    }
    seen.push_back(c);
    return -static_cast<std::int64_t>(seen.size());
  };
  std::vector<std::int64_t> full_ids, empty_ids;
  for (const Cylinder& c : full_initial) full_ids.push_back(value_id(c));
  for (const Cylinder& c : empty_initial) empty_ids.push_back(value_id(c));

  const std::vector<DetailedEvent> full_events = run_detailed(full_initial, full_ids, marks);
  const std::vector<DetailedEvent> empty_events = run_detailed(empty_initial, empty_ids, marks);

  CouplingResult result;

  std::unordered_set<std::int64_t> alive_full, alive_empty;
  int discrepancy = 0;
  auto apply = [&](std::unordered_set<std::int64_t>& mine,
                   const std::unordered_set<std::int64_t>& theirs, const DetailedEvent& ev) {
    if (ev.kind == TrajectoryEvent::Kind::erased) return;
    if (ev.kind == TrajectoryEvent::Kind::kept) {
      mine.insert(ev.id);
      discrepancy += theirs.count(ev.id) ? -1 : 1;
    } else {
      mine.erase(ev.id);
      discrepancy += theirs.count(ev.id) ? 1 : -1;
    }
  };
  for (std::size_t k = 0; k < full_initial.size(); ++k) {
    alive_full.insert(full_ids[k]);
    ++discrepancy;
  }
  for (std::size_t k = 0; k < empty_initial.size(); ++k) {
    alive_empty.insert(empty_ids[k]);
    discrepancy += alive_full.count(empty_ids[k]) ? -1 : 1;
  }

  auto note = [&](double when) {
    result.discrepancy_steps.emplace_back(when, static_cast<std::uint32_t>(discrepancy));
    if (discrepancy == 0 && !result.coalesced) {
      result.coalesced = true;
      result.coalescence_time = when;
    }
  };
  note(0.0);

  // Merge the two event lists, applying every event that shares a timestamp
  // before recording, so a mark both runs accept never shows up as a
  // transient discrepancy.
  std::size_t i = 0, j = 0;
  while (i < full_events.size() || j < empty_events.size()) {
    double now = std::numeric_limits<double>::infinity();
    if (i < full_events.size()) now = std::min(now, full_events[i].time);
    if (j < empty_events.size()) now = std::min(now, empty_events[j].time);
    while (i < full_events.size() && full_events[i].time == now) {
      apply(alive_full, alive_empty, full_events[i]);
      ++i;
    }
    while (j < empty_events.size() && empty_events[j].time == now) {
      apply(alive_empty, alive_full, empty_events[j]);
      ++j;
    }
    note(now);
  }

  result.from_full = evolve(full_initial, marks);
  result.from_empty = evolve(empty_initial, marks);
  return result;
}

}  // namespace loopgas
