#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "retroplan/memory.hpp"
#include "retroplan/types.hpp"

namespace retroplan {
namespace oracle {

// Rubric constants. Band structure: 0-20 physical failure or immediate dead
// end, 21-40 poor strategic choices, 41-60 suboptimal but acceptable, 61-80
// good, 81-100 optimal or near-optimal.
struct Rubric {
  int exec_fail = 10;
  int dead_end = 20;
  int hindsight_off_solution = 25;
  int take_out_plain = 40;
  int off_solution = 45;
  int pick_up = 70;
  int recovery = 85;
  int on_solution = 90;
  int optimal = 95;
};

inline const Rubric& rubric() {
  static const Rubric r{};
  return r;
}

namespace detail {

struct PackingProblem {
  std::vector<Dims> items;        // unplaced + held objects, widest first
  std::vector<int> item_order;    // original object index, aligned with items
  std::vector<Dims> bins;         // compartment dims
  std::vector<int> free_width;    // remaining width per compartment
};

inline PackingProblem build_problem(const EnvState& state, const Task& task) {
  PackingProblem p;
  for (const auto& c : task.compartments) {
    p.bins.push_back(c.dims);
    p.free_width.push_back(c.dims.width - occupied_width(state, task, c.id));
  }
  std::vector<int> pending;
  for (int i = 0; i < static_cast<int>(task.objects.size()); ++i)
    if (!state.placements.count(task.objects[i].id)) pending.push_back(i);
  // Widest-first ordering prunes the search much earlier.
  std::stable_sort(pending.begin(), pending.end(), [&](int a, int b) {
    return task.objects[a].dims.width > task.objects[b].dims.width;
  });
  for (int i : pending) {
    p.items.push_back(task.objects[i].dims);
    p.item_order.push_back(i);
  }
  return p;
}

inline bool fits(const Dims& item, const Dims& bin, int free_width) {
  return item.depth <= bin.depth && item.height <= bin.height && item.width <= free_width;
}

// Object-major depth-first count of complete assignments, stopping at `cap`.
// `assignment[k]` receives the bin index of items[k] for the first completion.
inline long long count_assignments(PackingProblem& p, std::size_t k, long long cap,
                                   std::vector<int>* assignment, std::vector<int>* first_found) {
  if (k == p.items.size()) {
    if (first_found && first_found->empty() && assignment) *first_found = *assignment;
    return 1;
  }
  int remaining_width = 0;
  for (std::size_t i = k; i < p.items.size(); ++i) remaining_width += p.items[i].width;
  if (remaining_width > std::accumulate(p.free_width.begin(), p.free_width.end(), 0)) return 0;

  long long count = 0;
  for (std::size_t b = 0; b < p.bins.size(); ++b) {
    if (!fits(p.items[k], p.bins[b], p.free_width[b])) continue;
    p.free_width[b] -= p.items[k].width;
    if (assignment) (*assignment)[k] = static_cast<int>(b);
    count += count_assignments(p, k + 1, cap - count, assignment, first_found);
    p.free_width[b] += p.items[k].width;
    if (count >= cap) return count;
  }
  return count;
}

}  // namespace detail

// Number of ways to complete the packing from `state` (existing placements
// fixed), counted up to `cap`. Optionally reports one completion.
inline long long count_completions(const EnvState& state, const Task& task,
                                   long long cap = std::numeric_limits<long long>::max(),
                                   std::map<std::string, std::string>* completion = nullptr) {
  detail::PackingProblem p = detail::build_problem(state, task);
  std::vector<int> assignment(p.items.size(), -1);
  std::vector<int> first_found;
  const long long n = detail::count_assignments(p, 0, cap, &assignment, &first_found);
  if (completion && n >= 1) {
    *completion = state.placements;
    for (std::size_t k = 0; k < p.items.size(); ++k)
      (*completion)[task.objects[p.item_order[k]].id] = task.compartments[first_found[k]].id;
  }
  return n;
}

// True iff all currently unplaced/held objects can still be assigned to
// compartments under the fit rule, keeping existing placements fixed.
inline bool solvable(const EnvState& state, const Task& task) {
  return count_completions(state, task, 1) >= 1;
}

// Exact count of complete feasible assignments for the whole task.
inline long long count_solutions(const Task& task) {
  return count_completions(EnvState{}, task);
}

// Independent enumerator for cross-checking count_solutions: iterates
// compartments and, per compartment, every feasible subset of the still
// unassigned objects. Exponential in object count; intended for small tasks.
namespace detail {

inline long long count_by_compartment(const Task& task, std::size_t comp_index,
                                      std::vector<bool>& assigned, int n_assigned) {
  const int n = static_cast<int>(task.objects.size());
  if (comp_index == task.compartments.size()) return n_assigned == n ? 1 : 0;
  const Dims& bin = task.compartments[comp_index].dims;

  std::vector<int> eligible;
  for (int i = 0; i < n; ++i) {
    const Dims& d = task.objects[i].dims;
    if (!assigned[i] && d.depth <= bin.depth && d.height <= bin.height && d.width <= bin.width)
      eligible.push_back(i);
  }

  long long count = 0;
  // Subset walk over eligible objects with a running width budget.
  std::vector<int> chosen;
  auto walk = [&](auto&& self, std::size_t pos, int width_left) -> void {
    if (pos == eligible.size()) {
      for (int i : chosen) assigned[i] = true;
      count += count_by_compartment(task, comp_index + 1, assigned,
                                    n_assigned + static_cast<int>(chosen.size()));
      for (int i : chosen) assigned[i] = false;
      return;
    }
    self(self, pos + 1, width_left);  // skip
    const int i = eligible[pos];
    if (task.objects[i].dims.width <= width_left) {
      chosen.push_back(i);
      self(self, pos + 1, width_left - task.objects[i].dims.width);
      chosen.pop_back();
    }
  };
  walk(walk, 0, bin.width);
  return count;
}

}  // namespace detail

inline long long count_solutions_by_compartment(const Task& task) {
  std::vector<bool> assigned(task.objects.size(), false);
  return detail::count_by_compartment(task, 0, assigned, 0);
}

// ---------------------------------------------------------------------------
// external reflection: immediate rubric
// ---------------------------------------------------------------------------

// Deterministic post-execution assessment of one transition. First matching
// rule wins: physical failure, then dead end (no completion exists after a
// successful action), then the per-kind strategic cases.
inline ReflectionRecord immediate_score(const EnvState& before, const Action& action,
                                        const ExecResult& exec, const EnvState& after,
                                        const Task& task) {
  const Rubric& r = rubric();
  if (!exec.success) return {r.exec_fail, Rationale::ExecFail};
  if (!solvable(after, task)) return {r.dead_end, Rationale::DeadEnd};
  switch (action.kind) {
    case ActionKind::PutIn:
      return task.solution.at(action.object) == action.compartment
                 ? ReflectionRecord{r.on_solution, Rationale::OnSolution}
                 : ReflectionRecord{r.off_solution, Rationale::OffSolution};
    case ActionKind::PickUp:
      return {r.pick_up, Rationale::SuboptimalOk};
    case ActionKind::TakeOut:
      // after is solvable here, so recovery reduces to "before was not".
      return solvable(before, task) ? ReflectionRecord{r.take_out_plain, Rationale::SuboptimalOk}
                                    : ReflectionRecord{r.recovery, Rationale::Recovery};
  }
  return {r.exec_fail, Rationale::ExecFail};
}

// ---------------------------------------------------------------------------
// retrospective reflection: hindsight rubric
// ---------------------------------------------------------------------------

struct HindsightContext {
  const std::vector<WorkingMemoryEntry>& window;  // ordered by step
  const EnvState& current_state;
  const Task& task;
  bool current_solvable;

  HindsightContext(const std::vector<WorkingMemoryEntry>& w, const EnvState& s, const Task& t)
      : window(w), current_state(s), task(t), current_solvable(solvable(s, t)) {}
};

namespace detail {

inline bool downstream_clean(const WorkingMemoryEntry& entry, const HindsightContext& ctx) {
  for (const auto& e : ctx.window)
    if (e.step > entry.step && e.reflection.rationale == Rationale::DeadEnd) return false;
  return true;
}

inline bool undone_or_recovered(const WorkingMemoryEntry& entry, const HindsightContext& ctx) {
  const Action& a = entry.action();
  auto it = ctx.current_state.placements.find(a.object);
  if (it == ctx.current_state.placements.end() || it->second != a.compartment) return true;
  for (const auto& e : ctx.window) {
    if (e.step <= entry.step) continue;
    if (e.reflection.rationale == Rationale::Recovery) return true;
    if (e.exec.success && e.action().kind == ActionKind::TakeOut && e.action().object == a.object)
      return true;
  }
  return false;
}

}  // namespace detail

// Re-applies the immediate rubric to a recorded action with hindsight
// substitutions: off-solution placements that were later undone (or forced a
// recovery) drop to the poor-strategy band, on-solution placements with a
// clean downstream window are promoted to optimal, and nothing on a prefix of
// an unsolvable current state may score above the dead-end cap. Pure function
// of (entry, ctx); re-running with an unchanged context is idempotent.
inline ReflectionRecord hindsight_score(const WorkingMemoryEntry& entry,
                                        const HindsightContext& ctx) {
  const Rubric& r = rubric();
  ReflectionRecord rec;
  if (!entry.exec.success) {
    rec = {r.exec_fail, Rationale::ExecFail};
  } else {
    switch (entry.reflection.rationale) {
      case Rationale::DeadEnd:
        rec = {r.dead_end, Rationale::DeadEnd};
        break;
      case Rationale::OnSolution:
      case Rationale::Optimal:
        rec = detail::downstream_clean(entry, ctx)
                  ? ReflectionRecord{r.optimal, Rationale::Optimal}
                  : ReflectionRecord{r.on_solution, Rationale::OnSolution};
        break;
      case Rationale::OffSolution:
        rec = detail::undone_or_recovered(entry, ctx)
                  ? ReflectionRecord{r.hindsight_off_solution, Rationale::OffSolution}
                  : ReflectionRecord{r.off_solution, Rationale::OffSolution};
        break;
      case Rationale::Recovery:
        rec = {r.recovery, Rationale::Recovery};
        break;
      default:
        rec = entry.action().kind == ActionKind::TakeOut
                  ? ReflectionRecord{r.take_out_plain, Rationale::SuboptimalOk}
                  : ReflectionRecord{r.pick_up, Rationale::SuboptimalOk};
        break;
    }
  }
  if (!ctx.current_solvable) rec = {std::min(rec.score, r.dead_end), Rationale::DeadEnd};
  return rec;
}

}  // namespace oracle
}  // namespace retroplan
