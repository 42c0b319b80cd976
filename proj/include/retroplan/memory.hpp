#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "retroplan/features.hpp"

namespace retroplan {

// Frozen decision context: the observation plus the full enumerated action
// set and its feature vectors, captured at decision time so post-hoc log
// probabilities stay well defined after the environment has moved on.
struct ContextSnapshot {
  Observation obs;
  std::vector<Action> actions;
  std::vector<FeatureVector> features;

  const Action& action_at(std::size_t i) const { return actions.at(i); }
};

inline ContextSnapshot make_snapshot(const Observation& obs) {
  ContextSnapshot ctx;
  ctx.obs = obs;
  ctx.actions = enumerate_actions(obs);
  ctx.features.reserve(ctx.actions.size());
  for (const auto& a : ctx.actions) ctx.features.push_back(featurize(obs, a));
  return ctx;
}

struct WorkingMemoryEntry {
  int step = 0;
  ContextSnapshot ctx;
  std::size_t action_index = 0;  // into ctx.actions
  ExecResult exec;
  ReflectionRecord reflection;  // immediate external reflection, immutable
  int entry_id = 0;             // unique per episode (the step index)

  const Action& action() const { return ctx.action_at(action_index); }
};

// Latest hindsight record per executed action. Overwrite semantics: at most
// one record per entry_id; re-reflection replaces the previous record. Oldest
// entries are evicted past the capacity bound.
class RetroBuffer {
 public:
  struct Slot {
    WorkingMemoryEntry entry;
    ReflectionRecord latest;
  };
  struct Overwrite {
    int entry_id = 0;
    ReflectionRecord old_record;
    ReflectionRecord new_record;
  };

  explicit RetroBuffer(std::size_t capacity = 64) : capacity_(capacity) {}

  // First insertion logs the entry's immediate reflection as the old record.
  Overwrite put(const WorkingMemoryEntry& entry, const ReflectionRecord& record) {
    Overwrite ow{entry.entry_id, entry.reflection, record};
    if (auto it = slots_.find(entry.entry_id); it != slots_.end()) {
      ow.old_record = it->second.latest;
      it->second.latest = record;
    } else {
      slots_.emplace(entry.entry_id, Slot{entry, record});
      while (slots_.size() > capacity_) slots_.erase(slots_.begin());
    }
    return ow;
  }

  bool contains(int entry_id) const { return slots_.count(entry_id) > 0; }
  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::map<int, Slot>& slots() const { return slots_; }

  bool contains_action(const Action& a) const {
    for (const auto& [id, slot] : slots_)
      if (slot.entry.action() == a) return true;
    return false;
  }

 private:
  std::size_t capacity_;
  std::map<int, Slot> slots_;  // keyed by entry_id, ascending = oldest first
};

enum class ExampleKind { Retro, Reg };

// Unit of test-time training. Retro examples carry hindsight records from the
// oracle; reg examples carry the scorer's own pre-update output on unexplored
// actions and anchor it against forgetting.
struct TrainExample {
  ContextSnapshot ctx;
  std::size_t action_index = 0;
  ReflectionRecord record;
  ExampleKind kind = ExampleKind::Retro;

  const Action& action() const { return ctx.action_at(action_index); }
  const FeatureVector& features() const { return ctx.features.at(action_index); }
};

}  // namespace retroplan
