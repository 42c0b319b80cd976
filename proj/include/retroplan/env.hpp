#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "retroplan/types.hpp"

namespace retroplan {

// Agent-visible projection of the environment. Never contains the solution
// assignment; everything the policy and scorer consume is derived from here.
struct Observation {
  std::vector<Compartment> compartments;
  std::vector<ObjectItem> objects;
  std::map<std::string, std::string> placements;
  std::optional<std::string> held;
  int step = 0;
  int step_budget = 50;
  std::optional<Action> prev_action;
  std::optional<ReflectionRecord> prev_external;

  const Compartment* find_compartment(const std::string& id) const {
    for (const auto& c : compartments)
      if (c.id == id) return &c;
    return nullptr;
  }
  const ObjectItem* find_object(const std::string& id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  int occupied_width(const std::string& comp_id) const {
    int total = 0;
    for (const auto& [obj_id, cid] : placements)
      if (cid == comp_id) total += find_object(obj_id)->dims.width;
    return total;
  }
  bool placed(const std::string& obj_id) const { return placements.count(obj_id) > 0; }
};

// Discrete action set at an observation, in deterministic order: PickUp over
// unplaced unheld objects, then TakeOut over placed objects (hand empty), or
// PutIn of the held object over all compartments (hand full). Object and
// compartment order follows the task listing.
inline std::vector<Action> enumerate_actions(const Observation& obs) {
  std::vector<Action> actions;
  if (obs.held.has_value()) {
    for (const auto& c : obs.compartments) actions.push_back(Action::put_in(*obs.held, c.id));
    return actions;
  }
  for (const auto& o : obs.objects)
    if (!obs.placed(o.id)) actions.push_back(Action::pick_up(o.id));
  for (const auto& o : obs.objects)
    if (obs.placed(o.id)) actions.push_back(Action::take_out(o.id));
  return actions;
}

// Deterministic cupboard-fitting environment. Geometry is a per-compartment
// width capacity with depth/height gating; a failed action never mutates
// placements or the held object. The step counter advances on every call.
class CupboardEnv {
 public:
  CupboardEnv() = default;

  // `seed` is accepted for interface symmetry with the samplers but does not
  // influence the state: the environment is fully deterministic.
  Observation reset(const Task& task, std::uint64_t seed = 0, int budget_override = 0) {
    (void)seed;
    validate_task_structure(task);
    if (budget_override < 0) throw std::invalid_argument("env: negative budget override");
    task_ = task;
    budget_ = budget_override > 0 ? budget_override : task.step_budget;
    state_ = EnvState{};
    prev_action_.reset();
    live_ = true;
    return observation();
  }

  bool live() const { return live_; }
  const Task& task() const { return task_; }
  const EnvState& state() const { return state_; }
  int budget() const { return budget_; }
  bool done() const { return state_.done; }

  Observation observation() const {
    Observation obs;
    obs.compartments = task_.compartments;
    obs.objects = task_.objects;
    obs.placements = state_.placements;
    obs.held = state_.held;
    obs.step = state_.step;
    obs.step_budget = budget_;
    obs.prev_action = prev_action_;
    return obs;
  }

  std::pair<Observation, ExecResult> step(const Action& action) {
    if (!live_) throw std::logic_error("env: step before reset");
    if (state_.done) throw std::logic_error("env: step after episode end");
    check_ids(action);
    const ExecResult result = apply(action);
    prev_action_ = action;
    state_.step += 1;
    state_.done = state_.step >= budget_ || solved();
    return {observation(), result};
  }

  EpisodeMetrics metrics() const { return compute_metrics(state_, task_); }

 private:
  bool solved() const {
    if (state_.placements.size() != task_.objects.size()) return false;
    for (const auto& [obj, comp] : state_.placements)
      if (task_.solution.at(obj) != comp) return false;
    return true;
  }

  void check_ids(const Action& action) const {
    if (!task_.find_object(action.object))
      throw std::invalid_argument("env: unknown object " + action.object);
    if (action.kind == ActionKind::PutIn && !task_.find_compartment(action.compartment))
      throw std::invalid_argument("env: unknown compartment " + action.compartment);
  }

  ExecResult apply(const Action& action) {
    switch (action.kind) {
      case ActionKind::PickUp: {
        if (state_.held.has_value()) return ExecResult::fail(ExecReason::HandFull);
        if (state_.placements.count(action.object)) return ExecResult::fail(ExecReason::NotPlaced);
        state_.held = action.object;
        return ExecResult::ok();
      }
      case ActionKind::PutIn: {
        if (!state_.held.has_value()) return ExecResult::fail(ExecReason::HandEmpty);
        if (*state_.held != action.object) return ExecResult::fail(ExecReason::NotHeld);
        const Dims& obj = task_.find_object(action.object)->dims;
        const Dims& comp = task_.find_compartment(action.compartment)->dims;
        if (obj.width + occupied_width(state_, task_, action.compartment) > comp.width)
          return ExecResult::fail(ExecReason::NoFitWidth);
        if (obj.depth > comp.depth) return ExecResult::fail(ExecReason::NoFitDepth);
        if (obj.height > comp.height) return ExecResult::fail(ExecReason::NoFitHeight);
        state_.placements[action.object] = action.compartment;
        state_.held.reset();
        return ExecResult::ok();
      }
      case ActionKind::TakeOut: {
        if (state_.held.has_value()) return ExecResult::fail(ExecReason::HandFull);
        auto it = state_.placements.find(action.object);
        if (it == state_.placements.end()) return ExecResult::fail(ExecReason::NotPlaced);
        state_.placements.erase(it);
        state_.held = action.object;
        return ExecResult::ok();
      }
    }
    return ExecResult::fail(ExecReason::NotPlaced);
  }

  Task task_;
  EnvState state_;
  std::optional<Action> prev_action_;
  int budget_ = 0;
  bool live_ = false;
};

}  // namespace retroplan
