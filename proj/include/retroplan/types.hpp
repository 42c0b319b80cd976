#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace retroplan {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

struct Dims {
  int width = 1;
  int depth = 1;
  int height = 1;

  bool valid() const { return width >= 1 && depth >= 1 && height >= 1; }
  long long volume() const { return 1LL * width * depth * height; }
  bool operator==(const Dims&) const = default;
};

struct Compartment {
  std::string id;
  Dims dims;
  std::string label;
  bool operator==(const Compartment&) const = default;
};

struct ObjectItem {
  std::string id;
  Dims dims;
  std::string label;
  bool operator==(const ObjectItem&) const = default;
};

// ---------------------------------------------------------------------------
// task
// ---------------------------------------------------------------------------

struct Task {
  std::vector<Compartment> compartments;
  std::vector<ObjectItem> objects;
  std::map<std::string, std::string> solution;  // object id -> compartment id
  int step_budget = 50;

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
  bool operator==(const Task&) const = default;
};

// Structural checks only; solution uniqueness is the task generator's job.
inline void validate_task_structure(const Task& task) {
  if (task.step_budget < 1) throw std::invalid_argument("task: step_budget must be >= 1");
  if (task.compartments.empty() || task.objects.empty())
    throw std::invalid_argument("task: needs at least one compartment and one object");
  std::map<std::string, int> seen;
  for (const auto& c : task.compartments) {
    if (!c.dims.valid()) throw std::invalid_argument("task: nonpositive compartment dims");
    if (++seen[c.id] > 1) throw std::invalid_argument("task: duplicate compartment id " + c.id);
  }
  seen.clear();
  for (const auto& o : task.objects) {
    if (!o.dims.valid()) throw std::invalid_argument("task: nonpositive object dims");
    if (++seen[o.id] > 1) throw std::invalid_argument("task: duplicate object id " + o.id);
  }
  if (task.solution.size() != task.objects.size())
    throw std::invalid_argument("task: solution must cover every object exactly once");
  std::map<std::string, int> load;  // compartment id -> occupied width under the solution
  for (const auto& [obj_id, comp_id] : task.solution) {
    const ObjectItem* obj = task.find_object(obj_id);
    const Compartment* comp = task.find_compartment(comp_id);
    if (!obj) throw std::invalid_argument("task: solution references unknown object " + obj_id);
    if (!comp) throw std::invalid_argument("task: solution references unknown compartment " + comp_id);
    if (obj->dims.depth > comp->dims.depth || obj->dims.height > comp->dims.height)
      throw std::invalid_argument("task: solution infeasible (depth/height) for " + obj_id);
    load[comp_id] += obj->dims.width;
    if (load[comp_id] > comp->dims.width)
      throw std::invalid_argument("task: solution infeasible (width) in " + comp_id);
  }
}

// ---------------------------------------------------------------------------
// actions and execution feedback
// ---------------------------------------------------------------------------

enum class ActionKind { PickUp, PutIn, TakeOut };

struct Action {
  ActionKind kind = ActionKind::PickUp;
  std::string object;
  std::string compartment;  // only for PutIn

  static Action pick_up(std::string obj) { return {ActionKind::PickUp, std::move(obj), {}}; }
  static Action put_in(std::string obj, std::string comp) {
    return {ActionKind::PutIn, std::move(obj), std::move(comp)};
  }
  static Action take_out(std::string obj) { return {ActionKind::TakeOut, std::move(obj), {}}; }

  bool operator==(const Action&) const = default;
  bool operator<(const Action& rhs) const {
    return std::tie(kind, object, compartment) < std::tie(rhs.kind, rhs.object, rhs.compartment);
  }
};

inline std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::PickUp: return "PickUp(" + a.object + ")";
    case ActionKind::PutIn: return "PutIn(" + a.object + "," + a.compartment + ")";
    case ActionKind::TakeOut: return "TakeOut(" + a.object + ")";
  }
  return "?";
}

enum class ExecReason {
  Ok,
  NoFitWidth,
  NoFitDepth,
  NoFitHeight,
  HandFull,
  HandEmpty,
  NotHeld,
  NotPlaced,  // placement-status precondition failed (TakeOut of unplaced / PickUp of placed)
  BudgetExhausted,
};

inline const char* to_string(ExecReason r) {
  switch (r) {
    case ExecReason::Ok: return "ok";
    case ExecReason::NoFitWidth: return "no_fit_width";
    case ExecReason::NoFitDepth: return "no_fit_depth";
    case ExecReason::NoFitHeight: return "no_fit_height";
    case ExecReason::HandFull: return "hand_full";
    case ExecReason::HandEmpty: return "hand_empty";
    case ExecReason::NotHeld: return "not_held";
    case ExecReason::NotPlaced: return "not_placed";
    case ExecReason::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

struct ExecResult {
  bool success = false;
  ExecReason reason = ExecReason::Ok;

  static ExecResult ok() { return {true, ExecReason::Ok}; }
  static ExecResult fail(ExecReason r) { return {false, r}; }
  bool operator==(const ExecResult&) const = default;
};

// ---------------------------------------------------------------------------
// environment state and metrics
// ---------------------------------------------------------------------------

struct EnvState {
  std::map<std::string, std::string> placements;  // object id -> compartment id
  std::optional<std::string> held;
  int step = 0;
  bool done = false;
};

inline int occupied_width(const EnvState& state, const Task& task, const std::string& comp_id) {
  int total = 0;
  for (const auto& [obj_id, cid] : state.placements)
    if (cid == comp_id) total += task.find_object(obj_id)->dims.width;
  return total;
}

struct EpisodeMetrics {
  double fit_rate = 0.0;
  double correct_rate = 0.0;
  bool success = false;
  int steps_used = 0;
  int ttt_updates = 0;
};

inline EpisodeMetrics compute_metrics(const EnvState& state, const Task& task) {
  EpisodeMetrics m;
  const double n = static_cast<double>(task.objects.size());
  int correct = 0;
  for (const auto& [obj_id, comp_id] : state.placements)
    if (auto it = task.solution.find(obj_id); it != task.solution.end() && it->second == comp_id)
      ++correct;
  m.fit_rate = static_cast<double>(state.placements.size()) / n;
  m.correct_rate = static_cast<double>(correct) / n;
  m.success = state.placements.size() == task.objects.size() && correct == static_cast<int>(task.objects.size());
  m.steps_used = state.step;
  return m;
}

// ---------------------------------------------------------------------------
// reflection records
// ---------------------------------------------------------------------------

enum class Rationale {
  ExecFail,
  DeadEnd,
  OffSolution,
  SuboptimalOk,
  OnSolution,
  Optimal,
  Recovery,
  ModelEstimate,  // reserved for learned scorer outputs
};

inline const char* to_string(Rationale r) {
  switch (r) {
    case Rationale::ExecFail: return "exec_fail";
    case Rationale::DeadEnd: return "dead_end";
    case Rationale::OffSolution: return "off_solution";
    case Rationale::SuboptimalOk: return "suboptimal_ok";
    case Rationale::OnSolution: return "on_solution";
    case Rationale::Optimal: return "optimal";
    case Rationale::Recovery: return "recovery";
    case Rationale::ModelEstimate: return "model_estimate";
  }
  return "?";
}

struct ReflectionRecord {
  int score = 0;  // [0, 100]
  Rationale rationale = Rationale::ModelEstimate;
  bool operator==(const ReflectionRecord&) const = default;
};

// ---------------------------------------------------------------------------
// task file format: compartments[{id,dims:[w,d,h],label}], objects[...],
// solution{obj->comp}, step_budget
// ---------------------------------------------------------------------------

inline json dims_to_json(const Dims& d) { return json::array({d.width, d.depth, d.height}); }

inline Dims dims_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("dims must be [w,d,h]");
  return Dims{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

inline json task_to_json(const Task& task) {
  json j;
  j["compartments"] = json::array();
  for (const auto& c : task.compartments)
    j["compartments"].push_back({{"id", c.id}, {"dims", dims_to_json(c.dims)}, {"label", c.label}});
  j["objects"] = json::array();
  for (const auto& o : task.objects)
    j["objects"].push_back({{"id", o.id}, {"dims", dims_to_json(o.dims)}, {"label", o.label}});
  j["solution"] = json::object();
  for (const auto& [obj, comp] : task.solution) j["solution"][obj] = comp;
  j["step_budget"] = task.step_budget;
  return j;
}

inline Task task_from_json(const json& j) {
  Task task;
  for (const auto& c : j.at("compartments"))
    task.compartments.push_back({c.at("id").get<std::string>(), dims_from_json(c.at("dims")),
                                 c.value("label", std::string{})});
  for (const auto& o : j.at("objects"))
    task.objects.push_back({o.at("id").get<std::string>(), dims_from_json(o.at("dims")),
                            o.value("label", std::string{})});
  for (const auto& [obj, comp] : j.at("solution").items())
    task.solution[obj] = comp.get<std::string>();
  task.step_budget = j.value("step_budget", 50);
  validate_task_structure(task);
  return task;
}

}  // namespace retroplan
