#pragma once

#include <string>
#include <vector>

#include "retroplan/retroplan.hpp"

namespace testutil {

using namespace retroplan;

// c1: w10 d5 h5, c2: w6 d4 h4; a: w3, b: w5, both 2x2 cross-section.
// Solution: both in c1 (c1 then has zero slack beyond 2; b does not... b fits
// c2 too, so this task is not unique -- fine for env mechanics tests).
inline Task small_task() {
  Task t;
  t.compartments = {{"c1", {10, 5, 5}, "red"}, {"c2", {6, 4, 4}, "green"}};
  t.objects = {{"a", {3, 2, 2}, "blue"}, {"b", {5, 2, 2}, "yellow"}};
  t.solution = {{"a", "c1"}, {"b", "c1"}};
  t.step_budget = 50;
  return t;
}

// Unique by construction: x (w5 d3 h3) only fits c1 (w5 d3 h3); y (w4 d2 h2)
// then only fits c2 (w4 d3 h3).
inline Task unique_task() {
  Task t;
  t.compartments = {{"c1", {5, 3, 3}, "red"}, {"c2", {4, 3, 3}, "green"}};
  t.objects = {{"x", {5, 3, 3}, "blue"}, {"y", {4, 2, 2}, "yellow"}};
  t.solution = {{"x", "c1"}, {"y", "c2"}};
  t.step_budget = 50;
  return t;
}

inline Observation reset_obs(CupboardEnv& env, const Task& task, std::uint64_t seed = 0) {
  return env.reset(task, seed);
}

inline std::string state_fingerprint(const EnvState& s) {
  std::string out;
  for (const auto& [o, c] : s.placements) out += o + ":" + c + ";";
  out += "held=" + (s.held ? *s.held : std::string("-"));
  out += ";step=" + std::to_string(s.step);
  out += ";done=" + std::to_string(s.done);
  return out;
}

}  // namespace testutil
