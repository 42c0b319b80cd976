#pragma once

#include <array>
#include <string>
#include <vector>

#include "retroplan/oracle.hpp"
#include "retroplan/rng.hpp"
#include "retroplan/types.hpp"

namespace retroplan {

// Integer dim ranges for procedural generation (inclusive).
struct GenRanges {
  int obj_w_lo = 2, obj_w_hi = 9;
  int comp_w_lo = 6, comp_w_hi = 14;
  int obj_dh_lo = 2, obj_dh_hi = 6;
  int comp_dh_lo = 3, comp_dh_hi = 7;
};

enum class Verdict { Unique, Multiple, None };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unique: return "unique";
    case Verdict::Multiple: return "multiple";
    case Verdict::None: return "none";
  }
  return "?";
}

struct ValidationResult {
  Verdict verdict = Verdict::None;
  bool solution_matches = false;  // meaningful when verdict == Unique
};

// Exact verdict on the number of complete feasible assignments, plus a check
// that the stored solution is the single one when unique. Counting stops at 2.
inline ValidationResult validate_task(const Task& task) {
  std::map<std::string, std::string> found;
  const long long n = oracle::count_completions(EnvState{}, task, 2, &found);
  if (n == 0) return {Verdict::None, false};
  if (n >= 2) return {Verdict::Multiple, false};
  return {Verdict::Unique, found == task.solution};
}

namespace detail {

inline const std::array<const char*, 8>& color_palette() {
  static const std::array<const char*, 8> colors = {"red",    "green", "blue", "yellow",
                                                    "purple", "orange", "teal", "pink"};
  return colors;
}

}  // namespace detail

// Procedural generation of a task with a verified unique feasible assignment.
// Construction is solution-first (targets drawn, then dims packed tightly
// around them) and every candidate is confirmed unique by exhaustive count
// before acceptance. At least one compartment holds two or more objects so
// that ordering traps exist.
inline Task generate_task(std::uint64_t seed, int n_objects, int n_compartments,
                          const GenRanges& ranges = {}, int step_budget = 50,
                          int max_attempts = 5000) {
  if (n_objects < 2 || n_objects > 10)
    throw std::invalid_argument("generate_task: n_objects must be in [2, 10]");
  if (n_compartments < 2 || n_compartments > 8)
    throw std::invalid_argument("generate_task: n_compartments must be in [2, 8]");

  Rng rng(derive_seed(seed, RngStream::taskgen));

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // Target assignment; force a shared compartment when the draw gives none.
    std::vector<int> target(n_objects);
    std::vector<int> count(n_compartments, 0);
    for (int& t : target) t = rng.uniform_int(0, n_compartments - 1);
    bool shared = false;
    for (int t : target) shared = shared || ++count[t] >= 2;
    if (!shared) {
      --count[target[1]];
      target[1] = target[0];
      ++count[target[0]];
    }

    // Compartment dims: used compartments sized to their load, empty ones
    // drawn small so they rarely admit stray objects.
    std::vector<Dims> comp_dims(n_compartments);
    bool bad = false;
    for (int c = 0; c < n_compartments; ++c) {
      if (count[c] > 0) {
        const int min_w = std::max(ranges.comp_w_lo, count[c] * ranges.obj_w_lo);
        if (min_w > ranges.comp_w_hi) {
          bad = true;
          break;
        }
        comp_dims[c] = {rng.uniform_int(min_w, ranges.comp_w_hi),
                        rng.uniform_int(ranges.comp_dh_lo, ranges.comp_dh_hi),
                        rng.uniform_int(ranges.comp_dh_lo, ranges.comp_dh_hi)};
      } else {
        comp_dims[c] = {rng.uniform_int(ranges.comp_w_lo, ranges.comp_w_lo + 2),
                        ranges.comp_dh_lo, ranges.comp_dh_lo};
      }
    }
    if (bad) continue;

    // Object widths: fill each used compartment nearly to capacity so that
    // alternative assignments are rare and the verifier accepts often.
    std::vector<Dims> obj_dims(n_objects);
    std::vector<std::vector<int>> members(n_compartments);
    for (int o = 0; o < n_objects; ++o) members[target[o]].push_back(o);
    for (int c = 0; c < n_compartments && !bad; ++c) {
      const int k = static_cast<int>(members[c].size());
      if (k == 0) continue;
      int budget = comp_dims[c].width;
      std::vector<int> widths(k);
      for (int i = 0; i < k; ++i) {
        const int left = k - 1 - i;
        const int hi = std::min(ranges.obj_w_hi, budget - left * ranges.obj_w_lo);
        if (hi < ranges.obj_w_lo) {
          bad = true;
          break;
        }
        widths[i] = rng.uniform_int(ranges.obj_w_lo, hi);
        budget -= widths[i];
      }
      if (bad) break;
      const int slack_target = rng.uniform_int(0, 1);
      for (int guard = 0; budget > slack_target && guard < 64; ++guard) {
        const int i = rng.uniform_int(0, k - 1);
        if (widths[i] < ranges.obj_w_hi) {
          ++widths[i];
          --budget;
        }
      }
      for (int i = 0; i < k; ++i) {
        const int o = members[c][i];
        obj_dims[o].width = widths[i];
        obj_dims[o].depth = rng.uniform_int(ranges.obj_dh_lo, std::min(ranges.obj_dh_hi, comp_dims[c].depth));
        obj_dims[o].height = rng.uniform_int(ranges.obj_dh_lo, std::min(ranges.obj_dh_hi, comp_dims[c].height));
      }
    }
    if (bad) continue;

    // Shuffle the object listing so ids do not group by compartment.
    std::vector<int> order(n_objects);
    for (int i = 0; i < n_objects; ++i) order[i] = i;
    for (int i = n_objects - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);

    Task task;
    task.step_budget = step_budget;
    const auto& colors = detail::color_palette();
    for (int c = 0; c < n_compartments; ++c)
      task.compartments.push_back({"c" + std::to_string(c + 1), comp_dims[c], colors[c % colors.size()]});
    for (int i = 0; i < n_objects; ++i) {
      const int o = order[i];
      const std::string id = "o" + std::to_string(i + 1);
      task.objects.push_back({id, obj_dims[o], colors[(i + 3) % colors.size()]});
      task.solution[id] = "c" + std::to_string(target[o] + 1);
    }

    const ValidationResult v = validate_task(task);
    if (v.verdict == Verdict::Unique && v.solution_matches) return task;
  }
  throw std::runtime_error("generate_task: no unique-solution instance within " +
                           std::to_string(max_attempts) + " attempts");
}

}  // namespace retroplan
