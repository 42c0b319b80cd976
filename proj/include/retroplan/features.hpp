#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "retroplan/env.hpp"

namespace retroplan {

// Feature layout (F = 14): 12 geometric/progress channels plus two context
// channels fed from the previous external reflection. The context channels
// read as zero when no reflection is present (start of episode, or the
// no-external-reflection ablation which strips prev_external upstream).
inline constexpr int kFeatureDim = 14;
using FeatureVector = std::array<double, kFeatureDim>;

namespace feature {
inline constexpr int width_margin = 0;
inline constexpr int depth_margin = 1;
inline constexpr int height_margin = 2;
inline constexpr int occupancy = 3;
inline constexpr int volume_ratio = 4;
inline constexpr int kind_pick_up = 5;
inline constexpr int kind_put_in = 6;
inline constexpr int kind_take_out = 7;
inline constexpr int holding = 8;
inline constexpr int placed_fraction = 9;
inline constexpr int step_fraction = 10;
inline constexpr int bias = 11;
inline constexpr int prev_score = 12;
inline constexpr int prev_failed = 13;
}  // namespace feature

namespace detail {

inline double clamp_margin(double v) { return std::clamp(v, -1.0, 1.0); }

inline void check_enumerable(const Observation& obs, const Action& action) {
  const bool holding = obs.held.has_value();
  switch (action.kind) {
    case ActionKind::PickUp:
      if (holding || obs.placed(action.object) || !obs.find_object(action.object))
        throw std::invalid_argument("featurize: PickUp not enumerable for " + action.object);
      return;
    case ActionKind::PutIn:
      if (!holding || *obs.held != action.object || !obs.find_compartment(action.compartment))
        throw std::invalid_argument("featurize: PutIn not enumerable for " + to_string(action));
      return;
    case ActionKind::TakeOut:
      if (holding || !obs.placed(action.object))
        throw std::invalid_argument("featurize: TakeOut not enumerable for " + action.object);
      return;
  }
}

}  // namespace detail

// Deterministic featurization of one candidate action against the current
// observation. Uses agent-visible information only; the task solution is not
// part of the Observation type, so it cannot leak in.
inline FeatureVector featurize(const Observation& obs, const Action& action) {
  detail::check_enumerable(obs, action);
  FeatureVector f{};

  const Dims& obj = obs.find_object(action.object)->dims;
  const double obj_volume = static_cast<double>(obj.volume());

  switch (action.kind) {
    case ActionKind::PutIn: {
      const Compartment& comp = *obs.find_compartment(action.compartment);
      const double free_w = comp.dims.width - obs.occupied_width(comp.id);
      f[feature::width_margin] = detail::clamp_margin((free_w - obj.width) / comp.dims.width);
      f[feature::depth_margin] =
          detail::clamp_margin(static_cast<double>(comp.dims.depth - obj.depth) / comp.dims.depth);
      f[feature::height_margin] =
          detail::clamp_margin(static_cast<double>(comp.dims.height - obj.height) / comp.dims.height);
      f[feature::occupancy] = obs.occupied_width(comp.id) / static_cast<double>(comp.dims.width);
      f[feature::volume_ratio] = std::min(1.0, obj_volume / static_cast<double>(comp.dims.volume()));
      f[feature::kind_put_in] = 1.0;
      break;
    }
    case ActionKind::PickUp:
    case ActionKind::TakeOut: {
      // Best remaining fit for this object across all compartments, per axis.
      double wm = -1.0, dm = -1.0, hm = -1.0;
      for (const auto& c : obs.compartments) {
        const double free_w = c.dims.width - obs.occupied_width(c.id);
        wm = std::max(wm, detail::clamp_margin((free_w - obj.width) / c.dims.width));
        dm = std::max(dm, detail::clamp_margin(static_cast<double>(c.dims.depth - obj.depth) / c.dims.depth));
        hm = std::max(hm, detail::clamp_margin(static_cast<double>(c.dims.height - obj.height) / c.dims.height));
      }
      f[feature::width_margin] = wm;
      f[feature::depth_margin] = dm;
      f[feature::height_margin] = hm;
      if (action.kind == ActionKind::TakeOut) {
        const Compartment& comp = *obs.find_compartment(obs.placements.at(action.object));
        f[feature::occupancy] = obs.occupied_width(comp.id) / static_cast<double>(comp.dims.width);
        f[feature::volume_ratio] = std::min(1.0, obj_volume / static_cast<double>(comp.dims.volume()));
        f[feature::kind_take_out] = 1.0;
      } else {
        double max_comp_volume = 1.0;
        for (const auto& c : obs.compartments)
          max_comp_volume = std::max(max_comp_volume, static_cast<double>(c.dims.volume()));
        f[feature::volume_ratio] = std::min(1.0, obj_volume / max_comp_volume);
        f[feature::kind_pick_up] = 1.0;
      }
      break;
    }
  }

  f[feature::holding] = obs.held.has_value() ? 1.0 : 0.0;
  f[feature::placed_fraction] =
      static_cast<double>(obs.placements.size()) / static_cast<double>(obs.objects.size());
  f[feature::step_fraction] =
      obs.step_budget > 0 ? static_cast<double>(obs.step) / obs.step_budget : 0.0;
  f[feature::bias] = 1.0;
  if (obs.prev_external.has_value()) {
    f[feature::prev_score] = obs.prev_external->score / 100.0;
    f[feature::prev_failed] = obs.prev_external->rationale == Rationale::ExecFail ? 1.0 : 0.0;
  }

  for (double v : f)
    if (!std::isfinite(v)) throw std::runtime_error("featurize: non-finite feature");
  return f;
}

}  // namespace retroplan
