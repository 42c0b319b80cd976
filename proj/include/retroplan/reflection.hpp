#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "retroplan/env.hpp"
#include "retroplan/models.hpp"
#include "retroplan/oracle.hpp"
#include "retroplan/trace.hpp"

namespace retroplan {

// ---------------------------------------------------------------------------
// episode configuration
// ---------------------------------------------------------------------------

struct Triggers {
  bool buffer_full = true;  // |W| reaches K
  bool on_failure = true;   // an action failed to execute
};

struct AblationFlags {
  bool ria = true;             // off: single greedy action, no candidate sampling
  bool roa = true;             // off: no retro rounds, no parameter updates
  bool act_loss = true;        // off: skip the REINFORCE update
  bool int_loss = true;        // off: skip the supervised scorer update
  bool reg_pairs = true;       // off: no regularization pairs in the train set
  bool retro = true;           // off: immediate records stand in for hindsight targets
  bool ext_reflection = true;  // off: previous external reflection hidden from the context
};

struct EpisodeConfig {
  Hyperparams hp;
  Triggers triggers;
  AblationFlags ablations;
  double budget_multiplier = 1.0;
  UpdateMode update_mode = UpdateMode::Full;
  int lora_rank = 8;
  double lora_alpha = 16.0;
  bool receding_horizon = false;
  int receding_depth = 5;
  std::size_t retro_capacity = 64;

  void validate() const {
    hp.validate();
    if (budget_multiplier < 1.0)
      throw std::invalid_argument("episode config: budget_multiplier must be >= 1");
    if (lora_rank < 1 || !(lora_alpha > 0.0))
      throw std::invalid_argument("episode config: bad low-rank settings");
    if (receding_depth < 1) throw std::invalid_argument("episode config: receding_depth must be >= 1");
    if (retro_capacity < 1) throw std::invalid_argument("episode config: retro_capacity must be >= 1");
  }

  json to_json() const {
    return json{{"hyperparams",
                 {{"N", hp.N},
                  {"T", hp.T},
                  {"eta_phi", hp.eta_phi},
                  {"E", hp.E},
                  {"eta_theta", hp.eta_theta},
                  {"rl_steps", hp.rl_steps},
                  {"clip_sup", hp.clip_sup},
                  {"clip_rl", hp.clip_rl},
                  {"K", hp.K},
                  {"L", hp.L}}},
                {"triggers", {{"buffer_full", triggers.buffer_full}, {"on_failure", triggers.on_failure}}},
                {"ablations",
                 {{"ria", ablations.ria},
                  {"roa", ablations.roa},
                  {"act_loss", ablations.act_loss},
                  {"int_loss", ablations.int_loss},
                  {"reg_pairs", ablations.reg_pairs},
                  {"retro", ablations.retro},
                  {"ext_reflection", ablations.ext_reflection}}},
                {"budget_multiplier", budget_multiplier},
                {"update_mode", to_string(update_mode)},
                {"lora_rank", lora_rank},
                {"lora_alpha", lora_alpha},
                {"receding_horizon", receding_horizon},
                {"receding_depth", receding_depth},
                {"retro_capacity", retro_capacity}};
  }

  static EpisodeConfig from_json(const json& j) {
    EpisodeConfig cfg;
    if (j.contains("hyperparams")) {
      const json& h = j["hyperparams"];
      cfg.hp.N = h.value("N", cfg.hp.N);
      cfg.hp.T = h.value("T", cfg.hp.T);
      cfg.hp.eta_phi = h.value("eta_phi", cfg.hp.eta_phi);
      cfg.hp.E = h.value("E", cfg.hp.E);
      cfg.hp.eta_theta = h.value("eta_theta", cfg.hp.eta_theta);
      cfg.hp.rl_steps = h.value("rl_steps", cfg.hp.rl_steps);
      cfg.hp.clip_sup = h.value("clip_sup", cfg.hp.clip_sup);
      cfg.hp.clip_rl = h.value("clip_rl", cfg.hp.clip_rl);
      cfg.hp.K = h.value("K", cfg.hp.K);
      cfg.hp.L = h.value("L", cfg.hp.L);
    }
    if (j.contains("triggers")) {
      cfg.triggers.buffer_full = j["triggers"].value("buffer_full", true);
      cfg.triggers.on_failure = j["triggers"].value("on_failure", true);
    }
    if (j.contains("ablations")) {
      const json& a = j["ablations"];
      cfg.ablations.ria = a.value("ria", true);
      cfg.ablations.roa = a.value("roa", true);
      cfg.ablations.act_loss = a.value("act_loss", true);
      cfg.ablations.int_loss = a.value("int_loss", true);
      cfg.ablations.reg_pairs = a.value("reg_pairs", true);
      cfg.ablations.retro = a.value("retro", true);
      cfg.ablations.ext_reflection = a.value("ext_reflection", true);
    }
    cfg.budget_multiplier = j.value("budget_multiplier", 1.0);
    cfg.update_mode = update_mode_from_string(j.value("update_mode", std::string("full")));
    cfg.lora_rank = j.value("lora_rank", 8);
    cfg.lora_alpha = j.value("lora_alpha", 16.0);
    cfg.receding_horizon = j.value("receding_horizon", false);
    cfg.receding_depth = j.value("receding_depth", 5);
    cfg.retro_capacity = j.value("retro_capacity", std::size_t{64});
    cfg.validate();
    return cfg;
  }
};

struct ModelsBundle {
  PolicyModel policy;
  ScorerModel scorer;
};

// ---------------------------------------------------------------------------
// selection, retro rounds, train set
// ---------------------------------------------------------------------------

// Highest internal score wins; ties break to the earliest position.
inline std::size_t select_action_index(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw std::runtime_error("select_action: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].internal.score > candidates[best].internal.score) best = i;
  return best;
}

inline const Candidate& select_action(const std::vector<Candidate>& candidates) {
  return candidates[select_action_index(candidates)];
}

// Re-scores every entry in W and in the retro buffer against the current
// hindsight context; results overwrite per entry id. The caller clears W.
inline std::vector<RetroBuffer::Overwrite> retro_round(const std::vector<WorkingMemoryEntry>& window,
                                                       RetroBuffer& retro, const EnvState& state,
                                                       const Task& task) {
  const oracle::HindsightContext ctx(window, state, task);
  std::vector<RetroBuffer::Overwrite> log;
  for (const auto& [id, slot] : retro.slots())
    log.push_back(retro.put(slot.entry, oracle::hindsight_score(slot.entry, ctx)));
  for (const auto& entry : window)
    log.push_back(retro.put(entry, oracle::hindsight_score(entry, ctx)));
  return log;
}

// One retro-kind example per buffer entry plus up to L reg-kind examples on
// unexplored actions, labeled with the scorer's current output.
inline std::vector<TrainExample> build_train_set(const RetroBuffer& retro, const ScorerModel& scorer,
                                                 const Observation& obs, int L, Rng& rng,
                                                 bool reg_enabled = true) {
  std::vector<TrainExample> out;
  for (const auto& [id, slot] : retro.slots())
    out.push_back({slot.entry.ctx, slot.entry.action_index, slot.latest, ExampleKind::Retro});

  if (reg_enabled && L > 0) {
    const ContextSnapshot now = make_snapshot(obs);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < now.actions.size(); ++i)
      if (!retro.contains_action(now.actions[i])) pool.push_back(i);
    const int take = std::min<int>(L, static_cast<int>(pool.size()));
    for (int n = 0; n < take; ++n) {
      const int pick = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
      const std::size_t idx = pool[pick];
      pool.erase(pool.begin() + pick);
      out.push_back({now, idx, score_internal(scorer, now.features[idx]), ExampleKind::Reg});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// episode loop
// ---------------------------------------------------------------------------

struct EpisodeResult {
  EpisodeMetrics metrics;
  std::string status;  // success | budget_exhausted | aborted
  std::string error;   // set when aborted
};

namespace detail {

// Plans a short greedy action sequence on a simulated copy of the environment
// and keeps only the first action (receding-horizon mode, App-style variant).
inline Candidate plan_receding(const CupboardEnv& env, const PolicyModel& policy,
                               const std::optional<ReflectionRecord>& prev_ext, bool ext_enabled,
                               int depth) {
  CupboardEnv sim = env;
  std::optional<Candidate> first;
  for (int d = 0; d < depth && !sim.done(); ++d) {
    Observation obs = sim.observation();
    if (d == 0 && ext_enabled && prev_ext.has_value()) obs.prev_external = prev_ext;
    const ContextSnapshot ctx = make_snapshot(obs);
    if (ctx.actions.empty()) break;
    Candidate c = greedy_candidate(policy, ctx);
    if (!first) first = c;
    sim.step(c.action);
  }
  if (!first) throw std::runtime_error("plan_receding: no action available");
  return *first;
}

inline json metrics_to_json(const EpisodeMetrics& m) {
  return json{{"fit_rate", m.fit_rate},
              {"correct_rate", m.correct_rate},
              {"success", m.success},
              {"steps_used", m.steps_used},
              {"ttt_updates", m.ttt_updates}};
}

}  // namespace detail

inline EpisodeMetrics metrics_from_json(const json& j) {
  EpisodeMetrics m;
  m.fit_rate = j.at("fit_rate").get<double>();
  m.correct_rate = j.at("correct_rate").get<double>();
  m.success = j.at("success").get<bool>();
  m.steps_used = j.at("steps_used").get<int>();
  m.ttt_updates = j.at("ttt_updates").get<int>();
  return m;
}

// Runs one episode of the reflective planning loop: enumerate, sample N
// candidates at temperature T, score internally, select, execute, reflect
// externally, and on trigger run a retro round followed by test-time training
// of scorer and policy. Models are episode-local copies; ablation flags carve
// the loop down to the configured arm.
inline EpisodeResult run_episode(const Task& task, ModelsBundle models, const EpisodeConfig& cfg,
                                 std::uint64_t seed, TraceSink& trace) {
  cfg.validate();
  const Hyperparams& hp = cfg.hp;
  const int effective_budget =
      static_cast<int>(std::llround(task.step_budget * cfg.budget_multiplier));

  if (cfg.update_mode == UpdateMode::LowRank) {
    Rng adapter_rng(derive_seed(seed, RngStream::adapter_init));
    models.policy.enable_lowrank(cfg.lora_rank, cfg.lora_alpha, adapter_rng);
    models.scorer.enable_lowrank(cfg.lora_rank, cfg.lora_alpha, adapter_rng);
  }

  CupboardEnv env;
  env.reset(task, seed, effective_budget);
  Rng rng(derive_seed(seed, RngStream::episode));

  std::vector<WorkingMemoryEntry> window;
  RetroBuffer retro(cfg.retro_capacity);
  std::optional<ReflectionRecord> prev_ext;
  int ttt_updates = 0;

  trace.event("episode_start", 0,
              json{{"n_objects", task.objects.size()},
                   {"n_compartments", task.compartments.size()},
                   {"step_budget", effective_budget},
                   {"update_mode", to_string(cfg.update_mode)}});

  EpisodeResult result;
  try {
    while (!env.done()) {
      Observation obs = env.observation();
      if (cfg.ablations.ext_reflection && prev_ext.has_value()) obs.prev_external = prev_ext;
      const ContextSnapshot ctx = make_snapshot(obs);
      if (ctx.actions.empty()) throw std::runtime_error("episode: empty action set");
      const int step_index = env.state().step;

      std::vector<Candidate> candidates;
      if (cfg.receding_horizon)
        candidates.push_back(detail::plan_receding(env, models.policy, prev_ext,
                                                   cfg.ablations.ext_reflection, cfg.receding_depth));
      else if (cfg.ablations.ria)
        candidates = sample_candidates(models.policy, ctx, hp.N, hp.T, rng);
      else
        candidates.push_back(greedy_candidate(models.policy, ctx));

      std::size_t chosen_ctx_index = 0;
      json cand_json = json::array();
      for (auto& c : candidates) {
        for (std::size_t i = 0; i < ctx.actions.size(); ++i)
          if (ctx.actions[i] == c.action) {
            c.internal = score_internal(models.scorer, ctx.features[i]);
            break;
          }
        cand_json.push_back({{"action", to_string(c.action)},
                             {"logit", c.policy_logit},
                             {"internal_score", c.internal.score}});
      }
      const std::size_t sel = select_action_index(candidates);
      const Action action = candidates[sel].action;
      for (std::size_t i = 0; i < ctx.actions.size(); ++i)
        if (ctx.actions[i] == action) chosen_ctx_index = i;

      trace.event("candidates", step_index, json{{"candidates", cand_json}});
      trace.event("selection", step_index,
                  json{{"index", sel},
                       {"action", to_string(action)},
                       {"internal_score", candidates[sel].internal.score}});

      const EnvState before = env.state();
      const auto [obs_after, exec] = env.step(action);
      trace.event("execution", step_index,
                  json{{"action", to_string(action)}, {"success", exec.success}, {"reason", to_string(exec.reason)}});

      const ReflectionRecord external =
          oracle::immediate_score(before, action, exec, env.state(), task);
      trace.event("external_reflection", step_index,
                  json{{"score", external.score}, {"rationale", to_string(external.rationale)}});
      prev_ext = external;

      window.push_back(WorkingMemoryEntry{step_index, ctx, chosen_ctx_index, exec, external,
                                          step_index});

      if (env.done()) break;

      const bool buffer_hit = cfg.triggers.buffer_full && static_cast<int>(window.size()) >= hp.K;
      const bool failure_hit = cfg.triggers.on_failure && !exec.success;
      if (cfg.ablations.roa && (buffer_hit || failure_hit)) {
        std::vector<RetroBuffer::Overwrite> overwrites;
        if (cfg.ablations.retro) {
          overwrites = retro_round(window, retro, env.state(), task);
        } else {
          for (const auto& e : window) overwrites.push_back(retro.put(e, e.reflection));
        }
        json ow_json = json::array();
        for (const auto& ow : overwrites)
          ow_json.push_back({{"entry_id", ow.entry_id},
                             {"old_score", ow.old_record.score},
                             {"new_score", ow.new_record.score},
                             {"old_rationale", to_string(ow.old_record.rationale)},
                             {"new_rationale", to_string(ow.new_record.rationale)}});
        trace.event("retro_round", step_index,
                    json{{"wm_size", window.size()},
                         {"trigger", buffer_hit ? "buffer_full" : "on_failure"},
                         {"overwrites", ow_json}});

        Observation now = env.observation();
        if (cfg.ablations.ext_reflection) now.prev_external = prev_ext;
        const std::vector<TrainExample> train_set =
            build_train_set(retro, models.scorer, now, hp.L, rng, cfg.ablations.reg_pairs);
        int n_retro = 0, n_reg = 0;
        for (const auto& ex : train_set) (ex.kind == ExampleKind::Retro ? n_retro : n_reg)++;

        std::vector<double> scorer_losses, policy_losses;
        if (cfg.ablations.int_loss && !train_set.empty())
          scorer_losses = update_scorer_supervised(models.scorer, train_set, hp);
        if (cfg.ablations.act_loss && n_retro > 0)
          policy_losses = update_policy_reinforce(models.policy, train_set, hp);
        ++ttt_updates;
        trace.event("ttt_update", step_index,
                    json{{"n_retro", n_retro},
                         {"n_reg", n_reg},
                         {"scorer_losses", scorer_losses},
                         {"policy_losses", policy_losses}});
        window.clear();
      } else {
        while (static_cast<int>(window.size()) > hp.K) window.erase(window.begin());
      }
    }

    result.metrics = env.metrics();
    result.metrics.ttt_updates = ttt_updates;
    result.status = result.metrics.success ? "success" : "budget_exhausted";
  } catch (const std::exception& e) {
    result.metrics = env.metrics();
    result.metrics.ttt_updates = ttt_updates;
    result.status = "aborted";
    result.error = e.what();
  }

  trace.event("episode_end", env.state().step,
              json{{"status", result.status},
                   {"error", result.error},
                   {"metrics", detail::metrics_to_json(result.metrics)}});
  trace.flush();
  return result;
}

inline EpisodeResult run_episode(const Task& task, const ModelsBundle& models,
                                 const EpisodeConfig& cfg, std::uint64_t seed) {
  TraceSink sink = TraceSink::in_memory(seed, "");
  return run_episode(task, models, cfg, seed, sink);
}

}  // namespace retroplan
