#pragma once

#include <vector>

#include "retroplan/reflection.hpp"
#include "retroplan/taskgen.hpp"

namespace retroplan {

struct IntRange {
  int lo = 0;
  int hi = 0;

  int draw(Rng& rng) const { return rng.uniform_int(lo, hi); }
};

// Brief seeded pretraining pass that stands in for the supervised fine-tuning
// stage: the scorer is fit by regression to immediate oracle scores and the
// policy by behavior cloning toward the best-scoring enumerated action, over
// states visited by random rollouts on a training split of generated tasks.
// The split is seeded independently of the benchmark task stream.
struct PretrainConfig {
  int n_tasks = 16;
  int n_samples = 500;
  int epochs = 60;
  double scorer_lr = 0.2;
  double policy_lr = 0.1;
  int hidden = 8;

  json to_json() const {
    return json{{"n_tasks", n_tasks}, {"n_samples", n_samples}, {"epochs", epochs},
                {"scorer_lr", scorer_lr}, {"policy_lr", policy_lr}, {"hidden", hidden}};
  }
  static PretrainConfig from_json(const json& j) {
    PretrainConfig c;
    c.n_tasks = j.value("n_tasks", c.n_tasks);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.epochs = j.value("epochs", c.epochs);
    c.scorer_lr = j.value("scorer_lr", c.scorer_lr);
    c.policy_lr = j.value("policy_lr", c.policy_lr);
    c.hidden = j.value("hidden", c.hidden);
    return c;
  }
};

struct PretrainResult {
  ModelsBundle models;
  std::vector<double> scorer_losses;
  std::vector<double> policy_losses;
};

namespace detail {

struct BcExample {
  ContextSnapshot ctx;
  std::size_t best_index = 0;
};

// Cross-entropy gradient toward the target action: same algebra as the
// REINFORCE gradient with unit reward.
inline LossGrad bc_loss_grad(const PolicyModel& policy, const std::vector<BcExample>& batch) {
  LossGrad out;
  std::vector<double> d_w(kFeatureDim, 0.0);
  const double m = static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const std::vector<double> logits = policy_logits(policy, ex.ctx);
    const std::vector<double> p = softmax(logits, 1.0);
    out.loss += -log_softmax_at(logits, ex.best_index) / m;
    for (int j = 0; j < kFeatureDim; ++j) {
      double expectation = 0.0;
      for (std::size_t b = 0; b < p.size(); ++b) expectation += p[b] * ex.ctx.features[b][j];
      d_w[j] += -(ex.ctx.features[ex.best_index][j] - expectation) / m;
    }
  }
  out.grads = {std::move(d_w)};
  return out;
}

}  // namespace detail

inline PretrainResult pretrain_models(std::uint64_t master_seed, const GenRanges& ranges,
                                      IntRange objects, IntRange compartments,
                                      const PretrainConfig& cfg) {
  Rng task_rng(derive_seed(master_seed, RngStream::pretrain_tasks));
  Rng roll_rng(derive_seed(master_seed, RngStream::pretrain_rollout));

  std::vector<Task> tasks;
  for (int i = 0; i < cfg.n_tasks; ++i)
    tasks.push_back(generate_task(task_rng.next_u64(), objects.draw(task_rng),
                                  compartments.draw(task_rng), ranges));

  // Random-walk rollouts; every visited state yields one scorer regression
  // pair (random action, oracle score) and one behavior-cloning pair.
  std::vector<TrainExample> scorer_examples;
  std::vector<detail::BcExample> bc_examples;
  int task_cursor = 0;
  CupboardEnv env;
  std::optional<ReflectionRecord> prev_ext;

  auto start_walk = [&]() {
    env.reset(tasks[task_cursor % tasks.size()], 0);
    ++task_cursor;
    prev_ext.reset();
  };
  start_walk();

  while (static_cast<int>(scorer_examples.size()) < cfg.n_samples) {
    if (env.done()) start_walk();
    Observation obs = env.observation();
    obs.prev_external = prev_ext;
    const ContextSnapshot ctx = make_snapshot(obs);
    if (ctx.actions.empty()) {
      start_walk();
      continue;
    }

    // Score every action via one-step simulation to find the oracle-best.
    std::vector<ReflectionRecord> records(ctx.actions.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < ctx.actions.size(); ++i) {
      CupboardEnv sim = env;
      const EnvState before = sim.state();
      const auto [o2, exec] = sim.step(ctx.actions[i]);
      records[i] = oracle::immediate_score(before, ctx.actions[i], exec, sim.state(), env.task());
      if (records[i].score > records[best].score) best = i;
    }

    const std::size_t pick = static_cast<std::size_t>(
        roll_rng.uniform_int(0, static_cast<int>(ctx.actions.size()) - 1));
    scorer_examples.push_back({ctx, pick, records[pick], ExampleKind::Retro});
    bc_examples.push_back({ctx, best});

    // Advance the walk with a fresh random action.
    const std::size_t walk = static_cast<std::size_t>(
        roll_rng.uniform_int(0, static_cast<int>(ctx.actions.size()) - 1));
    const EnvState before = env.state();
    const auto [o2, exec] = env.step(ctx.actions[walk]);
    prev_ext = oracle::immediate_score(before, ctx.actions[walk], exec, env.state(), env.task());
  }

  PretrainResult result;
  Rng init_rng(derive_seed(master_seed, RngStream::model_init));
  result.models.scorer = ScorerModel::random_init(cfg.hidden, init_rng);
  result.models.policy = PolicyModel::zeros();

  for (int e = 0; e < cfg.epochs; ++e) {
    LossGrad sg = scorer_loss_grad(result.models.scorer, scorer_examples);
    detail::check_finite(sg.loss, "pretrain scorer");
    result.scorer_losses.push_back(sg.loss);
    detail::apply_update(result.models.scorer.trainable_params(), sg.grads, cfg.scorer_lr);

    LossGrad pg = detail::bc_loss_grad(result.models.policy, bc_examples);
    detail::check_finite(pg.loss, "pretrain policy");
    result.policy_losses.push_back(pg.loss);
    detail::apply_update(result.models.policy.trainable_params(), pg.grads, cfg.policy_lr);
  }
  return result;
}

}  // namespace retroplan
