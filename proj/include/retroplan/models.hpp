#pragma once

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "retroplan/memory.hpp"
#include "retroplan/rng.hpp"

namespace retroplan {

enum class UpdateMode { Full, LowRank };

inline const char* to_string(UpdateMode m) { return m == UpdateMode::Full ? "full" : "lowrank"; }

inline UpdateMode update_mode_from_string(const std::string& s) {
  if (s == "full") return UpdateMode::Full;
  if (s == "lowrank") return UpdateMode::LowRank;
  throw std::invalid_argument("unknown update mode: " + s);
}

struct Hyperparams {
  int N = 6;                 // candidates per decision
  double T = 1.25;           // sampling temperature
  double eta_phi = 5e-3;     // scorer learning rate
  int E = 5;                 // supervised epochs per TTT round
  double eta_theta = 1e-3;   // policy learning rate
  int rl_steps = 3;          // REINFORCE steps per TTT round
  double clip_sup = 0.3;     // global-norm clip, supervised
  double clip_rl = 0.5;      // global-norm clip, RL
  int K = 5;                 // working memory window
  int L = 4;                 // regularization pairs per round

  void validate() const {
    if (N < 1 || E < 1 || rl_steps < 1 || K < 1 || L < 0)
      throw std::invalid_argument("hyperparams: counts must be positive");
    if (!(T > 0.0) || !(eta_phi > 0.0) || !(eta_theta > 0.0) || !(clip_sup > 0.0) || !(clip_rl > 0.0))
      throw std::invalid_argument("hyperparams: rates, clips and T must be > 0");
  }
};

// ---------------------------------------------------------------------------
// low-rank adapter: effective delta = (alpha / rank) * A * B, base frozen
// ---------------------------------------------------------------------------

struct LowRankAdapter {
  int rank = 8;
  double alpha = 16.0;
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // rows x rank
  std::vector<double> b;  // rank x cols, starts at zero so the initial delta is zero

  static LowRankAdapter init(int rows, int cols, int rank, double alpha, Rng& rng) {
    LowRankAdapter ad;
    ad.rank = rank;
    ad.alpha = alpha;
    ad.rows = rows;
    ad.cols = cols;
    ad.a.resize(static_cast<std::size_t>(rows) * rank);
    ad.b.assign(static_cast<std::size_t>(rank) * cols, 0.0);
    for (auto& v : ad.a) v = rng.uniform_real(-0.1, 0.1);
    return ad;
  }

  double scale() const { return alpha / rank; }

  // dst += scale * A * B, dst is rows x cols row-major.
  void add_delta(std::vector<double>& dst) const {
    const double s = scale();
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < rank; ++k) {
        const double aik = s * a[static_cast<std::size_t>(i) * rank + k];
        if (aik == 0.0) continue;
        for (int j = 0; j < cols; ++j)
          dst[static_cast<std::size_t>(i) * cols + j] += aik * b[static_cast<std::size_t>(k) * cols + j];
      }
  }
};

// ---------------------------------------------------------------------------
// action policy: linear logits over features
// ---------------------------------------------------------------------------

struct PolicyModel {
  std::vector<double> weights;  // kFeatureDim
  UpdateMode update_mode = UpdateMode::Full;
  std::optional<LowRankAdapter> adapter;  // 1 x kFeatureDim

  static PolicyModel zeros() { return PolicyModel{std::vector<double>(kFeatureDim, 0.0), UpdateMode::Full, {}}; }

  void enable_lowrank(int rank, double alpha, Rng& rng) {
    update_mode = UpdateMode::LowRank;
    adapter = LowRankAdapter::init(1, kFeatureDim, rank, alpha, rng);
  }

  std::vector<double> effective_weights() const {
    std::vector<double> w = weights;
    if (update_mode == UpdateMode::LowRank && adapter) adapter->add_delta(w);
    return w;
  }

  double logit(const FeatureVector& f) const {
    const std::vector<double> w = effective_weights();
    double z = 0.0;
    for (int j = 0; j < kFeatureDim; ++j) z += w[j] * f[j];
    return z;
  }

  std::vector<std::span<double>> trainable_params() {
    if (update_mode == UpdateMode::LowRank) {
      if (!adapter) throw std::logic_error("policy: lowrank mode without adapter");
      return {std::span<double>(adapter->a), std::span<double>(adapter->b)};
    }
    return {std::span<double>(weights)};
  }
};

// ---------------------------------------------------------------------------
// internal scorer: one-hidden-layer perceptron, logistic output in (0, 1)
// ---------------------------------------------------------------------------

struct ScorerModel {
  int hidden = 8;
  std::vector<double> w1;  // hidden x kFeatureDim row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  UpdateMode update_mode = UpdateMode::Full;
  std::optional<LowRankAdapter> adapter;  // on w1

  static ScorerModel zeros(int hidden = 8) {
    ScorerModel m;
    m.hidden = hidden;
    m.w1.assign(static_cast<std::size_t>(hidden) * kFeatureDim, 0.0);
    m.b1.assign(hidden, 0.0);
    m.w2.assign(hidden, 0.0);
    return m;
  }

  // Symmetry-breaking init; zero weights would leave the hidden layer dead.
  static ScorerModel random_init(int hidden, Rng& rng, double span = 0.5) {
    ScorerModel m = zeros(hidden);
    for (auto& v : m.w1) v = rng.uniform_real(-span, span);
    for (auto& v : m.b1) v = rng.uniform_real(-span, span);
    for (auto& v : m.w2) v = rng.uniform_real(-span, span);
    m.b2 = rng.uniform_real(-span, span);
    return m;
  }

  void enable_lowrank(int rank, double alpha, Rng& rng) {
    update_mode = UpdateMode::LowRank;
    adapter = LowRankAdapter::init(hidden, kFeatureDim, rank, alpha, rng);
  }

  std::vector<double> effective_w1() const {
    std::vector<double> w = w1;
    if (update_mode == UpdateMode::LowRank && adapter) adapter->add_delta(w);
    return w;
  }

  struct ForwardCache {
    std::vector<double> h;  // tanh activations
    double y = 0.0;         // logistic output
  };

  ForwardCache forward_cache(const FeatureVector& f) const {
    const std::vector<double> w = effective_w1();
    ForwardCache c;
    c.h.resize(hidden);
    double z = b2;
    for (int i = 0; i < hidden; ++i) {
      double u = b1[i];
      for (int j = 0; j < kFeatureDim; ++j) u += w[static_cast<std::size_t>(i) * kFeatureDim + j] * f[j];
      c.h[i] = std::tanh(u);
      z += w2[i] * c.h[i];
    }
    c.y = 1.0 / (1.0 + std::exp(-z));
    return c;
  }

  double forward(const FeatureVector& f) const { return forward_cache(f).y; }

  std::vector<std::span<double>> trainable_params() {
    if (update_mode == UpdateMode::LowRank) {
      if (!adapter) throw std::logic_error("scorer: lowrank mode without adapter");
      return {std::span<double>(adapter->a), std::span<double>(adapter->b)};
    }
    return {std::span<double>(w1), std::span<double>(b1), std::span<double>(w2),
            std::span<double>(&b2, 1)};
  }
};

// ---------------------------------------------------------------------------
// scoring, rewards, sampling
// ---------------------------------------------------------------------------

inline ReflectionRecord score_internal(const ScorerModel& scorer, const FeatureVector& f) {
  const double y = scorer.forward(f);
  const int s = static_cast<int>(std::lround(100.0 * y));
  return {std::clamp(s, 0, 100), Rationale::ModelEstimate};
}

inline ReflectionRecord score_internal(const ScorerModel& scorer, const Observation& obs,
                                       const Action& action) {
  return score_internal(scorer, featurize(obs, action));
}

// Exact affine map from the [0, 100] score scale to a [-1, 1] reward.
inline double reward_from_score(int score) {
  if (score < 0 || score > 100) throw std::invalid_argument("reward_from_score: out of range");
  return 2.0 * (score / 100.0) - 1.0;
}

inline std::vector<double> softmax(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax: temperature must be > 0");
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp((logits[i] - max_logit) / temperature);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

inline double log_softmax_at(std::span<const double> logits, std::size_t index) {
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  double lse = 0.0;
  for (double v : logits) lse += std::exp(v - max_logit);
  return logits[index] - max_logit - std::log(lse);
}

struct Candidate {
  Action action;
  double policy_logit = 0.0;
  ReflectionRecord internal{0, Rationale::ModelEstimate};
};

inline std::vector<double> policy_logits(const PolicyModel& policy, const ContextSnapshot& ctx) {
  const std::vector<double> w = policy.effective_weights();
  std::vector<double> logits(ctx.actions.size());
  for (std::size_t i = 0; i < ctx.actions.size(); ++i) {
    double z = 0.0;
    for (int j = 0; j < kFeatureDim; ++j) z += w[j] * ctx.features[i][j];
    logits[i] = z;
  }
  return logits;
}

// N i.i.d. draws from softmax(logits / T), deduplicated preserving first-draw
// order. High temperature spreads the draws across the action set.
inline std::vector<Candidate> sample_candidates(const PolicyModel& policy,
                                                const ContextSnapshot& ctx, int N, double T,
                                                Rng& rng) {
  if (ctx.actions.empty()) throw std::runtime_error("sample_candidates: empty action set");
  if (N < 1) throw std::invalid_argument("sample_candidates: N must be >= 1");
  const std::vector<double> logits = policy_logits(policy, ctx);
  const std::vector<double> p = softmax(logits, T);
  std::vector<Candidate> out;
  std::vector<bool> seen(ctx.actions.size(), false);
  for (int n = 0; n < N; ++n) {
    const std::size_t idx = rng.weighted_index(p);
    if (seen[idx]) continue;
    seen[idx] = true;
    out.push_back({ctx.actions[idx], logits[idx], {}});
  }
  return out;
}

inline std::vector<Candidate> sample_candidates(const PolicyModel& policy, const Observation& obs,
                                                const std::vector<Action>& actions, int N, double T,
                                                std::uint64_t rng_seed) {
  ContextSnapshot ctx;
  ctx.obs = obs;
  ctx.actions = actions;
  for (const auto& a : actions) ctx.features.push_back(featurize(obs, a));
  Rng rng(rng_seed);
  return sample_candidates(policy, ctx, N, T, rng);
}

// Highest-logit action, ties to the earliest position. Used by the no-RIA
// ablation (N=1 at the greedy limit) and by receding-horizon rollouts.
inline Candidate greedy_candidate(const PolicyModel& policy, const ContextSnapshot& ctx) {
  if (ctx.actions.empty()) throw std::runtime_error("greedy_candidate: empty action set");
  const std::vector<double> logits = policy_logits(policy, ctx);
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return {ctx.actions[best], logits[best], {}};
}

inline double policy_logprob(const PolicyModel& policy, const ContextSnapshot& ctx,
                             std::size_t chosen) {
  if (chosen >= ctx.actions.size()) throw std::invalid_argument("policy_logprob: bad index");
  return log_softmax_at(policy_logits(policy, ctx), chosen);
}

inline double policy_logprob(const PolicyModel& policy, const Observation& obs,
                             const std::vector<Action>& actions, const Action& chosen) {
  ContextSnapshot ctx;
  ctx.obs = obs;
  ctx.actions = actions;
  for (const auto& a : actions) ctx.features.push_back(featurize(obs, a));
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == chosen) return policy_logprob(policy, ctx, i);
  throw std::invalid_argument("policy_logprob: chosen action not in set");
}

// ---------------------------------------------------------------------------
// losses and gradients (exposed separately so tests can check them against
// finite differences without clipping in the way)
// ---------------------------------------------------------------------------

struct LossGrad {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;  // aligned with trainable_params()
};

inline double global_norm(const std::vector<std::vector<double>>& grads) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (double v : g) sq += v * v;
  return std::sqrt(sq);
}

inline void clip_global_norm(std::vector<std::vector<double>>& grads, double bound) {
  const double norm = global_norm(grads);
  if (norm <= bound || norm == 0.0) return;
  const double s = bound / norm;
  for (auto& g : grads)
    for (double& v : g) v *= s;
}

// Mean squared error between the scorer output and record.score / 100 over
// all examples (retro and reg alike).
inline LossGrad scorer_loss_grad(const ScorerModel& scorer, std::span<const TrainExample> batch) {
  if (batch.empty()) throw std::invalid_argument("scorer_loss_grad: empty batch");
  const bool lowrank = scorer.update_mode == UpdateMode::LowRank;
  const double m = static_cast<double>(batch.size());

  LossGrad out;
  std::vector<double> d_w1(scorer.w1.size(), 0.0), d_b1(scorer.hidden, 0.0),
      d_w2(scorer.hidden, 0.0);
  double d_b2 = 0.0;
  std::vector<double> d_a, d_b;
  if (lowrank) {
    d_a.assign(scorer.adapter->a.size(), 0.0);
    d_b.assign(scorer.adapter->b.size(), 0.0);
  }

  for (const auto& ex : batch) {
    const FeatureVector& x = ex.features();
    const auto cache = scorer.forward_cache(x);
    const double target = ex.record.score / 100.0;
    const double err = cache.y - target;
    out.loss += err * err / m;

    const double dz = (2.0 * err / m) * cache.y * (1.0 - cache.y);
    d_b2 += dz;
    for (int i = 0; i < scorer.hidden; ++i) {
      d_w2[i] += dz * cache.h[i];
      const double du = dz * scorer.w2[i] * (1.0 - cache.h[i] * cache.h[i]);
      if (lowrank) {
        const LowRankAdapter& ad = *scorer.adapter;
        const double s = ad.scale();
        for (int k = 0; k < ad.rank; ++k) {
          double bx = 0.0;
          for (int j = 0; j < kFeatureDim; ++j)
            bx += ad.b[static_cast<std::size_t>(k) * kFeatureDim + j] * x[j];
          d_a[static_cast<std::size_t>(i) * ad.rank + k] += s * du * bx;
          const double aik = ad.a[static_cast<std::size_t>(i) * ad.rank + k];
          for (int j = 0; j < kFeatureDim; ++j)
            d_b[static_cast<std::size_t>(k) * kFeatureDim + j] += s * du * aik * x[j];
        }
      } else {
        d_b1[i] += du;
        for (int j = 0; j < kFeatureDim; ++j)
          d_w1[static_cast<std::size_t>(i) * kFeatureDim + j] += du * x[j];
      }
    }
  }

  if (lowrank)
    out.grads = {std::move(d_a), std::move(d_b)};
  else
    out.grads = {std::move(d_w1), std::move(d_b1), std::move(d_w2), {d_b2}};
  return out;
}

// REINFORCE loss summed over retro-kind examples: -reward * logprob of the
// recorded action under the current parameters. Reg-kind examples carry
// model-generated scores, not outcome-grounded rewards, and are skipped.
inline LossGrad policy_loss_grad(const PolicyModel& policy, std::span<const TrainExample> batch) {
  const bool lowrank = policy.update_mode == UpdateMode::LowRank;
  LossGrad out;
  std::vector<double> d_w(kFeatureDim, 0.0);
  std::vector<double> d_a, d_b;
  if (lowrank) {
    d_a.assign(policy.adapter->a.size(), 0.0);
    d_b.assign(policy.adapter->b.size(), 0.0);
  }

  for (const auto& ex : batch) {
    if (ex.kind != ExampleKind::Retro) continue;
    const std::vector<double> logits = policy_logits(policy, ex.ctx);
    const std::vector<double> p = softmax(logits, 1.0);
    const double r = reward_from_score(ex.record.score);
    out.loss += -r * log_softmax_at(logits, ex.action_index);

    // d(-r log p_a)/d w_eff = -r (phi_a - sum_b p_b phi_b)
    std::vector<double> d_weff(kFeatureDim, 0.0);
    for (int j = 0; j < kFeatureDim; ++j) {
      double expectation = 0.0;
      for (std::size_t bidx = 0; bidx < p.size(); ++bidx)
        expectation += p[bidx] * ex.ctx.features[bidx][j];
      d_weff[j] = -r * (ex.features()[j] - expectation);
    }
    if (lowrank) {
      const LowRankAdapter& ad = *policy.adapter;
      const double s = ad.scale();
      for (int k = 0; k < ad.rank; ++k) {
        double acc = 0.0;
        for (int j = 0; j < kFeatureDim; ++j)
          acc += ad.b[static_cast<std::size_t>(k) * kFeatureDim + j] * d_weff[j];
        d_a[k] += s * acc;
        for (int j = 0; j < kFeatureDim; ++j)
          d_b[static_cast<std::size_t>(k) * kFeatureDim + j] += s * ad.a[k] * d_weff[j];
      }
    } else {
      for (int j = 0; j < kFeatureDim; ++j) d_w[j] += d_weff[j];
    }
  }

  if (lowrank)
    out.grads = {std::move(d_a), std::move(d_b)};
  else
    out.grads = {std::move(d_w)};
  return out;
}

namespace detail {

inline void apply_update(std::vector<std::span<double>> params,
                         const std::vector<std::vector<double>>& grads, double lr) {
  for (std::size_t t = 0; t < params.size(); ++t)
    for (std::size_t i = 0; i < params[t].size(); ++i) params[t][i] -= lr * grads[t][i];
}

inline void check_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) throw std::runtime_error(std::string(what) + ": non-finite loss");
}

}  // namespace detail

// E epochs of full-batch gradient descent on the squared score error, with
// global-norm clipping. Returns the loss at the start of each epoch.
inline std::vector<double> update_scorer_supervised(ScorerModel& scorer,
                                                    std::span<const TrainExample> batch,
                                                    const Hyperparams& h) {
  if (batch.empty()) throw std::invalid_argument("update_scorer_supervised: empty batch");
  std::vector<double> losses;
  for (int e = 0; e < h.E; ++e) {
    LossGrad lg = scorer_loss_grad(scorer, batch);
    detail::check_finite(lg.loss, "update_scorer_supervised");
    losses.push_back(lg.loss);
    clip_global_norm(lg.grads, h.clip_sup);
    detail::apply_update(scorer.trainable_params(), lg.grads, h.eta_phi);
  }
  return losses;
}

// rl_steps REINFORCE steps, gradients accumulated over all retro-kind
// examples then clipped. Returns the loss at the start of each step.
inline std::vector<double> update_policy_reinforce(PolicyModel& policy,
                                                   std::span<const TrainExample> batch,
                                                   const Hyperparams& h) {
  std::vector<double> losses;
  for (int s = 0; s < h.rl_steps; ++s) {
    LossGrad lg = policy_loss_grad(policy, batch);
    detail::check_finite(lg.loss, "update_policy_reinforce");
    losses.push_back(lg.loss);
    clip_global_norm(lg.grads, h.clip_rl);
    detail::apply_update(policy.trainable_params(), lg.grads, h.eta_theta);
  }
  return losses;
}

// ---------------------------------------------------------------------------
// checkpoints: named float64 arrays with shape headers, little-endian
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("checkpoint: truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline double read_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void write_array(std::ostream& out, const std::string& name,
                        const std::vector<std::uint32_t>& shape, std::span<const double> data) {
  write_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(out, static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) write_u32(out, d);
  for (double v : data) write_f64(out, v);
}

struct NamedArray {
  std::vector<std::uint32_t> shape;
  std::vector<double> data;
};

inline std::pair<std::string, NamedArray> read_array(std::istream& in) {
  const std::uint32_t name_len = read_u32(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  NamedArray arr;
  const std::uint32_t ndim = read_u32(in);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    arr.shape.push_back(read_u32(in));
    count *= arr.shape.back();
  }
  arr.data.resize(count);
  for (auto& v : arr.data) v = read_f64(in);
  return {name, arr};
}

}  // namespace detail

inline constexpr std::uint32_t kCheckpointMagic = 0x4b435052;  // "RPCK"
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void save_checkpoint(const std::filesystem::path& path, const PolicyModel& policy,
                            const ScorerModel& scorer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  detail::write_u32(out, kCheckpointMagic);
  detail::write_u32(out, kCheckpointVersion);
  detail::write_u32(out, 5);
  const auto h = static_cast<std::uint32_t>(scorer.hidden);
  const auto f = static_cast<std::uint32_t>(kFeatureDim);
  detail::write_array(out, "policy/weights", {f}, policy.weights);
  detail::write_array(out, "scorer/w1", {h, f}, scorer.w1);
  detail::write_array(out, "scorer/b1", {h}, scorer.b1);
  detail::write_array(out, "scorer/w2", {h}, scorer.w2);
  detail::write_array(out, "scorer/b2", {1}, std::span<const double>(&scorer.b2, 1));
}

inline std::pair<PolicyModel, ScorerModel> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  if (detail::read_u32(in) != kCheckpointMagic) throw std::runtime_error("checkpoint: bad magic");
  if (detail::read_u32(in) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t n = detail::read_u32(in);
  std::map<std::string, detail::NamedArray> arrays;
  for (std::uint32_t i = 0; i < n; ++i) arrays.insert(detail::read_array(in));

  const auto& w1 = arrays.at("scorer/w1");
  if (w1.shape.size() != 2 || w1.shape[1] != kFeatureDim)
    throw std::runtime_error("checkpoint: scorer shape mismatch");
  PolicyModel policy = PolicyModel::zeros();
  policy.weights = arrays.at("policy/weights").data;
  if (policy.weights.size() != kFeatureDim) throw std::runtime_error("checkpoint: policy shape mismatch");
  ScorerModel scorer = ScorerModel::zeros(static_cast<int>(w1.shape[0]));
  scorer.w1 = w1.data;
  scorer.b1 = arrays.at("scorer/b1").data;
  scorer.w2 = arrays.at("scorer/w2").data;
  scorer.b2 = arrays.at("scorer/b2").data.at(0);
  return {std::move(policy), std::move(scorer)};
}

}  // namespace retroplan
