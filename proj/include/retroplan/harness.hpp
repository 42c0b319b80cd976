#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "retroplan/pretrain.hpp"
#include "retroplan/reflection.hpp"
#include "retroplan/version.hpp"

namespace retroplan {

// ---------------------------------------------------------------------------
// statistics
// ---------------------------------------------------------------------------

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  int n = 0;
};

inline MetricStats compute_stats(const std::vector<double>& values) {
  MetricStats s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  for (double v : values) s.mean += v;
  s.mean /= s.n;
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (s.n - 1));
    s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

// One-sided exact sign test: probability of observing at least `wins`
// successes in wins + losses fair coin flips. Ties are excluded by the caller.
inline double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  double p = 0.0;
  for (int k = wins; k <= n; ++k)
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                  n * std::log(2.0));
  return std::min(1.0, p);
}

struct PairedComparison {
  int wins = 0;
  int losses = 0;
  int ties = 0;
  double mean_delta = 0.0;  // baseline minus arm
  double sign_p = 1.0;
};

inline PairedComparison compare_paired(const std::vector<double>& baseline,
                                       const std::vector<double>& arm) {
  if (baseline.size() != arm.size())
    throw std::invalid_argument("compare_paired: arm task counts differ");
  PairedComparison c;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const double d = baseline[i] - arm[i];
    c.mean_delta += d / static_cast<double>(baseline.size());
    if (d > 0)
      ++c.wins;
    else if (d < 0)
      ++c.losses;
    else
      ++c.ties;
  }
  c.sign_p = sign_test_p(c.wins, c.losses);
  return c;
}

// ---------------------------------------------------------------------------
// arms
// ---------------------------------------------------------------------------

struct ArmSpec {
  std::string name;
  EpisodeConfig cfg;
};

// Named ablation arms. "full" is the complete method on base weights;
// "vanilla" strips candidate sampling, test-time training and the external
// reflection context, leaving a greedy frozen policy.
inline EpisodeConfig make_arm_config(const std::string& name, EpisodeConfig base) {
  if (name == "full") return base;
  if (name == "lowrank") {
    base.update_mode = UpdateMode::LowRank;
    return base;
  }
  if (name == "no_ria") {
    base.ablations.ria = false;
    return base;
  }
  if (name == "no_roa") {
    base.ablations.roa = false;
    return base;
  }
  if (name == "no_act_loss") {
    base.ablations.act_loss = false;
    return base;
  }
  if (name == "no_int_loss") {
    base.ablations.int_loss = false;
    return base;
  }
  if (name == "no_reg_pairs") {
    base.ablations.reg_pairs = false;
    return base;
  }
  if (name == "no_retro") {
    base.ablations.retro = false;
    return base;
  }
  if (name == "no_ext_reflection") {
    base.ablations.ext_reflection = false;
    return base;
  }
  if (name == "vanilla") {
    base.ablations.ria = false;
    base.ablations.roa = false;
    base.ablations.ext_reflection = false;
    return base;
  }
  if (name == "vanilla3x") {
    base = make_arm_config("vanilla", base);
    base.budget_multiplier = 3.0;
    return base;
  }
  if (name == "receding_horizon") {
    base.receding_horizon = true;
    return base;
  }
  throw std::invalid_argument("unknown arm: " + name);
}

// Sweepable hyperparameters, one scalar at a time.
inline void apply_sweep_param(EpisodeConfig& cfg, const std::string& param, double value) {
  if (param == "N")
    cfg.hp.N = static_cast<int>(value);
  else if (param == "T")
    cfg.hp.T = value;
  else if (param == "K")
    cfg.hp.K = static_cast<int>(value);
  else if (param == "L")
    cfg.hp.L = static_cast<int>(value);
  else if (param == "rank")
    cfg.lora_rank = static_cast<int>(value);
  else if (param == "alpha")
    cfg.lora_alpha = value;
  else if (param == "budget_multiplier")
    cfg.budget_multiplier = value;
  else
    throw std::invalid_argument("unknown sweep param: " + param);
  cfg.validate();
}

// ---------------------------------------------------------------------------
// suite configuration
// ---------------------------------------------------------------------------

struct SuiteConfig {
  int n_tasks = 200;
  IntRange objects{6, 8};
  IntRange compartments{5, 6};
  int step_budget = 50;
  std::uint64_t master_seed = 1;
  std::vector<ArmSpec> arms;
  std::filesystem::path out_dir;
  GenRanges gen;
  EpisodeConfig base;
  PretrainConfig pretrain;

  json to_json() const {
    json arms_json = json::array();
    for (const auto& a : arms) arms_json.push_back({{"name", a.name}, {"config", a.cfg.to_json()}});
    return json{{"n_tasks", n_tasks},
                {"objects", {objects.lo, objects.hi}},
                {"compartments", {compartments.lo, compartments.hi}},
                {"step_budget", step_budget},
                {"master_seed", master_seed},
                {"arms", arms_json},
                {"gen",
                 {{"obj_w", {gen.obj_w_lo, gen.obj_w_hi}},
                  {"comp_w", {gen.comp_w_lo, gen.comp_w_hi}},
                  {"obj_dh", {gen.obj_dh_lo, gen.obj_dh_hi}},
                  {"comp_dh", {gen.comp_dh_lo, gen.comp_dh_hi}}}},
                {"pretrain", pretrain.to_json()}};
  }
};

inline std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& report_metric_names() {
  static const std::vector<std::string> names = {"fit_rate", "correct_rate", "success_rate",
                                                 "steps_used", "ttt_updates"};
  return names;
}

struct ArmReport {
  std::string name;
  int n_tasks = 0;
  int aborted = 0;
  std::map<std::string, MetricStats> metrics;
  std::vector<double> fit_per_task;  // task order; used for pairing
};

struct Report {
  std::string version;
  std::string config_hash;
  std::string baseline_arm;
  std::vector<ArmReport> arms;
  std::map<std::string, PairedComparison> paired_fit;  // arm -> baseline-vs-arm on fit_rate

  const ArmReport* find_arm(const std::string& name) const {
    for (const auto& a : arms)
      if (a.name == name) return &a;
    return nullptr;
  }

  json to_json() const {
    json arms_json = json::array();
    for (const auto& a : arms) {
      json mj;
      for (const auto& [k, s] : a.metrics)
        mj[k] = {{"mean", s.mean}, {"stddev", s.stddev}, {"stderr", s.stderr_mean}, {"n", s.n}};
      arms_json.push_back(
          {{"name", a.name}, {"n_tasks", a.n_tasks}, {"aborted", a.aborted}, {"metrics", mj}});
    }
    json paired;
    for (const auto& [k, c] : paired_fit)
      paired[k] = {{"wins", c.wins},
                   {"losses", c.losses},
                   {"ties", c.ties},
                   {"mean_delta", c.mean_delta},
                   {"sign_p", c.sign_p}};
    return json{{"version", version},
                {"config_hash", config_hash},
                {"baseline_arm", baseline_arm},
                {"arms", arms_json},
                {"paired_fit_vs_baseline", paired}};
  }
};

// ---------------------------------------------------------------------------
// benchmark runner
// ---------------------------------------------------------------------------

namespace detail {

inline std::string task_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task_%04d.json", index + 1);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace detail

// Re-aggregates a Report purely from manifest + trace files, verifying the
// config hash stamped on every trace line. `bench` writes its report through
// this same path, so a later `report` run reproduces it byte for byte.
inline Report aggregate_from_traces(const std::filesystem::path& out_dir) {
  std::ifstream mf(out_dir / "manifest.json");
  if (!mf) throw std::runtime_error("aggregate: missing manifest.json in " + out_dir.string());
  const json manifest = json::parse(mf);
  const std::string expected_hash = manifest.at("config_hash").get<std::string>();
  const int n_tasks = manifest.at("suite").at("n_tasks").get<int>();

  Report report;
  report.version = kVersion;
  report.config_hash = expected_hash;

  std::vector<std::string> arm_names;
  for (const auto& a : manifest.at("suite").at("arms")) arm_names.push_back(a.at("name").get<std::string>());
  report.baseline_arm = arm_names.empty() ? "" : arm_names.front();
  for (const auto& name : arm_names)
    if (name == "full") report.baseline_arm = "full";

  for (const auto& name : arm_names) {
    ArmReport arm;
    arm.name = name;
    std::vector<double> fit, correct, success, steps, updates;
    for (int t = 0; t < n_tasks; ++t) {
      const auto path = out_dir / "traces" / name / (detail::task_file_name(t) + std::string(".jsonl"));
      const std::vector<json> events = read_trace(path);
      if (events.empty()) throw std::runtime_error("aggregate: empty trace " + path.string());
      for (const auto& e : events)
        if (e.at("cfg").get<std::string>() != expected_hash)
          throw std::runtime_error("aggregate: config hash mismatch in " + path.string());
      const json& last = events.back();
      if (last.at("event").get<std::string>() != "episode_end")
        throw std::runtime_error("aggregate: truncated trace " + path.string());
      const EpisodeMetrics m = metrics_from_json(last.at("metrics"));
      const std::string status = last.at("status").get<std::string>();
      if (status == "aborted") ++arm.aborted;
      fit.push_back(m.fit_rate);
      correct.push_back(m.correct_rate);
      success.push_back(status != "aborted" && m.success ? 1.0 : 0.0);
      steps.push_back(m.steps_used);
      updates.push_back(m.ttt_updates);
    }
    arm.n_tasks = n_tasks;
    arm.metrics["fit_rate"] = compute_stats(fit);
    arm.metrics["correct_rate"] = compute_stats(correct);
    arm.metrics["success_rate"] = compute_stats(success);
    arm.metrics["steps_used"] = compute_stats(steps);
    arm.metrics["ttt_updates"] = compute_stats(updates);
    arm.fit_per_task = std::move(fit);
    report.arms.push_back(std::move(arm));
  }

  const ArmReport* baseline = report.find_arm(report.baseline_arm);
  if (baseline)
    for (const auto& arm : report.arms)
      if (arm.name != report.baseline_arm)
        report.paired_fit[arm.name] = compare_paired(baseline->fit_per_task, arm.fit_per_task);
  return report;
}

inline std::string report_to_text(const Report& report) { return report.to_json().dump(2) + "\n"; }

inline std::string plot_data_csv(const Report& report) {
  std::string csv = "arm,metric,mean,stderr\n";
  for (const auto& arm : report.arms)
    for (const auto& metric : report_metric_names()) {
      const MetricStats& s = arm.metrics.at(metric);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g\n", arm.name.c_str(), metric.c_str(),
                    s.mean, s.stderr_mean);
      csv += buf;
    }
  return csv;
}

struct BenchmarkRun {
  Report report;
  int aborted_episodes = 0;
  std::filesystem::path out_dir;
};

// Paired-design benchmark: one task set and one env seed per task, shared by
// every arm; arms differ only in episode config. All artifacts (tasks, shared
// checkpoint, per-episode traces, manifest, report, plot data) land in
// suite.out_dir.
inline BenchmarkRun run_benchmark(const SuiteConfig& suite) {
  if (suite.arms.empty()) throw std::invalid_argument("run_benchmark: no arms");
  if (suite.n_tasks < 1) throw std::invalid_argument("run_benchmark: n_tasks must be >= 1");
  for (const auto& arm : suite.arms) arm.cfg.validate();

  const std::string hash = config_hash(suite.to_json());
  std::filesystem::create_directories(suite.out_dir);

  Rng task_rng(derive_seed(suite.master_seed, RngStream::bench_tasks));
  Rng seed_rng(derive_seed(suite.master_seed, RngStream::bench_seeds));

  std::vector<Task> tasks;
  std::vector<std::uint64_t> episode_seeds;
  json task_files = json::array();
  for (int t = 0; t < suite.n_tasks; ++t) {
    const std::uint64_t gen_seed = task_rng.next_u64();
    tasks.push_back(generate_task(gen_seed, suite.objects.draw(task_rng),
                                  suite.compartments.draw(task_rng), suite.gen,
                                  suite.step_budget));
    episode_seeds.push_back(seed_rng.next_u64());
    const std::string fname = detail::task_file_name(t);
    detail::write_text_file(suite.out_dir / "tasks" / fname, task_to_json(tasks.back()).dump(2) + "\n");
    task_files.push_back("tasks/" + fname);
  }

  const PretrainResult pre = pretrain_models(suite.master_seed, suite.gen, suite.objects,
                                             suite.compartments, suite.pretrain);
  save_checkpoint(suite.out_dir / "checkpoint.bin", pre.models.policy, pre.models.scorer);

  json manifest{{"version", kVersion},
                {"config_hash", hash},
                {"suite", suite.to_json()},
                {"tasks", task_files},
                {"episode_seeds", episode_seeds}};
  detail::write_text_file(suite.out_dir / "manifest.json", manifest.dump(2) + "\n");

  int aborted = 0;
  for (const auto& arm : suite.arms) {
    for (int t = 0; t < suite.n_tasks; ++t) {
      TraceSink sink(suite.out_dir / "traces" / arm.name /
                         (detail::task_file_name(t) + std::string(".jsonl")),
                     episode_seeds[t], hash);
      const EpisodeResult r = run_episode(tasks[t], pre.models, arm.cfg, episode_seeds[t], sink);
      if (r.status == "aborted") ++aborted;
    }
  }

  BenchmarkRun run;
  run.out_dir = suite.out_dir;
  run.aborted_episodes = aborted;
  run.report = aggregate_from_traces(suite.out_dir);
  detail::write_text_file(suite.out_dir / "report.json", report_to_text(run.report));
  detail::write_text_file(suite.out_dir / "plot_data.csv", plot_data_csv(run.report));
  return run;
}

// One-parameter sweep expressed as a set of full-method arms. The paired task
// set is identical across values, so the emitted curve is directly comparable
// point to point.
inline std::vector<ArmSpec> sweep_arms(const EpisodeConfig& base, const std::string& param,
                                       const std::vector<double>& values) {
  std::vector<ArmSpec> arms;
  for (double v : values) {
    EpisodeConfig cfg = base;
    apply_sweep_param(cfg, param, v);
    char buf[64];
    if (v == std::floor(v))
      std::snprintf(buf, sizeof(buf), "%s_%lld", param.c_str(), static_cast<long long>(v));
    else
      std::snprintf(buf, sizeof(buf), "%s_%g", param.c_str(), v);
    arms.push_back({buf, cfg});
  }
  return arms;
}

inline std::string sweep_curve_csv(const Report& report, const std::string& param,
                                   const std::vector<double>& values) {
  std::string csv = "param,value,metric,mean,stderr\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ArmReport& arm = report.arms.at(i);
    for (const auto& metric : report_metric_names()) {
      const MetricStats& s = arm.metrics.at(metric);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.10g,%s,%.10g,%.10g\n", param.c_str(), values[i],
                    metric.c_str(), s.mean, s.stderr_mean);
      csv += buf;
    }
  }
  return csv;
}

}  // namespace retroplan
