// Command-line front end: task generation, single episodes, the ablation
// benchmark matrix, hyperparameter sweeps, and report re-aggregation.
//
// Exit codes: 0 ok, 1 usage error, 2 episode failures present, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retroplan/retroplan.hpp"

namespace fs = std::filesystem;
using namespace retroplan;

namespace {

IntRange parse_range(const std::string& text) {
  const auto dash = text.find('-');
  if (dash == std::string::npos) {
    const int v = std::stoi(text);
    return {v, v};
  }
  return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) values.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw CLI::ValidationError("--values", "no values given");
  return values;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

fs::path output_root() {
  if (const char* env = std::getenv("RETROPLAN_OUT")) return fs::path(env);
  return fs::path(".");
}

// Config file sections: [env] [models] [hyperparams] [triggers] [ablations] [suite].
struct AppConfig {
  EpisodeConfig episode;
  GenRanges gen;
  PretrainConfig pretrain;
  int step_budget = 50;
  int n_tasks = 200;
  IntRange objects{6, 8};
  IntRange compartments{5, 6};
  std::uint64_t master_seed = 1;
  std::vector<std::string> arms = {"full", "no_ria", "no_roa", "no_act_loss", "no_int_loss", "vanilla"};
};

AppConfig load_app_config(const std::string& path) {
  AppConfig app;
  if (path.empty()) return app;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(in);

  json episode_json;
  for (const char* section : {"hyperparams", "triggers", "ablations"})
    if (j.contains(section)) episode_json[section] = j[section];
  if (j.contains("models")) {
    const json& m = j["models"];
    if (m.contains("update_mode")) episode_json["update_mode"] = m["update_mode"];
    if (m.contains("lora_rank")) episode_json["lora_rank"] = m["lora_rank"];
    if (m.contains("lora_alpha")) episode_json["lora_alpha"] = m["lora_alpha"];
  }
  app.episode = EpisodeConfig::from_json(episode_json);

  if (j.contains("env")) {
    const json& e = j["env"];
    app.step_budget = e.value("step_budget", app.step_budget);
    auto range = [&](const char* key, int lo, int hi) {
      if (!e.contains(key)) return std::pair<int, int>{lo, hi};
      return std::pair<int, int>{e[key][0].get<int>(), e[key][1].get<int>()};
    };
    std::tie(app.gen.obj_w_lo, app.gen.obj_w_hi) = range("obj_w", app.gen.obj_w_lo, app.gen.obj_w_hi);
    std::tie(app.gen.comp_w_lo, app.gen.comp_w_hi) = range("comp_w", app.gen.comp_w_lo, app.gen.comp_w_hi);
    std::tie(app.gen.obj_dh_lo, app.gen.obj_dh_hi) = range("obj_dh", app.gen.obj_dh_lo, app.gen.obj_dh_hi);
    std::tie(app.gen.comp_dh_lo, app.gen.comp_dh_hi) =
        range("comp_dh", app.gen.comp_dh_lo, app.gen.comp_dh_hi);
  }
  if (j.contains("suite")) {
    const json& s = j["suite"];
    app.n_tasks = s.value("n_tasks", app.n_tasks);
    app.master_seed = s.value("master_seed", app.master_seed);
    if (s.contains("objects")) app.objects = {s["objects"][0].get<int>(), s["objects"][1].get<int>()};
    if (s.contains("compartments"))
      app.compartments = {s["compartments"][0].get<int>(), s["compartments"][1].get<int>()};
    if (s.contains("arms")) app.arms = s["arms"].get<std::vector<std::string>>();
    if (s.contains("pretrain")) app.pretrain = PretrainConfig::from_json(s["pretrain"]);
  }
  return app;
}

struct AblationCli {
  bool no_ria = false, no_roa = false, no_act_loss = false, no_int_loss = false;
  bool no_reg_pairs = false, no_retro = false, no_ext_reflection = false;
  bool receding_horizon = false;
  std::string update_mode;
  double budget_multiplier = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--no-ria", no_ria, "disable reflection-in-action (greedy single candidate)");
    cmd->add_flag("--no-roa", no_roa, "disable reflection-on-action (no test-time training)");
    cmd->add_flag("--no-act-loss", no_act_loss, "skip the policy REINFORCE update");
    cmd->add_flag("--no-int-loss", no_int_loss, "skip the scorer supervised update");
    cmd->add_flag("--no-reg-pairs", no_reg_pairs, "drop regularization pairs from the train set");
    cmd->add_flag("--no-retro", no_retro, "train on immediate scores instead of hindsight");
    cmd->add_flag("--no-ext-reflection", no_ext_reflection,
                  "hide the previous external reflection from the context");
    cmd->add_flag("--receding-horizon", receding_horizon, "plan a short greedy sequence each step");
    cmd->add_option("--update-mode", update_mode, "full|lowrank");
    cmd->add_option("--budget-multiplier", budget_multiplier, "scale the step budget (>= 1)");
  }

  void apply(EpisodeConfig& cfg) const {
    if (no_ria) cfg.ablations.ria = false;
    if (no_roa) cfg.ablations.roa = false;
    if (no_act_loss) cfg.ablations.act_loss = false;
    if (no_int_loss) cfg.ablations.int_loss = false;
    if (no_reg_pairs) cfg.ablations.reg_pairs = false;
    if (no_retro) cfg.ablations.retro = false;
    if (no_ext_reflection) cfg.ablations.ext_reflection = false;
    if (receding_horizon) cfg.receding_horizon = true;
    if (!update_mode.empty()) cfg.update_mode = update_mode_from_string(update_mode);
    if (budget_multiplier > 0.0) cfg.budget_multiplier = budget_multiplier;
    cfg.validate();
  }
};

SuiteConfig build_suite(const AppConfig& app, int n_tasks, std::uint64_t seed,
                        const std::vector<std::string>& arm_names, const fs::path& out_dir,
                        const std::string& objects, const std::string& compartments) {
  SuiteConfig suite;
  suite.n_tasks = n_tasks;
  suite.master_seed = seed;
  suite.objects = objects.empty() ? app.objects : parse_range(objects);
  suite.compartments = compartments.empty() ? app.compartments : parse_range(compartments);
  suite.step_budget = app.step_budget;
  suite.gen = app.gen;
  suite.base = app.episode;
  suite.pretrain = app.pretrain;
  suite.out_dir = out_dir;
  for (const auto& name : arm_names) suite.arms.push_back({name, make_arm_config(name, app.episode)});
  return suite;
}

int cmd_gen_tasks(std::uint64_t seed, int count, const std::string& objects,
                  const std::string& compartments, const fs::path& out, int budget,
                  const GenRanges& gen) {
  const IntRange obj_range = parse_range(objects);
  const IntRange comp_range = parse_range(compartments);
  fs::create_directories(out);
  Rng size_rng(derive_seed(seed, RngStream::bench_tasks));
  for (int i = 0; i < count; ++i) {
    const Task task = generate_task(seed + static_cast<std::uint64_t>(i), obj_range.draw(size_rng),
                                    comp_range.draw(size_rng), gen, budget);
    char name[32];
    std::snprintf(name, sizeof(name), "task_%04d.json", i + 1);
    std::ofstream file(out / name, std::ios::binary | std::ios::trunc);
    file << task_to_json(task).dump(2) << "\n";
  }
  std::cout << "wrote " << count << " tasks to " << out.string() << "\n";
  return 0;
}

int cmd_run(const fs::path& task_path, std::uint64_t seed, const fs::path& out,
            const EpisodeConfig& cfg, const std::string& checkpoint, std::uint64_t pretrain_seed,
            const AppConfig& app) {
  std::ifstream in(task_path);
  if (!in) throw CLI::ValidationError("--task", "cannot open " + task_path.string());
  const Task task = task_from_json(json::parse(in));

  ModelsBundle models;
  if (!checkpoint.empty()) {
    auto [policy, scorer] = load_checkpoint(checkpoint);
    models = {std::move(policy), std::move(scorer)};
  } else {
    models = pretrain_models(pretrain_seed, app.gen, app.objects, app.compartments, app.pretrain).models;
  }

  const std::string hash = config_hash(cfg.to_json());
  TraceSink sink(out / "trace.jsonl", seed, hash);
  const EpisodeResult result = run_episode(task, models, cfg, seed, sink);

  std::cout << sink.path().string() << "\n";
  std::cout << json{{"status", result.status},
                    {"fit_rate", result.metrics.fit_rate},
                    {"correct_rate", result.metrics.correct_rate},
                    {"success", result.metrics.success},
                    {"steps_used", result.metrics.steps_used},
                    {"ttt_updates", result.metrics.ttt_updates}}
                   .dump()
            << "\n";
  return result.status == "aborted" ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cupboard-fitting benchmark with reflective test-time planning"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")->configurable(false);

  // gen-tasks
  auto* gen = app.add_subcommand("gen-tasks", "generate unique-solution task files");
  std::uint64_t gen_seed = 1;
  int gen_count = 10, gen_budget = 50;
  std::string gen_objects = "6-10", gen_compartments = "6-8", gen_out;
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--count", gen_count, "number of tasks");
  gen->add_option("--objects", gen_objects, "object count or range, e.g. 6-10");
  gen->add_option("--compartments", gen_compartments, "compartment count or range");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--budget", gen_budget, "step budget per task");

  // run
  auto* run = app.add_subcommand("run", "run a single episode");
  std::string run_task, run_out, run_checkpoint;
  std::uint64_t run_seed = 1, run_pretrain_seed = 1;
  AblationCli run_flags;
  run->add_option("--task", run_task, "task file")->required();
  run->add_option("--seed", run_seed, "episode seed");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--checkpoint", run_checkpoint, "model checkpoint (otherwise pretrain)");
  run->add_option("--pretrain-seed", run_pretrain_seed, "seed for the fallback pretraining pass");
  run_flags.attach(run);

  // bench
  auto* bench = app.add_subcommand("bench", "run the ablation benchmark matrix");
  int bench_tasks = 200;
  std::uint64_t bench_seed = 1;
  std::string bench_arms, bench_out, bench_objects, bench_compartments;
  AblationCli bench_flags;
  bench->add_option("--tasks", bench_tasks, "number of paired tasks");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--arms", bench_arms, "comma-separated arm names");
  bench->add_option("--objects", bench_objects, "object count range");
  bench->add_option("--compartments", bench_compartments, "compartment count range");
  bench->add_option("--out", bench_out, "output directory");
  bench_flags.attach(bench);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one hyperparameter over a value list");
  std::string sweep_param, sweep_values, sweep_out, sweep_objects, sweep_compartments;
  int sweep_tasks = 50;
  std::uint64_t sweep_seed = 1;
  sweep->add_option("--param", sweep_param, "N|T|K|L|rank|alpha|budget_multiplier")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--tasks", sweep_tasks, "number of paired tasks");
  sweep->add_option("--seed", sweep_seed, "master seed");
  sweep->add_option("--objects", sweep_objects, "object count range");
  sweep->add_option("--compartments", sweep_compartments, "compartment count range");
  sweep->add_option("--out", sweep_out, "output directory");

  // report
  auto* report = app.add_subcommand("report", "re-aggregate a report from traces");
  std::string report_dir, report_out;
  report->add_option("--dir", report_dir, "benchmark output directory")->required();
  report->add_option("--out", report_out, "also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const AppConfig cfg = load_app_config(config_path);

    if (gen->parsed())
      return cmd_gen_tasks(gen_seed, gen_count, gen_objects, gen_compartments, gen_out, gen_budget,
                           cfg.gen);

    if (run->parsed()) {
      EpisodeConfig episode = cfg.episode;
      run_flags.apply(episode);
      const fs::path out = run_out.empty() ? output_root() / "run" : fs::path(run_out);
      return cmd_run(run_task, run_seed, out, episode, run_checkpoint, run_pretrain_seed, cfg);
    }

    if (bench->parsed()) {
      AppConfig local = cfg;
      bench_flags.apply(local.episode);
      const std::vector<std::string> arms = bench_arms.empty() ? local.arms : split_csv(bench_arms);
      const fs::path out = bench_out.empty() ? output_root() / "bench" : fs::path(bench_out);
      const SuiteConfig suite =
          build_suite(local, bench_tasks, bench_seed, arms, out, bench_objects, bench_compartments);
      const BenchmarkRun result = run_benchmark(suite);
      std::cout << "report: " << (out / "report.json").string() << "\n";
      for (const auto& arm : result.report.arms)
        std::cout << arm.name << ": fit=" << arm.metrics.at("fit_rate").mean
                  << " correct=" << arm.metrics.at("correct_rate").mean
                  << " success=" << arm.metrics.at("success_rate").mean << "\n";
      return result.aborted_episodes > 0 ? 2 : 0;
    }

    if (sweep->parsed()) {
      const std::vector<double> values = parse_values(sweep_values);
      const fs::path out =
          sweep_out.empty() ? output_root() / ("sweep_" + sweep_param) : fs::path(sweep_out);
      SuiteConfig suite =
          build_suite(cfg, sweep_tasks, sweep_seed, {}, out, sweep_objects, sweep_compartments);
      suite.arms = sweep_arms(cfg.episode, sweep_param, values);
      const BenchmarkRun result = run_benchmark(suite);
      detail::write_text_file(out / "curve.csv", sweep_curve_csv(result.report, sweep_param, values));
      std::cout << "curve: " << (out / "curve.csv").string() << "\n";
      return result.aborted_episodes > 0 ? 2 : 0;
    }

    if (report->parsed()) {
      const Report rep = aggregate_from_traces(report_dir);
      const std::string text = report_to_text(rep);
      if (!report_out.empty()) detail::write_text_file(report_out, text);
      std::cout << text;
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
