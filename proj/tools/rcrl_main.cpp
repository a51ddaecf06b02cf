#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcrl/env_robot.hpp"
#include "rcrl/harness.hpp"

namespace {

using namespace rcrl;

int cmd_train(const std::string& config_path, long seed_override, bool has_seed,
              const std::string& resume_ckpt, const std::string& out_override,
              bool no_cache) {
  RunConfig cfg = RunConfig::from_json_file(config_path);
  if (!out_override.empty()) cfg.out_root = out_override;
  if (has_seed) cfg.seeds = {static_cast<uint64_t>(seed_override)};

  if (!resume_ckpt.empty()) {
    const uint64_t seed = has_seed ? static_cast<uint64_t>(seed_override)
                                   : checkpoint_seed(resume_ckpt);
    const std::string dir = run_dir_for(cfg, seed);
    ensure_dir(dir);
    TrainingRun run(cfg, seed, dir);
    run.resume(resume_ckpt);
    const TrainResult r = run.run();
    std::printf("resumed seed %llu: %s at iteration %ld\n",
                (unsigned long long)seed,
                r.diverged ? "diverged" : (r.completed ? "completed" : "stopped"),
                r.iterations);
    std::ofstream(dir + "/COMPLETE", std::ios::trunc) << "done\n";
    return r.completed && !r.diverged ? 0 : 1;
  }

  const ExperimentResult res = run_experiment(cfg, !no_cache);
  int bad = 0;
  for (const auto& s : res.seeds) {
    std::printf("seed %llu: %s%s\n", (unsigned long long)s.seed,
                s.cached ? "cached" : (s.result.diverged ? "diverged" : "completed"),
                (!s.cached && s.result.switched) ? " (switched)" : "");
    if (!s.cached && s.result.diverged) ++bad;
  }
  std::printf("runs in %s\n", res.config_dir.c_str());
  return bad == 0 ? 0 : 1;
}

int cmd_ablate(const std::string& config_path, const std::string& variant,
               const std::string& out_override, bool no_cache) {
  RunConfig cfg = RunConfig::from_json_file(config_path);
  if (!out_override.empty()) cfg.out_root = out_override;
  const AblationResult res = run_ablation(cfg, variant, !no_cache);
  std::printf("reference: %s\nvariant:   %s\ncomparison: %s\n",
              res.reference.config_dir.c_str(), res.variant.config_dir.c_str(),
              res.comparison_csv.c_str());
  return 0;
}

int cmd_evaluate(const std::string& ckpt, int episodes, const std::string& traj_path,
                 uint64_t eval_seed) {
  RunConfig cfg = checkpoint_config(ckpt);
  const uint64_t seed = checkpoint_seed(ckpt);
  TrainingRun run(cfg, seed, ".");
  run.resume(ckpt);

  RngState rng = RngState::derive(eval_seed, 901);
  auto env = make_env(cfg);
  std::ofstream traj;
  if (!traj_path.empty()) {
    traj.open(traj_path, std::ios::trunc);
    traj << (cfg.is_robot() ? "episode,step,x,y,heading,v,omega,r_base,r_full\n"
                            : "episode,step,r_base,r_full\n");
  }
  auto act = [&](const Vec& o) {
    return run.sac() ? sac_select_action(*run.sac(), o, false, rng)
                     : td3_select_action(*run.td3(), o, false, rng);
  };
  // evaluate_policy handles the rollout; the trajectory dump needs its own
  // loop so it can see the env state between steps.
  EvalStats st;
  if (traj_path.empty()) {
    st = evaluate_policy(cfg, *env, rng, episodes, act);
  } else {
    for (int episode = 0; episode < episodes; ++episode) {
      Vec obs = env->reset(rng);
      long step = 0;
      Outcome out = Outcome::Running;
      double rb = 0, rc = 0;
      while (out == Outcome::Running) {
        const Vec a = act(obs);
        const StepResult sr = env->step(a);
        if (cfg.is_robot()) {
          const auto* re = static_cast<const RobotEnv*>(env.get());
          traj << episode << ',' << step << ',' << re->position().x() << ','
               << re->position().y() << ',' << re->heading() << ',' << re->speed()
               << ',' << re->angular_speed() << ',' << sr.rb_report << ','
               << sr.rb_report + cfg.w_c_report * sr.rc_report << '\n';
        } else {
          traj << episode << ',' << step << ',' << sr.rb_report << ','
               << sr.rb_report + cfg.w_c_report * sr.rc_report << '\n';
        }
        rb += sr.rb_report;
        rc += sr.rc_report;
        obs = sr.obs;
        out = sr.outcome;
        ++step;
      }
      st.rb_sum += rb;
      st.rc_sum += rc;
      st.return_report += rb + cfg.w_c_report * rc;
      if (out == Outcome::Goal) ++st.goals;
      if (out == Outcome::Timeout) ++st.timeouts;
      if (out == Outcome::Collision) ++st.collisions;
      ++st.episodes;
    }
    st.rb_sum /= episodes;
    st.rc_sum /= episodes;
    st.return_report /= episodes;
    st.success_rate = (double)st.goals / episodes;
  }
  std::printf("episodes %d  return_report %.6g  rb %.6g  rc %.6g", st.episodes,
              st.return_report, st.rb_sum, st.rc_sum);
  if (cfg.is_robot())
    std::printf("  goal/timeout/collision %d/%d/%d", st.goals, st.timeouts,
                st.collisions);
  std::printf("\n");
  return 0;
}

int cmd_summarize(const std::string& runs_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> found;
  for (auto it = fs::recursive_directory_iterator(runs_dir);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().filename() == "summary.json")
      found.push_back(it->path());
  }
  std::sort(found.begin(), found.end());
  std::printf("%-52s %5s %4s %6s %10s %10s\n", "run", "done", "div", "switch",
              "ret(50k)", "succ(50k)");
  for (const auto& p : found) {
    std::ifstream in(p);
    nlohmann::json s = nlohmann::json::parse(in);
    auto stat = [&](const char* key) -> std::string {
      if (!s.contains("last50k") || s["last50k"][key].is_null()) return "-";
      char b[32];
      std::snprintf(b, sizeof b, "%.4g", s["last50k"][key]["mean"].get<double>());
      return b;
    };
    std::string rel = fs::relative(p.parent_path(), runs_dir).string();
    std::printf("%-52s %5s %4s %6ld %10s %10s\n", rel.c_str(),
                s.value("completed", false) ? "yes" : "no",
                s.value("diverged", false) ? "yes" : "no",
                s.value("switch_iteration", (long)-1),
                stat("eval_return_report").c_str(), stat("eval_success_rate").c_str());
  }
  std::printf("%zu runs\n", found.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reward-curriculum RL experiments"};
  app.require_subcommand(1);

  std::string config_path, resume_ckpt, out_override, variant, ckpt, traj_path, runs_dir;
  long seed = 0;
  int episodes = 10;
  uint64_t eval_seed = 12345;
  bool no_cache = false;

  auto* train = app.add_subcommand("train", "run training for every seed in a config");
  train->add_option("--config", config_path, "run config JSON")->required();
  auto* seed_opt = train->add_option("--seed", seed, "train only this seed");
  train->add_option("--resume", resume_ckpt, "checkpoint to continue from");
  train->add_option("--out", out_override, "override out_root");
  train->add_flag("--no-cache", no_cache, "ignore completed runs on disk");

  auto* ablate = app.add_subcommand("ablate", "run a reference/variant pair");
  ablate->add_option("--config", config_path, "reference config JSON")->required();
  ablate->add_option("--variant", variant, "variant name")->required();
  ablate->add_option("--out", out_override, "override out_root");
  ablate->add_flag("--no-cache", no_cache, "ignore completed runs on disk");

  auto* eval = app.add_subcommand("evaluate", "roll out a checkpointed policy");
  eval->add_option("--ckpt", ckpt, "checkpoint file")->required();
  eval->add_option("--episodes", episodes, "number of evaluation episodes");
  eval->add_option("--trajectory", traj_path, "write per-step trajectory CSV");
  eval->add_option("--eval-seed", eval_seed, "seed for evaluation episodes");

  auto* summ = app.add_subcommand("summarize", "tabulate summaries under a directory");
  summ->add_option("--runs", runs_dir, "directory to scan")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config_path, seed, seed_opt->count() > 0, resume_ckpt,
                       out_override, no_cache);
    if (ablate->parsed()) return cmd_ablate(config_path, variant, out_override, no_cache);
    if (eval->parsed()) return cmd_evaluate(ckpt, episodes, traj_path, eval_seed);
    if (summ->parsed()) return cmd_summarize(runs_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
