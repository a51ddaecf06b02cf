#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rcrl/config.hpp"
#include "rcrl/curriculum.hpp"
#include "rcrl/env.hpp"
#include "rcrl/metrics.hpp"
#include "rcrl/replay.hpp"
#include "rcrl/sac.hpp"
#include "rcrl/td3.hpp"

namespace rcrl {

std::unique_ptr<Env> make_env(const RunConfig& cfg);

// Checkpoint introspection without constructing a run.
RunConfig checkpoint_config(const std::string& ckpt_path);
uint64_t checkpoint_seed(const std::string& ckpt_path);

// Min-max normalization of a reported return into [0,1] using the per-env
// bound tables (episode cap N, reporting w_c).
double normalize_return(double g, const RunConfig& cfg);

// Test hook into the training loop.
struct TrainObserver {
  virtual ~TrainObserver() = default;
  virtual void on_batch(const Batch&, int phase) {}
  virtual void on_iteration(const MetricsRow&) {}
  virtual void on_switch(long switch_iteration) {}
};

struct TrainResult {
  bool completed = false;
  bool diverged = false;
  std::string failure_reason;
  long iterations = 0;
  long env_steps = 0;
  bool switched = false;
  long switch_iteration = -1;  // iteration whose fit triggered the switch
  int final_phase = 0;
};

struct EvalStats {
  double return_train = 0.0;
  double return_report = 0.0;
  double rb_sum = 0.0;
  double rc_sum = 0.0;
  double success_rate = 0.0;
  int goals = 0, timeouts = 0, collisions = 0;
  int episodes = 0;
};

// K episodes with a deterministic policy; rng feeds env randomization only.
EvalStats evaluate_policy(const RunConfig& cfg, Env& env, RngState& rng, int episodes,
                          const std::function<Vec(const Vec&)>& act);

// One seeded training run: the 1000/1000 step-update loop, phase switching,
// metrics, checkpointing, and the end-of-run summary JSON.
class TrainingRun {
 public:
  TrainingRun(RunConfig cfg, uint64_t seed, std::string run_dir);

  void init();                                 // fresh networks and rng streams
  void resume(const std::string& ckpt_path);   // bit-exact continuation
  TrainResult run(TrainObserver* observer = nullptr);

  void save_checkpoint(const std::string& path) const;

  const ReplayBuffer& buffer() const { return *buffer_; }
  const CurriculumController& controller() const { return ctrl_; }
  const SacState* sac() const { return sac_.get(); }
  const Td3State* td3() const { return td3_.get(); }
  long iteration() const { return iter_; }
  long env_steps() const { return env_steps_; }
  const std::string& dir() const { return dir_; }
  int phase_now() const { return phase_for_iter(iter_); }

 private:
  int phase_for_iter(long i) const;
  long static_switch_iter() const;
  long recorded_switch_iteration() const;
  void apply_reset_on_switch();
  void env_step_once(std::vector<double>& finished_returns);
  double annealed_sigma() const;
  void run_eval(MetricsRow& row);
  void prepare_metrics_for_resume() const;
  void write_summary(const TrainResult& res, double wall_seconds) const;

  RunConfig cfg_;
  uint64_t seed_;
  std::string dir_;
  CurriculumController ctrl_;

  std::unique_ptr<Env> env_;
  std::unique_ptr<ReplayBuffer> buffer_;
  std::unique_ptr<SacState> sac_;
  std::unique_ptr<Td3State> td3_;
  RngState env_rng_, act_rng_, batch_rng_;

  long iter_ = 0;
  long env_steps_ = 0;
  bool switched_ = false;
  bool episode_active_ = false;
  Vec cur_obs_;
  double ep_rb_ = 0.0, ep_rc_ = 0.0;
  long ep_len_ = 0;
  bool initialized_ = false;
  bool resumed_ = false;
};

}  // namespace rcrl
