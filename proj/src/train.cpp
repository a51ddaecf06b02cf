#include "rcrl/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rcrl/checkpoint.hpp"
#include "rcrl/env_classic.hpp"
#include "rcrl/env_robot.hpp"

namespace rcrl {

namespace {

constexpr uint64_t kEvalSalt = 0xE7A1C0DEE7A1C0DEull;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("train: truncated checkpoint section");
}

AgentHyperparams hp_from_cfg(const RunConfig& cfg) {
  AgentHyperparams hp;
  hp.gamma = cfg.gamma;
  hp.tau_targ = cfg.tau_targ;
  hp.batch_size = cfg.batch_size;
  hp.hidden = cfg.hidden;
  hp.lr_q = hp.lr_pi = hp.lr_alpha = cfg.lr;
  hp.alpha_init = cfg.alpha_init;
  hp.alpha_min = cfg.alpha_min;
  hp.sigma_explore = cfg.sigma_explore;
  return hp;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

std::unique_ptr<Env> make_env(const RunConfig& cfg) {
  if (cfg.env == "pendulum_swingup")
    return std::make_unique<PendulumEnv>(cfg.w_c, cfg.episode_cap);
  if (cfg.env == "cartpole_balance")
    return std::make_unique<CartpoleEnv>(CartpoleMode::Balance, cfg.w_c, cfg.episode_cap);
  if (cfg.env == "cartpole_swingup")
    return std::make_unique<CartpoleEnv>(CartpoleMode::Swingup, cfg.w_c, cfg.episode_cap);
  if (cfg.env == "robot_nav") {
    RobotRewardParams p;
    p.max_steps = cfg.episode_cap;
    return std::make_unique<RobotEnv>(p, cfg.w_c, subset_from_string(cfg.base_subset),
                                      cfg.robot_template);
  }
  throw ConfigError("unknown env: " + cfg.env);
}

double normalize_return(double g, const RunConfig& cfg) {
  const double n = cfg.episode_cap;
  double lo, hi;
  if (cfg.is_robot()) {
    const double wp = RobotRewardParams{}.w_p;
    hi = 100.0 + n * (wp + 3.0 * cfg.w_c_report);
    lo = -n * (wp + 3.0 * cfg.w_c_report);
  } else {
    hi = n;
    lo = -n * cfg.w_c_report;
  }
  if (!(hi > lo)) throw ConfigError("degenerate normalization bounds");
  return std::clamp((g - lo) / (hi - lo), 0.0, 1.0);
}

EvalStats evaluate_policy(const RunConfig& cfg, Env& env, RngState& rng, int episodes,
                          const std::function<Vec(const Vec&)>& act) {
  EvalStats st;
  st.episodes = episodes;
  double sum_train = 0, sum_report = 0, sum_rb = 0, sum_rc = 0;
  for (int e = 0; e < episodes; ++e) {
    Vec obs = env.reset(rng);
    double rb = 0.0, rc = 0.0;
    Outcome out = Outcome::Running;
    while (out == Outcome::Running) {
      const StepResult sr = env.step(act(obs));
      rb += sr.rb_report;
      rc += sr.rc_report;
      out = sr.outcome;
      obs = sr.obs;
    }
    sum_rb += rb;
    sum_rc += rc;
    sum_train += rb + cfg.w_c * rc;
    sum_report += rb + cfg.w_c_report * rc;
    if (out == Outcome::Goal) ++st.goals;
    else if (out == Outcome::Timeout) ++st.timeouts;
    else ++st.collisions;
  }
  if (episodes > 0) {
    st.return_train = sum_train / episodes;
    st.return_report = sum_report / episodes;
    st.rb_sum = sum_rb / episodes;
    st.rc_sum = sum_rc / episodes;
    st.success_rate = static_cast<double>(st.goals) / episodes;
  }
  return st;
}

TrainingRun::TrainingRun(RunConfig cfg, uint64_t seed, std::string run_dir)
    : cfg_(std::move(cfg)),
      seed_(seed),
      dir_(std::move(run_dir)),
      ctrl_(cfg_.gamma_cr, std::max(1, cfg_.m)) {
  cfg_.validate();
}

void TrainingRun::init() {
  RngState init_rng = RngState::derive(seed_, 1);
  env_rng_ = RngState::derive(seed_, 2);
  act_rng_ = RngState::derive(seed_, 3);
  batch_rng_ = RngState::derive(seed_, 4);
  env_ = make_env(cfg_);
  buffer_ = std::make_unique<ReplayBuffer>(env_->obs_dim(), env_->act_dim(),
                                           cfg_.buffer_capacity,
                                           static_cast<size_t>(cfg_.total_steps));
  const AgentHyperparams hp = hp_from_cfg(cfg_);
  if (cfg_.is_sac())
    sac_ = std::make_unique<SacState>(
        SacState::create(env_->obs_dim(), env_->act_dim(), hp, init_rng));
  else
    td3_ = std::make_unique<Td3State>(
        Td3State::create(env_->obs_dim(), env_->act_dim(), hp, init_rng));
  initialized_ = true;
}

int TrainingRun::phase_for_iter(long i) const {
  if (!cfg_.is_rc()) return 1;
  switch (cfg_.switch_mode) {
    case SwitchMode::Never: return 0;
    case SwitchMode::Static: return i >= static_switch_iter() ? 1 : 0;
    case SwitchMode::Auto: return ctrl_.phase();
  }
  return 1;
}

long TrainingRun::static_switch_iter() const {
  return std::llround(cfg_.static_fraction * cfg_.total_iterations());
}

long TrainingRun::recorded_switch_iteration() const {
  if (!cfg_.is_rc()) return -1;
  if (cfg_.switch_mode == SwitchMode::Auto) return ctrl_.switch_iteration();
  if (cfg_.switch_mode == SwitchMode::Static && switched_) return static_switch_iter() - 1;
  return -1;
}

void TrainingRun::apply_reset_on_switch() {
  switch (cfg_.reset_on_switch) {
    case ResetOnSwitch::None:
      break;
    case ResetOnSwitch::Networks: {
      RngState reinit = RngState::derive(seed_, 5);
      const AgentHyperparams hp = hp_from_cfg(cfg_);
      if (sac_)
        *sac_ = SacState::create(env_->obs_dim(), env_->act_dim(), hp, reinit);
      else
        *td3_ = Td3State::create(env_->obs_dim(), env_->act_dim(), hp, reinit);
      break;
    }
    case ResetOnSwitch::Buffer:
      buffer_->clear();
      break;
  }
}

double TrainingRun::annealed_sigma() const {
  const double half = cfg_.total_steps / 2.0;
  const double frac = std::min(1.0, static_cast<double>(env_steps_) / half);
  return cfg_.sigma_anneal_start + (cfg_.sigma_explore - cfg_.sigma_anneal_start) * frac;
}

void TrainingRun::env_step_once(std::vector<double>& finished_returns) {
  if (!episode_active_) {
    cur_obs_ = env_->reset(env_rng_);
    episode_active_ = true;
    ep_rb_ = ep_rc_ = 0.0;
    ep_len_ = 0;
  }
  Vec a;
  if (sac_) {
    a = sac_select_action(*sac_, cur_obs_, true, act_rng_);
  } else {
    if (cfg_.sigma_anneal) td3_->sigma = annealed_sigma();
    a = td3_select_action(*td3_, cur_obs_, true, act_rng_);
  }
  const StepResult sr = env_->step(a);
  buffer_->push(cur_obs_, a, sr.r_base, sr.r_full, sr.obs, sr.done);
  ep_rb_ += sr.rb_report;
  ep_rc_ += sr.rc_report;
  ++ep_len_;
  ++env_steps_;
  if (sr.outcome != Outcome::Running) {
    finished_returns.push_back(ep_rb_ + cfg_.w_c_report * ep_rc_);
    episode_active_ = false;
  } else {
    cur_obs_ = sr.obs;
  }
}

void TrainingRun::run_eval(MetricsRow& row) {
  RngState eval_rng = RngState::derive(seed_ ^ kEvalSalt, static_cast<uint64_t>(iter_));
  auto eval_env = make_env(cfg_);
  const auto act = [&](const Vec& o) {
    return sac_ ? sac_select_action(*sac_, o, false, eval_rng)
                : td3_select_action(*td3_, o, false, eval_rng);
  };
  const EvalStats st = evaluate_policy(cfg_, *eval_env, eval_rng, cfg_.eval_episodes, act);
  row.eval_return_train = st.return_train;
  row.eval_return_report = st.return_report;
  row.eval_rb_sum = st.rb_sum;
  row.eval_rc_sum = st.rc_sum;
  row.eval_norm_return = normalize_return(st.return_report, cfg_);
  row.eval_success_rate = cfg_.is_robot() ? st.success_rate : MetricsRow::kNan;
  row.eval_goal = st.goals;
  row.eval_timeout = st.timeouts;
  row.eval_collision = st.collisions;
}

void TrainingRun::prepare_metrics_for_resume() const {
  const std::string path = dir_ + "/metrics.csv";
  std::ifstream f(path);
  if (!f) return;
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("iteration,", 0) == 0) continue;
    if (std::strtol(line.c_str(), nullptr, 10) < iter_) keep.push_back(line);
  }
  f.close();
  std::ofstream out(path, std::ios::trunc);
  out << kMetricsSchema << '\n' << metrics_header() << '\n';
  for (const std::string& l : keep) out << l << '\n';
}

TrainResult TrainingRun::run(TrainObserver* observer) {
  if (!initialized_) throw ConfigError("training run not initialized");
  const auto t0 = std::chrono::steady_clock::now();
  bool append = false;
  if (resumed_) {
    prepare_metrics_for_resume();
    append = true;
  }
  MetricsWriter writer(dir_ + "/metrics.csv", append);

  TrainResult res;
  const long total_iters = cfg_.total_iterations();
  try {
    while (iter_ < total_iters) {
      const int phase = phase_for_iter(iter_);
      if (cfg_.is_rc() && phase == 1 && !switched_) {
        switched_ = true;
        apply_reset_on_switch();
        if (observer) observer->on_switch(recorded_switch_iteration());
      }

      std::vector<double> finished;
      for (int k = 0; k < cfg_.block_steps; ++k) env_step_once(finished);

      double sum_q1 = 0, sum_q2 = 0, sum_fit = 0;
      long gsteps = 0;
      for (int k = 0; k < cfg_.block_steps; ++k) {
        if (!buffer_->ready(cfg_.batch_size)) continue;
        Batch b = buffer_->sample(phase, cfg_.batch_size, batch_rng_);
        if (observer) observer->on_batch(b, phase);
        double fit;
        CriticLosses cl;
        if (sac_) {
          cl = sac_critic_update(*sac_, b, batch_rng_);
          fit = sac_actor_and_alpha_update(*sac_, b, batch_rng_);
          sac_polyak(*sac_);
        } else {
          cl = td3_critic_update(*td3_, b, batch_rng_);
          fit = td3_actor_update(*td3_, b);
        }
        if (!std::isfinite(fit)) throw NumericalError("actor fit diverged");
        sum_q1 += cl.q1;
        sum_q2 += cl.q2;
        sum_fit += fit;
        ++gsteps;
      }

      MetricsRow row;
      row.iteration = iter_;
      row.env_steps = env_steps_;
      row.phase = phase;
      if (gsteps > 0) {
        row.loss_q1 = sum_q1 / gsteps;
        row.loss_q2 = sum_q2 / gsteps;
        row.fit_j = sum_fit / gsteps;
      }
      if (sac_) row.alpha = sac_->alpha;
      if (!finished.empty()) row.train_return_report = mean_of(finished);

      if (cfg_.is_rc() && cfg_.switch_mode == SwitchMode::Auto && gsteps > 0)
        ctrl_.record_actor_fit(row.fit_j);

      if (cfg_.eval_episodes > 0 && (iter_ + 1) % cfg_.eval_every == 0) run_eval(row);

      writer.write(row);
      if (observer) observer->on_iteration(row);

      // iter_ now counts completed iterations; checkpoints written here must
      // carry that count or a resume would replay the iteration just done.
      ++iter_;
      if (cfg_.ckpt_every > 0 && iter_ % cfg_.ckpt_every == 0 && iter_ < total_iters) {
        char name[32];
        std::snprintf(name, sizeof(name), "/ckpt_%06ld.bin", iter_);
        save_checkpoint(dir_ + name);
      }
    }
    res.completed = true;
  } catch (const NumericalError& e) {
    res.diverged = true;
    res.failure_reason = e.what();
  }

  res.iterations = iter_;
  res.env_steps = env_steps_;
  res.switch_iteration = recorded_switch_iteration();
  res.switched = res.switch_iteration >= 0;
  res.final_phase = phase_for_iter(iter_);
  save_checkpoint(dir_ + "/ckpt_final.bin");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_summary(res, wall);
  return res;
}

void TrainingRun::write_summary(const TrainResult& res, double wall_seconds) const {
  using nlohmann::json;
  json s;
  s["seed"] = seed_;
  s["config_hash"] = cfg_.cache_key();
  s["completed"] = res.completed;
  s["diverged"] = res.diverged;
  s["failure_reason"] = res.failure_reason;
  s["iterations"] = res.iterations;
  s["env_steps"] = res.env_steps;
  s["switched"] = res.switched;
  s["switch_iteration"] = res.switch_iteration;
  s["switch_env_steps"] =
      res.switched ? (res.switch_iteration + 1) * cfg_.block_steps : -1;
  s["final_phase"] = res.final_phase;
  s["wall_seconds"] = wall_seconds;

  // Mean and population std over the trailing 50k-step window.
  const long window_start = cfg_.total_steps - 50000;
  std::vector<MetricsRow> rows;
  try {
    rows = read_metrics(dir_ + "/metrics.csv");
  } catch (const ConfigError&) {
  }
  const auto window_stat = [&](const std::function<double(const MetricsRow&)>& f) {
    std::vector<double> vals;
    for (const MetricsRow& r : rows)
      if (r.env_steps > window_start && std::isfinite(f(r))) vals.push_back(f(r));
    json out;
    if (vals.empty()) {
      out["mean"] = nullptr;
      out["std"] = nullptr;
      out["count"] = 0;
      return out;
    }
    const double mean = mean_of(vals);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    out["mean"] = mean;
    out["std"] = std::sqrt(var / vals.size());
    out["count"] = vals.size();
    return out;
  };
  s["last50k"] = {
      {"train_return_report", window_stat([](const MetricsRow& r) { return r.train_return_report; })},
      {"eval_return_report", window_stat([](const MetricsRow& r) { return r.eval_return_report; })},
      {"eval_return_train", window_stat([](const MetricsRow& r) { return r.eval_return_train; })},
      {"eval_norm_return", window_stat([](const MetricsRow& r) { return r.eval_norm_return; })},
      {"eval_success_rate", window_stat([](const MetricsRow& r) { return r.eval_success_rate; })},
      {"eval_rb_sum", window_stat([](const MetricsRow& r) { return r.eval_rb_sum; })},
      {"eval_rc_sum", window_stat([](const MetricsRow& r) { return r.eval_rc_sum; })},
  };

  std::ofstream f(dir_ + "/summary.json");
  f << s.dump(2) << '\n';
}

void TrainingRun::save_checkpoint(const std::string& path) const {
  CheckpointFile ck;
  ck.add("CONF", cfg_.to_json_text());

  std::ostringstream meta(std::ios::binary);
  put(meta, seed_);
  put<int64_t>(meta, iter_);
  put<int64_t>(meta, env_steps_);
  put<uint8_t>(meta, switched_ ? 1 : 0);
  put<uint8_t>(meta, episode_active_ ? 1 : 0);
  put(meta, ep_rb_);
  put(meta, ep_rc_);
  put<int64_t>(meta, ep_len_);
  put<int32_t>(meta, env_->obs_dim());
  for (int i = 0; i < env_->obs_dim(); ++i)
    put(meta, episode_active_ ? cur_obs_(i) : 0.0);
  ck.add("META", meta.str());

  std::ostringstream ag(std::ios::binary);
  if (sac_)
    save_sac(ag, *sac_);
  else
    save_td3(ag, *td3_);
  ck.add("AGNT", ag.str());

  std::ostringstream cs(std::ios::binary);
  ctrl_.save(cs);
  ck.add("CTRL", cs.str());

  std::ostringstream rs;
  env_rng_.save(rs);
  rs << ' ';
  act_rng_.save(rs);
  rs << ' ';
  batch_rng_.save(rs);
  ck.add("RNGS", rs.str());

  std::ostringstream es(std::ios::binary);
  env_->save(es);
  ck.add("ENVS", es.str());

  if (cfg_.checkpoint_buffer) {
    std::ostringstream bs(std::ios::binary);
    buffer_->save(bs);
    ck.add("BUFF", bs.str());
  }
  ck.write(path);
}

RunConfig checkpoint_config(const std::string& ckpt_path) {
  return RunConfig::from_json_text(CheckpointFile::read(ckpt_path).get("CONF"));
}

uint64_t checkpoint_seed(const std::string& ckpt_path) {
  std::istringstream meta(CheckpointFile::read(ckpt_path).get("META"), std::ios::binary);
  uint64_t seed = 0;
  get(meta, seed);
  return seed;
}

void TrainingRun::resume(const std::string& ckpt_path) {
  const CheckpointFile ck = CheckpointFile::read(ckpt_path);
  const RunConfig stored = RunConfig::from_json_text(ck.get("CONF"));
  if (stored.cache_key() != cfg_.cache_key())
    throw ConfigError("checkpoint was written under a different config");

  env_ = make_env(cfg_);
  buffer_ = std::make_unique<ReplayBuffer>(env_->obs_dim(), env_->act_dim(),
                                           cfg_.buffer_capacity,
                                           static_cast<size_t>(cfg_.total_steps));
  const AgentHyperparams hp = hp_from_cfg(cfg_);

  std::istringstream meta(ck.get("META"), std::ios::binary);
  uint64_t stored_seed = 0;
  get(meta, stored_seed);
  if (stored_seed != seed_) throw ConfigError("checkpoint seed mismatch");
  int64_t it = 0, es = 0, elen = 0;
  uint8_t sw = 0, ea = 0;
  get(meta, it);
  get(meta, es);
  get(meta, sw);
  get(meta, ea);
  get(meta, ep_rb_);
  get(meta, ep_rc_);
  get(meta, elen);
  int32_t od = 0;
  get(meta, od);
  if (od != env_->obs_dim()) throw ConfigError("checkpoint obs dim mismatch");
  cur_obs_.resize(od);
  for (int i = 0; i < od; ++i) get(meta, cur_obs_(i));
  iter_ = it;
  env_steps_ = es;
  switched_ = sw != 0;
  episode_active_ = ea != 0;
  ep_len_ = elen;

  std::istringstream ag(ck.get("AGNT"), std::ios::binary);
  if (cfg_.is_sac()) {
    sac_ = std::make_unique<SacState>();
    sac_->hp = hp;
    sac_->obs_dim = env_->obs_dim();
    sac_->act_dim = env_->act_dim();
    load_sac(ag, *sac_);
  } else {
    td3_ = std::make_unique<Td3State>();
    td3_->hp = hp;
    td3_->obs_dim = env_->obs_dim();
    td3_->act_dim = env_->act_dim();
    load_td3(ag, *td3_);
  }

  std::istringstream cs(ck.get("CTRL"), std::ios::binary);
  ctrl_.load(cs);

  std::istringstream rs(ck.get("RNGS"));
  env_rng_.load(rs);
  act_rng_.load(rs);
  batch_rng_.load(rs);

  std::istringstream envs(ck.get("ENVS"), std::ios::binary);
  env_->load(envs);

  if (ck.has("BUFF")) {
    std::istringstream bs(ck.get("BUFF"), std::ios::binary);
    buffer_->load(bs);
  }
  initialized_ = true;
  resumed_ = true;
}

}  // namespace rcrl
