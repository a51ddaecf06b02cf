#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcrl {

enum class AgentKind { Sac, Td3, RcSac, RcTd3 };
enum class SwitchMode { Auto, Static, Never };
enum class ResetOnSwitch { None, Networks, Buffer };

AgentKind agent_from_string(const std::string& s);
const char* agent_to_string(AgentKind a);
SwitchMode switch_mode_from_string(const std::string& s);
const char* switch_mode_to_string(SwitchMode m);
ResetOnSwitch reset_from_string(const std::string& s);
const char* reset_to_string(ResetOnSwitch r);

// One file fully determines a run (modulo seed). Fields without a JSON key
// take the defaults below; a few defaults depend on env/agent and are
// resolved at parse time (gamma, gamma_cr, w_c_report, episode_cap).
struct RunConfig {
  std::string name = "run";
  std::string env = "pendulum_swingup";
  AgentKind agent = AgentKind::RcTd3;
  double w_c = 1.0;
  double gamma = 0.99;
  double gamma_cr = -50.0;
  int m = 20;
  long total_steps = 200000;
  int block_steps = 1000;
  std::vector<uint64_t> seeds = {1, 2, 3};
  SwitchMode switch_mode = SwitchMode::Auto;
  double static_fraction = 0.5;
  ResetOnSwitch reset_on_switch = ResetOnSwitch::None;
  std::string base_subset = "gp";  // robot rc runs only
  int eval_every = 10;
  int eval_episodes = 5;
  int ckpt_every = 50;
  bool checkpoint_buffer = false;
  double w_c_report = 1.0;
  int batch_size = 128;
  int hidden = 256;
  double lr = 3.0e-4;
  double tau_targ = 0.995;
  double alpha_init = 1.0;
  double alpha_min = 1.0e-4;
  double sigma_explore = 0.1;
  bool sigma_anneal = false;
  double sigma_anneal_start = 0.9;
  uint64_t buffer_capacity = 1000000;
  int robot_template = -1;
  int episode_cap = 1000;
  std::string out_root;  // empty: $RCRL_RUN_ROOT, falling back to ./runs

  bool is_rc() const { return agent == AgentKind::RcSac || agent == AgentKind::RcTd3; }
  bool is_sac() const { return agent == AgentKind::Sac || agent == AgentKind::RcSac; }
  bool is_robot() const { return env == "robot_nav"; }
  long total_iterations() const { return total_steps / block_steps; }

  void validate() const;  // throws ConfigError on any bad combination

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json_text() const;  // canonical: sorted keys, all fields

  // Content hash over everything that affects training output except the
  // seed list, name and output location. Keys the on-disk run cache.
  std::string cache_key() const;

  std::string resolved_out_root() const;
};

uint64_t fnv1a64(const std::string& s);

}  // namespace rcrl
