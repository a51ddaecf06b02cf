#include "rcrl/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rcrl/env_robot.hpp"
#include "rcrl/mlp.hpp"

namespace rcrl {

using nlohmann::json;

AgentKind agent_from_string(const std::string& s) {
  if (s == "sac") return AgentKind::Sac;
  if (s == "td3") return AgentKind::Td3;
  if (s == "rc-sac") return AgentKind::RcSac;
  if (s == "rc-td3") return AgentKind::RcTd3;
  throw ConfigError("unknown agent: " + s);
}

const char* agent_to_string(AgentKind a) {
  switch (a) {
    case AgentKind::Sac: return "sac";
    case AgentKind::Td3: return "td3";
    case AgentKind::RcSac: return "rc-sac";
    case AgentKind::RcTd3: return "rc-td3";
  }
  return "unknown";
}

SwitchMode switch_mode_from_string(const std::string& s) {
  if (s == "auto") return SwitchMode::Auto;
  if (s == "static") return SwitchMode::Static;
  if (s == "never") return SwitchMode::Never;
  throw ConfigError("unknown switch mode: " + s);
}

const char* switch_mode_to_string(SwitchMode m) {
  switch (m) {
    case SwitchMode::Auto: return "auto";
    case SwitchMode::Static: return "static";
    case SwitchMode::Never: return "never";
  }
  return "unknown";
}

ResetOnSwitch reset_from_string(const std::string& s) {
  if (s == "none") return ResetOnSwitch::None;
  if (s == "networks") return ResetOnSwitch::Networks;
  if (s == "buffer") return ResetOnSwitch::Buffer;
  throw ConfigError("unknown reset mode: " + s);
}

const char* reset_to_string(ResetOnSwitch r) {
  switch (r) {
    case ResetOnSwitch::None: return "none";
    case ResetOnSwitch::Networks: return "networks";
    case ResetOnSwitch::Buffer: return "buffer";
  }
  return "unknown";
}

namespace {

const std::set<std::string> kEnvNames = {"pendulum_swingup", "cartpole_balance",
                                         "cartpole_swingup", "robot_nav"};

const std::set<std::string> kKnownKeys = {
    "name",          "env",           "agent",          "w_c",
    "gamma",         "gamma_cr",      "m",              "total_steps",
    "block_steps",   "seeds",         "switch_mode",    "static_fraction",
    "reset_on_switch", "base_subset", "eval_every",     "eval_episodes",
    "ckpt_every",    "checkpoint_buffer", "w_c_report", "batch_size",
    "hidden",        "lr",            "tau_targ",       "alpha_init",
    "alpha_min",     "sigma_explore", "sigma_anneal",   "sigma_anneal_start",
    "buffer_capacity", "robot_template", "episode_cap", "out_root"};

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key: " + key);

  RunConfig c;
  c.name = j.value("name", c.name);
  c.env = j.value("env", c.env);
  if (j.contains("agent")) c.agent = agent_from_string(j.at("agent").get<std::string>());
  c.w_c = j.value("w_c", c.w_c);
  c.m = j.value("m", c.m);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.block_steps = j.value("block_steps", c.block_steps);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  if (j.contains("switch_mode"))
    c.switch_mode = switch_mode_from_string(j.at("switch_mode").get<std::string>());
  c.static_fraction = j.value("static_fraction", c.static_fraction);
  if (j.contains("reset_on_switch"))
    c.reset_on_switch = reset_from_string(j.at("reset_on_switch").get<std::string>());
  c.base_subset = j.value("base_subset", c.base_subset);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  c.ckpt_every = j.value("ckpt_every", c.ckpt_every);
  c.checkpoint_buffer = j.value("checkpoint_buffer", c.checkpoint_buffer);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.hidden = j.value("hidden", c.hidden);
  c.lr = j.value("lr", c.lr);
  c.tau_targ = j.value("tau_targ", c.tau_targ);
  c.alpha_init = j.value("alpha_init", c.alpha_init);
  c.alpha_min = j.value("alpha_min", c.alpha_min);
  c.sigma_explore = j.value("sigma_explore", c.sigma_explore);
  c.sigma_anneal = j.value("sigma_anneal", c.sigma_anneal);
  c.sigma_anneal_start = j.value("sigma_anneal_start", c.sigma_anneal_start);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.robot_template = j.value("robot_template", c.robot_template);
  c.out_root = j.value("out_root", c.out_root);

  // Env/agent-dependent defaults, overridable by explicit keys.
  c.gamma = j.value("gamma", !c.is_robot() && !c.is_sac() ? 0.999 : 0.99);
  c.gamma_cr =
      j.value("gamma_cr", c.is_robot() ? (c.is_sac() ? -20.0 : -6.0) : -50.0);
  c.w_c_report = j.value("w_c_report", c.is_robot() ? 0.1 : 1.0);
  c.episode_cap = j.value("episode_cap", c.is_robot() ? 300 : 1000);

  c.validate();
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

void RunConfig::validate() const {
  if (!kEnvNames.count(env)) throw ConfigError("unknown env: " + env);
  if (w_c < 0.0) throw ConfigError("w_c must be >= 0");
  if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("gamma must be in (0,1)");
  if (total_steps <= 0 || block_steps <= 0 || total_steps % block_steps != 0)
    throw ConfigError("total_steps must be a positive multiple of block_steps");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (batch_size <= 0 || hidden <= 0) throw ConfigError("bad network sizes");
  if (buffer_capacity < static_cast<uint64_t>(batch_size))
    throw ConfigError("buffer capacity below batch size");
  if (eval_every <= 0 || eval_episodes < 0 || ckpt_every < 0)
    throw ConfigError("bad cadence settings");
  if (lr <= 0.0 || tau_targ <= 0.0 || tau_targ >= 1.0)
    throw ConfigError("bad optimizer settings");
  if (episode_cap <= 0) throw ConfigError("episode_cap must be positive");
  if (robot_template < -1 || robot_template >= kNumTemplates)
    throw ConfigError("robot_template out of range");
  subset_from_string(base_subset);
  if (is_rc()) {
    if (switch_mode == SwitchMode::Auto && m <= 0)
      throw ConfigError("rc agents need a positive window m for auto switching");
    if (switch_mode == SwitchMode::Static &&
        (static_fraction <= 0.0 || static_fraction >= 1.0))
      throw ConfigError("static_fraction must be in (0,1)");
  } else {
    if (switch_mode != SwitchMode::Auto)
      throw ConfigError("switch_mode is only meaningful for rc agents");
    if (reset_on_switch != ResetOnSwitch::None)
      throw ConfigError("reset_on_switch is only meaningful for rc agents");
  }
  if (!is_rc() || !is_robot()) {
    if (base_subset != "gp" && base_subset != "full")
      throw ConfigError("base_subset applies to robot rc runs only");
  }
}

namespace {

json config_to_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["env"] = c.env;
  j["agent"] = agent_to_string(c.agent);
  j["w_c"] = c.w_c;
  j["gamma"] = c.gamma;
  j["gamma_cr"] = c.gamma_cr;
  j["m"] = c.m;
  j["total_steps"] = c.total_steps;
  j["block_steps"] = c.block_steps;
  j["seeds"] = c.seeds;
  j["switch_mode"] = switch_mode_to_string(c.switch_mode);
  j["static_fraction"] = c.static_fraction;
  j["reset_on_switch"] = reset_to_string(c.reset_on_switch);
  j["base_subset"] = c.base_subset;
  j["eval_every"] = c.eval_every;
  j["eval_episodes"] = c.eval_episodes;
  j["ckpt_every"] = c.ckpt_every;
  j["checkpoint_buffer"] = c.checkpoint_buffer;
  j["w_c_report"] = c.w_c_report;
  j["batch_size"] = c.batch_size;
  j["hidden"] = c.hidden;
  j["lr"] = c.lr;
  j["tau_targ"] = c.tau_targ;
  j["alpha_init"] = c.alpha_init;
  j["alpha_min"] = c.alpha_min;
  j["sigma_explore"] = c.sigma_explore;
  j["sigma_anneal"] = c.sigma_anneal;
  j["sigma_anneal_start"] = c.sigma_anneal_start;
  j["buffer_capacity"] = c.buffer_capacity;
  j["robot_template"] = c.robot_template;
  j["episode_cap"] = c.episode_cap;
  j["out_root"] = c.out_root;
  return j;
}

}  // namespace

std::string RunConfig::to_json_text() const { return config_to_json(*this).dump(2); }

std::string RunConfig::cache_key() const {
  json j = config_to_json(*this);
  j.erase("seeds");
  j.erase("name");
  j.erase("out_root");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::string RunConfig::resolved_out_root() const {
  if (!out_root.empty()) return out_root;
  if (const char* e = std::getenv("RCRL_RUN_ROOT"); e && *e) return e;
  return "runs";
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rcrl
