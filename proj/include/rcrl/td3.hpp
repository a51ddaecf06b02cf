#pragma once

#include <iosfwd>

#include "rcrl/hyper.hpp"
#include "rcrl/policy.hpp"
#include "rcrl/replay.hpp"

namespace rcrl {

struct Td3State {
  AgentHyperparams hp;
  int obs_dim = 0;
  int act_dim = 0;

  Mlp actor, actor_targ;  // deterministic, action = tanh(net(s))
  Mlp q1, q2, q1_targ, q2_targ;
  AdamState actor_opt, q1_opt, q2_opt;

  // Current exploration stddev; the train loop anneals this for the robot
  // task and leaves it at hp.sigma_explore elsewhere.
  double sigma = 0.1;

  long critic_updates = 0;
  long actor_updates = 0;
  long grad_steps = 0;  // parity counter driving the policy delay

  static Td3State create(int obs_dim, int act_dim, const AgentHyperparams& hp, RngState& rng);
};

// tanh-squashed deterministic actor output.
Vec td3_policy(const Mlp& actor, const Vec& obs);

// Adds N(0, sigma) per component and clips to [-1,1] when exploring.
Vec td3_select_action(const Td3State& s, const Vec& obs, bool explore, RngState& rng);

// One step on both critics toward the smoothed target
// y = r + gamma*(1-done)*min_i Qbar_i(s', clip(pibar(s') + clipped noise)).
CriticLosses td3_critic_update(Td3State& s, const Batch& batch, RngState& rng);

// Computes the fit value -mean Q1(s, pi(s)) every call; every hp.policy_delay
// calls it also steps the actor and Polyak-updates all three targets.
double td3_actor_update(Td3State& s, const Batch& batch);

void save_td3(std::ostream& os, const Td3State& s);
void load_td3(std::istream& is, Td3State& s);

}  // namespace rcrl
