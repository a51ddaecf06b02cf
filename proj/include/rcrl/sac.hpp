#pragma once

#include <iosfwd>

#include "rcrl/hyper.hpp"
#include "rcrl/policy.hpp"
#include "rcrl/replay.hpp"

namespace rcrl {

struct SacState {
  AgentHyperparams hp;
  int obs_dim = 0;
  int act_dim = 0;

  Mlp actor;  // Gaussian head, rows [0,act) mean, [act,2*act) raw log-std
  Mlp q1, q2, q1_targ, q2_targ;
  AdamState actor_opt, q1_opt, q2_opt;

  double alpha = 1.0;
  double entropy_target = 0.0;  // -act_dim
  ScalarAdam alpha_opt;

  long critic_updates = 0;
  long actor_updates = 0;

  static SacState create(int obs_dim, int act_dim, const AgentHyperparams& hp, RngState& rng);
};

// Stochastic draw when exploring, tanh(mean) when evaluating.
Vec sac_select_action(const SacState& s, const Vec& obs, bool explore, RngState& rng);

// One step on both critics toward the shared entropy-regularized target.
// Target networks are left untouched; call sac_polyak afterwards.
CriticLosses sac_critic_update(SacState& s, const Batch& batch, RngState& rng);

// Reparameterized actor step plus the temperature step (alpha clamped to its
// floor). Returns the entropy-free fit value -mean min_i Q_i(s, a~).
double sac_actor_and_alpha_update(SacState& s, const Batch& batch, RngState& rng);

void sac_polyak(SacState& s);

void save_sac(std::ostream& os, const SacState& s);
void load_sac(std::istream& is, SacState& s);

}  // namespace rcrl
