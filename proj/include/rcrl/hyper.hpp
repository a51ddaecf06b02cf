#pragma once

namespace rcrl {

// Update-rule constants shared by both learners. Environment-specific values
// (gamma, exploration schedule) are overridden by the run config.
struct AgentHyperparams {
  double gamma = 0.99;
  double tau_targ = 0.995;  // fraction of itself a target keeps per update
  int batch_size = 128;
  int hidden = 256;
  double lr_q = 3.0e-4;
  double lr_pi = 3.0e-4;
  double lr_alpha = 3.0e-4;

  // SAC
  double alpha_init = 1.0;
  double alpha_min = 1.0e-4;

  // TD3
  double sigma_explore = 0.1;
  double sigma_target = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
};

struct CriticLosses {
  double q1 = 0.0;
  double q2 = 0.0;
};

}  // namespace rcrl
