#pragma once

#include "rcrl/mlp.hpp"

namespace rcrl {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// tanh rounds to exactly 1.0 in double beyond |x| ~ 19; clamp keeps actions
// strictly inside (-1, 1).
double squash(double x);
Mat squash(const Mat& x);

double stable_softplus(double x);

// log(1 - tanh(x)^2) evaluated without forming 1 - a^2.
double log_one_minus_tanh_sq(double x);

// One policy evaluation at a single state (used when stepping environments).
struct GaussianPolicyOutput {
  Vec mean;
  Vec log_std;     // after clamping
  Vec pre_squash;  // mean + std * eps
  Vec action;      // tanh-squashed, strictly inside (-1,1)
  double log_prob; // density of the squashed action
};

GaussianPolicyOutput policy_sample(const Mlp& params, const Vec& state, bool deterministic,
                                   RngState& rng);

// Batched reparameterized sample used inside SAC updates. The caller supplies
// eps so gradients can be checked against finite differences with the draw
// held fixed.
struct GaussianBatchSample {
  Mat mean, log_std, pre, action;  // act_dim x B
  Mat std_eps;                     // sigma * eps, reused by the backward pass
  Mat ls_pass;                     // 1 where the log-std clamp is inactive
  Eigen::RowVectorXd log_prob;     // 1 x B
};

GaussianBatchSample gaussian_sample_batch(const Mat& net_out, const Mat& eps);

// dL/d(net_out) for a loss of the form mean_j(alpha*log_prob_j + sum_d w .* a)
// is assembled by the agents; this helper exposes the two chain factors they
// need: d(action)/d(pre) and d(log_prob)/d(pre).
Mat dtanh_from_action(const Mat& action);  // 1 - a^2

}  // namespace rcrl
