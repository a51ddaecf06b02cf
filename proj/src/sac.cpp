#include "rcrl/sac.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace rcrl {

namespace {

Mat concat_sa(const Mat& states, const Mat& actions) {
  Mat sa(states.rows() + actions.rows(), states.cols());
  sa.topRows(states.rows()) = states;
  sa.bottomRows(actions.rows()) = actions;
  return sa;
}

// Column-by-column, dim inner: matches the draw order of policy_sample so a
// batched update consumes rng identically to an equivalent per-sample loop.
Mat draw_eps(int act_dim, int batch, RngState& rng) {
  Mat eps(act_dim, batch);
  for (int j = 0; j < batch; ++j)
    for (int d = 0; d < act_dim; ++d) eps(d, j) = rng.normal();
  return eps;
}

void critic_step(Mlp& q, AdamState& opt, const Mat& sa, const Eigen::RowVectorXd& y,
                 double& loss_out) {
  MlpWorkspace ws;
  Mat out;
  mlp_forward(q, sa, out, &ws);
  const int batch = static_cast<int>(sa.cols());
  Eigen::RowVectorXd diff = out.row(0) - y;
  loss_out = diff.squaredNorm() / batch;
  if (!std::isfinite(loss_out)) throw NumericalError("critic loss diverged");
  Mat d_out = (2.0 / batch) * diff;
  MlpGrads g = MlpGrads::zeros_like(q);
  mlp_backward(q, ws, d_out, &g);
  opt.update(q, g);
}

}  // namespace

SacState SacState::create(int obs_dim, int act_dim, const AgentHyperparams& hp, RngState& rng) {
  SacState s;
  s.hp = hp;
  s.obs_dim = obs_dim;
  s.act_dim = act_dim;
  s.actor = Mlp::create(obs_dim, 2 * act_dim, rng, OutputHead::GaussianMeanLogStd, hp.hidden);
  s.q1 = Mlp::create(obs_dim + act_dim, 1, rng, OutputHead::Identity, hp.hidden);
  s.q2 = Mlp::create(obs_dim + act_dim, 1, rng, OutputHead::Identity, hp.hidden);
  s.q1_targ = s.q1;
  s.q2_targ = s.q2;
  s.actor_opt = AdamState::create(s.actor, hp.lr_pi);
  s.q1_opt = AdamState::create(s.q1, hp.lr_q);
  s.q2_opt = AdamState::create(s.q2, hp.lr_q);
  s.alpha = hp.alpha_init;
  s.entropy_target = -static_cast<double>(act_dim);
  s.alpha_opt.lr = hp.lr_alpha;
  return s;
}

Vec sac_select_action(const SacState& s, const Vec& obs, bool explore, RngState& rng) {
  return policy_sample(s.actor, obs, !explore, rng).action;
}

CriticLosses sac_critic_update(SacState& s, const Batch& b, RngState& rng) {
  const int batch = b.size();
  Mat net_out;
  mlp_forward(s.actor, b.next_states, net_out);
  Mat eps = draw_eps(s.act_dim, batch, rng);
  GaussianBatchSample gs = gaussian_sample_batch(net_out, eps);

  Mat sa2 = concat_sa(b.next_states, gs.action);
  Mat q1t, q2t;
  mlp_forward(s.q1_targ, sa2, q1t);
  mlp_forward(s.q2_targ, sa2, q2t);

  Eigen::RowVectorXd y(batch);
  for (int j = 0; j < batch; ++j) {
    const double min_q = std::min(q1t(0, j), q2t(0, j));
    y(j) = b.rewards(j) +
           s.hp.gamma * (1.0 - b.done(j)) * (min_q - s.alpha * gs.log_prob(j));
  }

  Mat sa = concat_sa(b.states, b.actions);
  CriticLosses losses;
  critic_step(s.q1, s.q1_opt, sa, y, losses.q1);
  critic_step(s.q2, s.q2_opt, sa, y, losses.q2);
  ++s.critic_updates;
  return losses;
}

double sac_actor_and_alpha_update(SacState& s, const Batch& b, RngState& rng) {
  const int batch = b.size();
  MlpWorkspace actor_ws;
  Mat net_out;
  mlp_forward(s.actor, b.states, net_out, &actor_ws);
  Mat eps = draw_eps(s.act_dim, batch, rng);
  GaussianBatchSample gs = gaussian_sample_batch(net_out, eps);

  Mat sa = concat_sa(b.states, gs.action);
  MlpWorkspace q1_ws, q2_ws;
  Mat q1o, q2o;
  mlp_forward(s.q1, sa, q1o, &q1_ws);
  mlp_forward(s.q2, sa, q2o, &q2_ws);

  // Loss L = mean(alpha*logpi - min_i Q_i); the min routes d/dQ = -1/B to
  // the winning critic per sample (ties to q1).
  Mat d_q1 = Mat::Zero(1, batch), d_q2 = Mat::Zero(1, batch);
  double sum_min_q = 0.0;
  for (int j = 0; j < batch; ++j) {
    if (q1o(0, j) <= q2o(0, j)) {
      d_q1(0, j) = -1.0 / batch;
      sum_min_q += q1o(0, j);
    } else {
      d_q2(0, j) = -1.0 / batch;
      sum_min_q += q2o(0, j);
    }
  }
  Mat d_in1, d_in2;
  mlp_backward(s.q1, q1_ws, d_q1, nullptr, &d_in1);
  mlp_backward(s.q2, q2_ws, d_q2, nullptr, &d_in2);
  Mat d_action = d_in1.bottomRows(s.act_dim) + d_in2.bottomRows(s.act_dim);

  // Chain to the net output. dlogpi/dmean = 2a, dlogpi/dls = -1 + 2a*se,
  // da/dmean = 1-a^2, da/dls = (1-a^2)*se; clamped log-std rows pass nothing.
  const double a_over_b = s.alpha / batch;
  Mat dtanh = dtanh_from_action(gs.action);
  Mat q_path = d_action.cwiseProduct(dtanh);
  Mat d_net(2 * s.act_dim, batch);
  d_net.topRows(s.act_dim) = a_over_b * 2.0 * gs.action + q_path;
  d_net.bottomRows(s.act_dim) =
      (a_over_b * (2.0 * gs.action.cwiseProduct(gs.std_eps) -
                   Mat::Ones(s.act_dim, batch)) +
       q_path.cwiseProduct(gs.std_eps))
          .cwiseProduct(gs.ls_pass);

  MlpGrads ag = MlpGrads::zeros_like(s.actor);
  mlp_backward(s.actor, actor_ws, d_net, &ag);
  s.actor_opt.update(s.actor, ag);

  // Temperature descends J(alpha) = E[-alpha*logpi - alpha*H_bar] using the
  // pre-update log-probs, then hits the floor.
  const double mean_logp = gs.log_prob.mean();
  const double grad_alpha = -(mean_logp + s.entropy_target);
  s.alpha = std::max(s.hp.alpha_min, s.alpha_opt.update(s.alpha, grad_alpha));

  ++s.actor_updates;
  return -sum_min_q / batch;
}

void sac_polyak(SacState& s) {
  polyak_update(s.q1_targ, s.q1, s.hp.tau_targ);
  polyak_update(s.q2_targ, s.q2, s.hp.tau_targ);
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("sac: truncated stream");
}

void put_scalar_adam(std::ostream& os, const ScalarAdam& a) {
  put(os, a.lr);
  put(os, a.step_count);
  put(os, a.m);
  put(os, a.v);
}

void get_scalar_adam(std::istream& is, ScalarAdam& a) {
  get(is, a.lr);
  get(is, a.step_count);
  get(is, a.m);
  get(is, a.v);
}

}  // namespace

void save_sac(std::ostream& os, const SacState& s) {
  save_mlp(os, s.actor);
  save_mlp(os, s.q1);
  save_mlp(os, s.q2);
  save_mlp(os, s.q1_targ);
  save_mlp(os, s.q2_targ);
  save_adam(os, s.actor_opt);
  save_adam(os, s.q1_opt);
  save_adam(os, s.q2_opt);
  put(os, s.alpha);
  put(os, s.entropy_target);
  put_scalar_adam(os, s.alpha_opt);
  put(os, s.critic_updates);
  put(os, s.actor_updates);
}

void load_sac(std::istream& is, SacState& s) {
  s.actor = load_mlp(is);
  s.q1 = load_mlp(is);
  s.q2 = load_mlp(is);
  s.q1_targ = load_mlp(is);
  s.q2_targ = load_mlp(is);
  s.actor_opt = load_adam(is, s.actor);
  s.q1_opt = load_adam(is, s.q1);
  s.q2_opt = load_adam(is, s.q2);
  get(is, s.alpha);
  get(is, s.entropy_target);
  get_scalar_adam(is, s.alpha_opt);
  get(is, s.critic_updates);
  get(is, s.actor_updates);
}

}  // namespace rcrl
