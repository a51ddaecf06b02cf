#include "rcrl/td3.hpp"

#include <algorithm>
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

Td3State Td3State::create(int obs_dim, int act_dim, const AgentHyperparams& hp, RngState& rng) {
  Td3State s;
  s.hp = hp;
  s.obs_dim = obs_dim;
  s.act_dim = act_dim;
  s.actor = Mlp::create(obs_dim, act_dim, rng, OutputHead::Identity, hp.hidden);
  s.q1 = Mlp::create(obs_dim + act_dim, 1, rng, OutputHead::Identity, hp.hidden);
  s.q2 = Mlp::create(obs_dim + act_dim, 1, rng, OutputHead::Identity, hp.hidden);
  s.actor_targ = s.actor;
  s.q1_targ = s.q1;
  s.q2_targ = s.q2;
  s.actor_opt = AdamState::create(s.actor, hp.lr_pi);
  s.q1_opt = AdamState::create(s.q1, hp.lr_q);
  s.q2_opt = AdamState::create(s.q2, hp.lr_q);
  s.sigma = hp.sigma_explore;
  return s;
}

Vec td3_policy(const Mlp& actor, const Vec& obs) {
  Vec out = mlp_forward(actor, obs);
  for (int d = 0; d < out.size(); ++d) out(d) = squash(out(d));
  return out;
}

Vec td3_select_action(const Td3State& s, const Vec& obs, bool explore, RngState& rng) {
  Vec a = td3_policy(s.actor, obs);
  if (explore) {
    for (int d = 0; d < a.size(); ++d)
      a(d) = std::clamp(a(d) + s.sigma * rng.normal(), -1.0, 1.0);
  }
  return a;
}

CriticLosses td3_critic_update(Td3State& s, const Batch& b, RngState& rng) {
  const int batch = b.size();
  Mat pre;
  mlp_forward(s.actor_targ, b.next_states, pre);
  Mat a2 = squash(pre);
  for (int j = 0; j < batch; ++j)
    for (int d = 0; d < s.act_dim; ++d) {
      const double noise =
          std::clamp(s.hp.sigma_target * rng.normal(), -s.hp.noise_clip, s.hp.noise_clip);
      a2(d, j) = std::clamp(a2(d, j) + noise, -1.0, 1.0);
    }

  Mat sa2 = concat_sa(b.next_states, a2);
  Mat q1t, q2t;
  mlp_forward(s.q1_targ, sa2, q1t);
  mlp_forward(s.q2_targ, sa2, q2t);

  Eigen::RowVectorXd y(batch);
  for (int j = 0; j < batch; ++j)
    y(j) = b.rewards(j) + s.hp.gamma * (1.0 - b.done(j)) * std::min(q1t(0, j), q2t(0, j));

  Mat sa = concat_sa(b.states, b.actions);
  CriticLosses losses;
  critic_step(s.q1, s.q1_opt, sa, y, losses.q1);
  critic_step(s.q2, s.q2_opt, sa, y, losses.q2);
  ++s.critic_updates;
  return losses;
}

double td3_actor_update(Td3State& s, const Batch& b) {
  const int batch = b.size();
  MlpWorkspace actor_ws;
  Mat pre;
  mlp_forward(s.actor, b.states, pre, &actor_ws);
  Mat action = squash(pre);

  Mat sa = concat_sa(b.states, action);
  MlpWorkspace q_ws;
  Mat q_out;
  mlp_forward(s.q1, sa, q_out, &q_ws);
  const double fit = -q_out.row(0).mean();

  ++s.grad_steps;
  if (s.grad_steps % s.hp.policy_delay == 0) {
    Mat d_q = Mat::Constant(1, batch, -1.0 / batch);
    Mat d_in;
    mlp_backward(s.q1, q_ws, d_q, nullptr, &d_in);
    Mat d_pre =
        d_in.bottomRows(s.act_dim).cwiseProduct(dtanh_from_action(action));
    MlpGrads ag = MlpGrads::zeros_like(s.actor);
    mlp_backward(s.actor, actor_ws, d_pre, &ag);
    s.actor_opt.update(s.actor, ag);
    ++s.actor_updates;

    polyak_update(s.actor_targ, s.actor, s.hp.tau_targ);
    polyak_update(s.q1_targ, s.q1, s.hp.tau_targ);
    polyak_update(s.q2_targ, s.q2, s.hp.tau_targ);
  }
  return fit;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("td3: truncated stream");
}

}  // namespace

void save_td3(std::ostream& os, const Td3State& s) {
  save_mlp(os, s.actor);
  save_mlp(os, s.actor_targ);
  save_mlp(os, s.q1);
  save_mlp(os, s.q2);
  save_mlp(os, s.q1_targ);
  save_mlp(os, s.q2_targ);
  save_adam(os, s.actor_opt);
  save_adam(os, s.q1_opt);
  save_adam(os, s.q2_opt);
  put(os, s.sigma);
  put(os, s.critic_updates);
  put(os, s.actor_updates);
  put(os, s.grad_steps);
}

void load_td3(std::istream& is, Td3State& s) {
  s.actor = load_mlp(is);
  s.actor_targ = load_mlp(is);
  s.q1 = load_mlp(is);
  s.q2 = load_mlp(is);
  s.q1_targ = load_mlp(is);
  s.q2_targ = load_mlp(is);
  s.actor_opt = load_adam(is, s.actor);
  s.q1_opt = load_adam(is, s.q1);
  s.q2_opt = load_adam(is, s.q2);
  get(is, s.sigma);
  get(is, s.critic_updates);
  get(is, s.actor_updates);
  get(is, s.grad_steps);
}

}  // namespace rcrl
