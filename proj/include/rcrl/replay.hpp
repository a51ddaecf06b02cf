#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "rcrl/mlp.hpp"
#include "rcrl/rng.hpp"

namespace rcrl {

// One environment step carrying both rewards. r_full was formed as
// r_base + w_c * r_constraint at insertion time; done marks genuine MDP
// termination only (never timeouts).
struct Transition {
  Vec state;
  Vec action;
  double r_base = 0.0;
  double r_full = 0.0;
  Vec next_state;
  bool done = false;
};

// Sampled minibatch; the reward row is already relabeled for the phase it
// was drawn under.
struct Batch {
  Mat states;       // obs_dim x B
  Mat actions;      // act_dim x B
  Eigen::RowVectorXd rewards;
  Mat next_states;  // obs_dim x B
  Eigen::RowVectorXd done;  // 1.0 on terminal transitions
  int size() const { return static_cast<int>(rewards.cols()); }
};

inline double select_curriculum_reward(double r_base, double r_full, int phase) {
  return phase == 0 ? r_base : r_full;
}

// Ring of transitions in struct-of-arrays layout. Memory is reserved up
// front for min(capacity, expected insertions) so long runs do not pay for
// reallocation or unused capacity.
class ReplayBuffer {
public:
  ReplayBuffer(int obs_dim, int act_dim, size_t capacity = 1'000'000,
               size_t expected = 1'000'000);

  void push(const Transition& t);
  void push(const Vec& s, const Vec& a, double r_base, double r_full, const Vec& s2, bool done);

  // Uniform with replacement; rewards relabeled per phase. Throws
  // ConfigError when size() < batch_size (callers skip gradient steps
  // during warm-up instead of sampling).
  Batch sample(int phase, int batch_size, RngState& rng) const;

  bool ready(int batch_size) const { return size_ >= static_cast<size_t>(batch_size); }
  size_t size() const { return size_; }
  size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  void clear();

  // Stored values for slot i (test access).
  double r_base_at(size_t i) const { return r_base_[i]; }
  double r_full_at(size_t i) const { return r_full_[i]; }
  Vec state_at(size_t i) const;
  Vec action_at(size_t i) const;
  bool done_at(size_t i) const { return done_[i] != 0; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

private:
  int obs_dim_, act_dim_;
  size_t capacity_, cursor_ = 0, size_ = 0;
  std::vector<double> states_, actions_, next_states_;
  std::vector<double> r_base_, r_full_;
  std::vector<uint8_t> done_;
};

}  // namespace rcrl
