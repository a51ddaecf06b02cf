#include "rcrl/replay.hpp"

#include <cstring>

namespace rcrl {

ReplayBuffer::ReplayBuffer(int obs_dim, int act_dim, size_t capacity, size_t expected)
    : obs_dim_(obs_dim), act_dim_(act_dim), capacity_(capacity) {
  if (obs_dim <= 0 || act_dim <= 0 || capacity == 0)
    throw ConfigError("replay buffer: bad dimensions");
  const size_t reserve = std::min(capacity, expected);
  states_.reserve(reserve * obs_dim_);
  actions_.reserve(reserve * act_dim_);
  next_states_.reserve(reserve * obs_dim_);
  r_base_.reserve(reserve);
  r_full_.reserve(reserve);
  done_.reserve(reserve);
}

void ReplayBuffer::push(const Vec& s, const Vec& a, double r_base, double r_full, const Vec& s2,
                        bool done) {
  if (s.size() != obs_dim_ || s2.size() != obs_dim_ || a.size() != act_dim_)
    throw ConfigError("replay buffer: transition dim mismatch");
  if (size_ < capacity_) {
    states_.insert(states_.end(), s.data(), s.data() + obs_dim_);
    actions_.insert(actions_.end(), a.data(), a.data() + act_dim_);
    next_states_.insert(next_states_.end(), s2.data(), s2.data() + obs_dim_);
    r_base_.push_back(r_base);
    r_full_.push_back(r_full);
    done_.push_back(done ? 1 : 0);
    ++size_;
    cursor_ = size_ % capacity_;
  } else {
    std::memcpy(&states_[cursor_ * obs_dim_], s.data(), sizeof(double) * obs_dim_);
    std::memcpy(&actions_[cursor_ * act_dim_], a.data(), sizeof(double) * act_dim_);
    std::memcpy(&next_states_[cursor_ * obs_dim_], s2.data(), sizeof(double) * obs_dim_);
    r_base_[cursor_] = r_base;
    r_full_[cursor_] = r_full;
    done_[cursor_] = done ? 1 : 0;
    cursor_ = (cursor_ + 1) % capacity_;
  }
}

void ReplayBuffer::push(const Transition& t) {
  push(t.state, t.action, t.r_base, t.r_full, t.next_state, t.done);
}

Batch ReplayBuffer::sample(int phase, int batch_size, RngState& rng) const {
  if (!ready(batch_size)) throw ConfigError("replay buffer: not enough samples");
  Batch b;
  b.states.resize(obs_dim_, batch_size);
  b.actions.resize(act_dim_, batch_size);
  b.next_states.resize(obs_dim_, batch_size);
  b.rewards.resize(batch_size);
  b.done.resize(batch_size);
  for (int j = 0; j < batch_size; ++j) {
    const size_t i = rng.uniform_int(size_);
    std::memcpy(b.states.col(j).data(), &states_[i * obs_dim_], sizeof(double) * obs_dim_);
    std::memcpy(b.actions.col(j).data(), &actions_[i * act_dim_], sizeof(double) * act_dim_);
    std::memcpy(b.next_states.col(j).data(), &next_states_[i * obs_dim_],
                sizeof(double) * obs_dim_);
    b.rewards(j) = select_curriculum_reward(r_base_[i], r_full_[i], phase);
    b.done(j) = done_[i] ? 1.0 : 0.0;
  }
  return b;
}

Vec ReplayBuffer::state_at(size_t i) const {
  return Eigen::Map<const Vec>(&states_[i * obs_dim_], obs_dim_);
}

Vec ReplayBuffer::action_at(size_t i) const {
  return Eigen::Map<const Vec>(&actions_[i * act_dim_], act_dim_);
}

void ReplayBuffer::clear() {
  states_.clear();
  actions_.clear();
  next_states_.clear();
  r_base_.clear();
  r_full_.clear();
  done_.clear();
  size_ = 0;
  cursor_ = 0;
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("replay buffer: truncated stream");
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
  const uint64_t n = v.size();
  write_pod(os, n);
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& is, std::vector<T>& v) {
  uint64_t n = 0;
  read_pod(is, n);
  v.resize(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw ConfigError("replay buffer: truncated stream");
}

}  // namespace

void ReplayBuffer::save(std::ostream& os) const {
  write_pod<uint32_t>(os, static_cast<uint32_t>(obs_dim_));
  write_pod<uint32_t>(os, static_cast<uint32_t>(act_dim_));
  write_pod<uint64_t>(os, capacity_);
  write_pod<uint64_t>(os, cursor_);
  write_pod<uint64_t>(os, size_);
  write_vec(os, states_);
  write_vec(os, actions_);
  write_vec(os, next_states_);
  write_vec(os, r_base_);
  write_vec(os, r_full_);
  write_vec(os, done_);
}

void ReplayBuffer::load(std::istream& is) {
  uint32_t od = 0, ad = 0;
  read_pod(is, od);
  read_pod(is, ad);
  if (static_cast<int>(od) != obs_dim_ || static_cast<int>(ad) != act_dim_)
    throw ConfigError("replay buffer: checkpoint dims mismatch");
  read_pod(is, capacity_);
  read_pod(is, cursor_);
  read_pod(is, size_);
  read_vec(is, states_);
  read_vec(is, actions_);
  read_vec(is, next_states_);
  read_vec(is, r_base_);
  read_vec(is, r_full_);
  read_vec(is, done_);
}

}  // namespace rcrl
