#include "rcrl/env_classic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace rcrl {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("env: truncated stream");
}

}  // namespace

double constraint_reward(const Vec& action, int d) {
  return -action.template lpNorm<1>() / d;
}

double wrap_angle(double t) {
  t = std::remainder(t, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

PendulumEnv::PendulumEnv(double w_c, int cap) : w_c_(w_c), cap_(cap) {}

Vec PendulumEnv::reset(RngState& rng) {
  // theta ~ U(-pi, pi]: u=0 maps to +pi, u->1 approaches -pi.
  theta_ = kPi - 2.0 * kPi * rng.uniform();
  omega_ = 0.0;
  steps_ = 0;
  return observe();
}

Vec PendulumEnv::observe() const {
  Vec o(3);
  o << std::cos(theta_), std::sin(theta_), omega_ / 8.0;
  return o;
}

StepResult PendulumEnv::step(const Vec& action) {
  const double a = std::clamp(action(0), -1.0, 1.0);
  const double dt = 0.05;
  // theta'' = (3g/2l) sin(theta) + (3/ml^2) tau with m=l=1, g=10, tau=2a.
  const double acc = 15.0 * std::sin(theta_) + 3.0 * (2.0 * a);
  omega_ = std::clamp(omega_ + dt * acc, -8.0, 8.0);
  theta_ = wrap_angle(theta_ + dt * omega_);
  ++steps_;

  StepResult r;
  r.obs = observe();
  r.rb_report = (1.0 + std::cos(theta_)) / 2.0;
  r.rc_report = -std::abs(a);  // the clamped action is what was applied
  r.r_base = r.rb_report;
  r.r_full = r.r_base + w_c_ * r.rc_report;
  r.done = false;
  r.outcome = steps_ >= cap_ ? Outcome::Timeout : Outcome::Running;
  return r;
}

void PendulumEnv::save(std::ostream& os) const {
  put(os, theta_);
  put(os, omega_);
  put<int32_t>(os, steps_);
}

void PendulumEnv::load(std::istream& is) {
  int32_t s = 0;
  get(is, theta_);
  get(is, omega_);
  get(is, s);
  steps_ = s;
}

CartpoleEnv::CartpoleEnv(CartpoleMode mode, double w_c, int cap)
    : mode_(mode), w_c_(w_c), cap_(cap) {}

Vec CartpoleEnv::reset(RngState& rng) {
  x_ = 0.0;
  x_dot_ = 0.0;
  theta_dot_ = 0.0;
  steps_ = 0;
  if (mode_ == CartpoleMode::Balance)
    theta_ = rng.uniform(-0.05, 0.05);
  else
    theta_ = kPi;
  return observe();
}

Vec CartpoleEnv::observe() const {
  Vec o(5);
  o << x_ / 2.4, x_dot_ / 5.0, std::cos(theta_), std::sin(theta_), theta_dot_ / 10.0;
  return o;
}

StepResult CartpoleEnv::step(const Vec& action) {
  const double a = std::clamp(action(0), -1.0, 1.0);
  const double mc = 1.0, mp = 1.0e-1, l = 0.5, g = 9.8, dt = 0.02;
  const double force = 10.0 * a;
  const double ct = std::cos(theta_), st = std::sin(theta_);
  const double temp = (force + mp * l * theta_dot_ * theta_dot_ * st) / (mc + mp);
  const double theta_acc =
      (g * st - ct * temp) / (l * (4.0 / 3.0 - mp * ct * ct / (mc + mp)));
  const double x_acc = temp - mp * l * theta_acc * ct / (mc + mp);
  x_dot_ += dt * x_acc;
  x_ += dt * x_dot_;
  theta_dot_ += dt * theta_acc;
  theta_ = wrap_angle(theta_ + dt * theta_dot_);
  ++steps_;

  StepResult r;
  r.obs = observe();
  r.rb_report = std::max(0.0, std::cos(theta_)) * (1.0 - std::min(1.0, std::abs(x_) / 2.4));
  r.rc_report = -std::abs(a);
  r.r_base = r.rb_report;
  r.r_full = r.r_base + w_c_ * r.rc_report;
  r.done = std::abs(x_) > 2.4;
  if (r.done)
    r.outcome = Outcome::Collision;
  else
    r.outcome = steps_ >= cap_ ? Outcome::Timeout : Outcome::Running;
  return r;
}

void CartpoleEnv::save(std::ostream& os) const {
  put(os, x_);
  put(os, x_dot_);
  put(os, theta_);
  put(os, theta_dot_);
  put<int32_t>(os, steps_);
}

void CartpoleEnv::load(std::istream& is) {
  int32_t s = 0;
  get(is, x_);
  get(is, x_dot_);
  get(is, theta_);
  get(is, theta_dot_);
  get(is, s);
  steps_ = s;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Goal: return "goal";
    case Outcome::Timeout: return "timeout";
    case Outcome::Collision: return "collision";
  }
  return "unknown";
}

}  // namespace rcrl
