#pragma once

#include "rcrl/env.hpp"

namespace rcrl {

// -(1/d) * l1-norm of the action, the classic-control constraint term.
double constraint_reward(const Vec& action, int d);

// Maps any angle into (-pi, pi].
double wrap_angle(double t);

// Torque-limited pendulum, theta 0 = upright. Swingup task: random initial
// angle, never terminal, capped at 1000 steps.
class PendulumEnv : public Env {
 public:
  explicit PendulumEnv(double w_c, int cap = 1000);

  int obs_dim() const override { return 3; }
  int act_dim() const override { return 1; }
  int episode_cap() const override { return cap_; }
  Vec reset(RngState& rng) override;
  StepResult step(const Vec& action) override;
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  double theta() const { return theta_; }
  double omega() const { return omega_; }

 private:
  Vec observe() const;

  double w_c_;
  int cap_;
  double theta_ = 0.0, omega_ = 0.0;
  int steps_ = 0;
};

enum class CartpoleMode { Balance, Swingup };

class CartpoleEnv : public Env {
 public:
  CartpoleEnv(CartpoleMode mode, double w_c, int cap = 1000);

  int obs_dim() const override { return 5; }
  int act_dim() const override { return 1; }
  int episode_cap() const override { return cap_; }
  Vec reset(RngState& rng) override;
  StepResult step(const Vec& action) override;
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  double x() const { return x_; }
  double theta() const { return theta_; }

 private:
  Vec observe() const;

  CartpoleMode mode_;
  double w_c_;
  int cap_;
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  int steps_ = 0;
};

}  // namespace rcrl
