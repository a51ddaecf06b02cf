#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rcrl/env_classic.hpp"

using namespace rcrl;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec act1(double a) {
  Vec v(1);
  v << a;
  return v;
}
}  // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap_angle(kPi + 0.1) == doctest::Approx(-kPi + 0.1).epsilon(1e-12));
  CHECK(wrap_angle(-kPi - 0.1) == doctest::Approx(kPi - 0.1).epsilon(1e-12));
  CHECK(wrap_angle(7.0 * kPi + 0.3) == doctest::Approx(-kPi + 0.3).epsilon(1e-12));
  for (double t = -20.0; t < 20.0; t += 0.37) {
    const double w = wrap_angle(t);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    // Same angle modulo 2*pi.
    CHECK(std::remainder(w - t, 2.0 * kPi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constraint reward is the negative mean absolute action") {
  Vec a(3);
  a << 0.5, -1.0, 0.25;
  CHECK(constraint_reward(a, 3) == doctest::Approx(-(0.5 + 1.0 + 0.25) / 3.0).epsilon(1e-15));
  CHECK(constraint_reward(act1(-0.7), 1) == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(constraint_reward(Vec::Zero(2), 2) == 0.0);
}

TEST_CASE("pendulum reset spans (-pi, pi] with zero velocity") {
  PendulumEnv env(1.0);
  RngState rng(1), shadow(1);
  for (int i = 0; i < 200; ++i) {
    const Vec obs = env.reset(rng);
    const double want_theta = kPi - 2.0 * kPi * shadow.uniform();
    CHECK(env.theta() == doctest::Approx(want_theta).epsilon(1e-15));
    CHECK(env.omega() == 0.0);
    CHECK(obs[0] == doctest::Approx(std::cos(want_theta)).epsilon(1e-12));
    CHECK(obs[1] == doctest::Approx(std::sin(want_theta)).epsilon(1e-12));
    CHECK(obs[2] == 0.0);
  }
}

TEST_CASE("pendulum step follows the hand-integrated dynamics") {
  PendulumEnv env(0.5);
  RngState rng(2);
  env.reset(rng);
  double theta = env.theta(), omega = env.omega();
  RngState arng(3);
  for (int i = 0; i < 300; ++i) {
    const double a = 2.0 * arng.uniform() - 1.0;
    const StepResult r = env.step(act1(a));
    // Semi-implicit Euler with torque 2a, gravity coefficient 15.
    omega = std::clamp(omega + 0.05 * (15.0 * std::sin(theta) + 6.0 * a), -8.0, 8.0);
    theta = wrap_angle(theta + 0.05 * omega);
    CHECK(env.theta() == doctest::Approx(theta).epsilon(1e-12));
    CHECK(env.omega() == doctest::Approx(omega).epsilon(1e-12));
    // Base reward is computed on the state after the transition.
    CHECK(r.rb_report == doctest::Approx((1.0 + std::cos(theta)) / 2.0).epsilon(1e-12));
    CHECK(r.rc_report == doctest::Approx(-std::abs(a)).epsilon(1e-12));
    CHECK(r.r_base == r.rb_report);
    CHECK(r.r_full == doctest::Approx(r.r_base + 0.5 * r.rc_report).epsilon(1e-15));
    CHECK(r.obs[2] == doctest::Approx(omega / 8.0).epsilon(1e-12));
  }
}

TEST_CASE("pendulum clamps the commanded torque") {
  PendulumEnv env(1.0);
  RngState rng(4);
  env.reset(rng);
  const double theta0 = env.theta();
  const StepResult r = env.step(act1(50.0));
  const double omega_want =
      std::clamp(0.0 + 0.05 * (15.0 * std::sin(theta0) + 6.0 * 1.0), -8.0, 8.0);
  CHECK(env.omega() == doctest::Approx(omega_want).epsilon(1e-12));
  // The constraint term is charged on the applied (clamped) action.
  CHECK(r.rc_report == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pendulum never terminates and reports timeout at the cap") {
  PendulumEnv env(1.0, 50);
  RngState rng(5);
  env.reset(rng);
  for (int i = 0; i < 49; ++i) {
    const StepResult r = env.step(act1(0.1));
    CHECK(r.outcome == Outcome::Running);
    CHECK_FALSE(r.done);
  }
  const StepResult last = env.step(act1(0.1));
  CHECK(last.outcome == Outcome::Timeout);
  CHECK_FALSE(last.done);  // timeout is not an MDP terminal
}

TEST_CASE("pendulum reward ranges over random rollouts") {
  PendulumEnv env(1.0);
  RngState rng(6), arng(7);
  env.reset(rng);
  for (int i = 0; i < 100000; ++i) {
    if (i % 1000 == 0) env.reset(rng);
    const double a = 2.0 * arng.uniform() - 1.0;
    const StepResult r = env.step(act1(a));
    REQUIRE(r.rb_report >= 0.0);
    REQUIRE(r.rb_report <= 1.0);
    REQUIRE(r.rc_report >= -1.0);
    REQUIRE(r.rc_report <= 0.0);
    REQUIRE(std::abs(env.omega()) <= 8.0);
  }
}

TEST_CASE("cartpole balance reset and swingup reset") {
  CartpoleEnv bal(CartpoleMode::Balance, 1.0);
  RngState rng(8), shadow(8);
  for (int i = 0; i < 100; ++i) {
    bal.reset(rng);
    const double want = shadow.uniform(-0.05, 0.05);
    CHECK(bal.theta() == doctest::Approx(want).epsilon(1e-15));
    CHECK(bal.x() == 0.0);
  }
  CartpoleEnv swing(CartpoleMode::Swingup, 1.0);
  RngState r1(9), r2(9);
  swing.reset(r1);
  CHECK(swing.theta() == kPi);  // exact, no randomness consumed
  CHECK(r1.uniform() == r2.uniform());
}

TEST_CASE("cartpole step follows the hand-integrated dynamics") {
  CartpoleEnv env(CartpoleMode::Swingup, 1.0);
  RngState rng(10);
  env.reset(rng);
  double x = 0.0, xd = 0.0, th = kPi, thd = 0.0;
  RngState arng(11);
  for (int i = 0; i < 500; ++i) {
    const double a = 2.0 * arng.uniform() - 1.0;
    const StepResult r = env.step(act1(a));
    const double f = 10.0 * a, ct = std::cos(th), st = std::sin(th);
    const double temp = (f + 0.1 * 0.5 * thd * thd * st) / 1.1;
    const double thacc = (9.8 * st - ct * temp) / (0.5 * (4.0 / 3.0 - 0.1 * ct * ct / 1.1));
    const double xacc = temp - 0.1 * 0.5 * thacc * ct / 1.1;
    xd += 0.02 * xacc;
    x += 0.02 * xd;
    thd += 0.02 * thacc;
    th = wrap_angle(th + 0.02 * thd);
    CHECK(env.x() == doctest::Approx(x).epsilon(1e-10));
    CHECK(env.theta() == doctest::Approx(th).epsilon(1e-10));
    const double want_rb = std::max(0.0, std::cos(th)) * (1.0 - std::min(1.0, std::abs(x) / 2.4));
    CHECK(r.rb_report == doctest::Approx(want_rb).epsilon(1e-9).scale(1.0));
    if (r.done) break;
  }
}

TEST_CASE("cartpole terminates only when the cart leaves the track") {
  CartpoleEnv env(CartpoleMode::Balance, 1.0, 1000);
  RngState rng(12);
  env.reset(rng);
  int steps = 0;
  StepResult r;
  // Constant push: the cart must eventually leave |x| <= 2.4 and terminate.
  do {
    r = env.step(act1(1.0));
    ++steps;
    REQUIRE(steps < 1000);
  } while (!r.done);
  CHECK(r.outcome == Outcome::Collision);
  CHECK(std::abs(env.x()) > 2.4);

  // Pole falling over alone does not terminate.
  CartpoleEnv env2(CartpoleMode::Swingup, 1.0, 100);
  RngState rng2(13);
  env2.reset(rng2);
  for (int i = 0; i < 99; ++i) {
    const StepResult s = env2.step(act1(0.0));
    REQUIRE_FALSE(s.done);
    REQUIRE(s.outcome == Outcome::Running);
  }
  CHECK(env2.step(act1(0.0)).outcome == Outcome::Timeout);
}

TEST_CASE("cartpole reward ranges over random rollouts") {
  CartpoleEnv env(CartpoleMode::Swingup, 1.0);
  RngState rng(14), arng(15);
  env.reset(rng);
  for (int i = 0; i < 100000; ++i) {
    const double a = 2.0 * arng.uniform() - 1.0;
    const StepResult r = env.step(act1(a));
    REQUIRE(r.rb_report >= 0.0);
    REQUIRE(r.rb_report <= 1.0);
    REQUIRE(r.rc_report >= -1.0);
    REQUIRE(r.rc_report <= 0.0);
    if (r.done || r.outcome == Outcome::Timeout) env.reset(rng);
  }
}

TEST_CASE("identical seeds give identical trajectories") {
  PendulumEnv a(1.0), b(1.0);
  RngState ra(16), rb(16), arng(17);
  a.reset(ra);
  b.reset(rb);
  for (int i = 0; i < 200; ++i) {
    const double act = 2.0 * arng.uniform() - 1.0;
    const StepResult sa = a.step(act1(act));
    const StepResult sb = b.step(act1(act));
    REQUIRE(sa.r_full == sb.r_full);
    REQUIRE((sa.obs - sb.obs).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mid-episode save/load resumes the exact trajectory") {
  CartpoleEnv env(CartpoleMode::Swingup, 0.7);
  RngState rng(18), arng(19);
  env.reset(rng);
  for (int i = 0; i < 57; ++i) env.step(act1(0.3 * std::sin(0.1 * i)));
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  env.save(ss);

  CartpoleEnv other(CartpoleMode::Swingup, 0.7);
  other.load(ss);
  for (int i = 0; i < 100; ++i) {
    const double a = 2.0 * arng.uniform() - 1.0;
    const StepResult r1 = env.step(act1(a));
    const StepResult r2 = other.step(act1(a));
    REQUIRE(r1.r_full == r2.r_full);
    REQUIRE(r1.outcome == r2.outcome);
    REQUIRE((r1.obs - r2.obs).cwiseAbs().maxCoeff() == 0.0);
  }
}
