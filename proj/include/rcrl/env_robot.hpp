#pragma once

#include <string>

#include "rcrl/env.hpp"
#include "rcrl/worldmap.hpp"

namespace rcrl {

struct RobotRewardParams {
  double kappa = 0.942;
  double v_ref = 1.2;
  double v_max = 1.5;
  double d_track_max = 5.0;
  double goal_bonus = 100.0;
  double w_p = 0.25;
  double dt = 0.1;
  double goal_radius = 0.5;
  int max_steps = 300;
  double robot_radius = 0.3;
  double a_max = 2.0;        // m/s^2 at full action
  double ang_acc_max = 4.0;  // rad/s^2 at full action
  double omega_max = 2.0;    // rad/s clip
  int lidar_beams = 72;
  double lidar_range = 5.0;
  int lookahead_n = 14;
  double lookahead_spacing = 0.5;  // m of arc length between waypoints
};

// Which terms form the phase-0 base reward (the full reward is unaffected).
enum class BaseSubset : int { GP = 0, GPV = 1, GPA = 2, GPX = 3, Full = 4 };

BaseSubset subset_from_string(const std::string& s);
const char* subset_to_string(BaseSubset s);

struct RewardTerms {
  double r_g = 0, r_a = 0, r_v = 0, r_x = 0, r_p = 0;
};

// Piecewise quadratic speed profile, 1 at v_ref, -1 at the harder-penalized
// extreme of [0, v_max].
double velocity_reward(double v, const RobotRewardParams& p);

RewardTerms reward_terms(const Vec2& prev_pos, const Vec2& next_pos, double next_v,
                         const Vec& action, const ReferencePath& path, const Vec2& goal,
                         const RobotRewardParams& p);

// r_b = r_g + w_p*r_p; r = r_b + w_c*(r_v + r_a + r_x).
void compose_reward(const RewardTerms& t, double w_p, double w_c, double* r_b, double* r);

// Base reward for a training subset; Full means base = full reward.
double subset_base_reward(const RewardTerms& t, double w_p, double w_c, BaseSubset subset);

class RobotEnv : public Env {
 public:
  RobotEnv(const RobotRewardParams& params, double w_c, BaseSubset subset,
           int fixed_template);  // fixed_template < 0 samples one per episode

  int obs_dim() const override;
  int act_dim() const override { return 2; }
  int episode_cap() const override { return params_.max_steps; }
  Vec reset(RngState& rng) override;
  StepResult step(const Vec& action) override;
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  const WorldMap& map() const { return world_.map; }
  const ReferencePath& path() const { return world_.path; }
  const Vec2& goal() const { return world_.goal; }
  Vec2 position() const { return pos_; }
  double heading() const { return heading_; }
  double speed() const { return v_; }
  double angular_speed() const { return omega_; }

 private:
  Vec observe() const;
  void rescan();

  RobotRewardParams params_;
  double w_c_;
  BaseSubset subset_;
  int fixed_template_;

  GeneratedWorld world_;
  Vec2 pos_{0, 0};
  double heading_ = 0.0, v_ = 0.0, omega_ = 0.0;
  int steps_ = 0;
  Vec prev_scan_, cur_scan_;  // raw meters
};

}  // namespace rcrl
