#include "rcrl/env_robot.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "rcrl/env_classic.hpp"  // wrap_angle

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
  if (!is) throw ConfigError("robot env: truncated stream");
}

void put_vec2(std::ostream& os, const Vec2& v) {
  put(os, v.x());
  put(os, v.y());
}

Vec2 get_vec2(std::istream& is) {
  double x, y;
  get(is, x);
  get(is, y);
  return {x, y};
}

Vec2 to_robot_frame(const Vec2& target, const Vec2& pos, double heading) {
  const Vec2 d = target - pos;
  const double ch = std::cos(heading), sh = std::sin(heading);
  return {ch * d.x() + sh * d.y(), -sh * d.x() + ch * d.y()};
}

}  // namespace

BaseSubset subset_from_string(const std::string& s) {
  if (s == "gp") return BaseSubset::GP;
  if (s == "gpv") return BaseSubset::GPV;
  if (s == "gpa") return BaseSubset::GPA;
  if (s == "gpx") return BaseSubset::GPX;
  if (s == "full") return BaseSubset::Full;
  throw ConfigError("unknown base subset: " + s);
}

const char* subset_to_string(BaseSubset s) {
  switch (s) {
    case BaseSubset::GP: return "gp";
    case BaseSubset::GPV: return "gpv";
    case BaseSubset::GPA: return "gpa";
    case BaseSubset::GPX: return "gpx";
    case BaseSubset::Full: return "full";
  }
  return "unknown";
}

double velocity_reward(double v, const RobotRewardParams& p) {
  const auto l2k = [&](double x) {
    return x > 0.0 ? p.kappa * x * x : (1.0 - p.kappa) * x * x;
  };
  const double denom = std::max(l2k(-p.v_ref), l2k(p.v_max - p.v_ref));
  return 1.0 - 2.0 * l2k(v - p.v_ref) / denom;
}

RewardTerms reward_terms(const Vec2& prev_pos, const Vec2& next_pos, double next_v,
                         const Vec& action, const ReferencePath& path, const Vec2& goal,
                         const RobotRewardParams& p) {
  RewardTerms t;
  t.r_g = (next_pos - goal).norm() <= p.goal_radius ? p.goal_bonus : 0.0;
  t.r_a = 1.0 - action.template lpNorm<1>();
  t.r_v = velocity_reward(next_v, p);
  double d_track = 0.0;
  const double p_after = path.project(next_pos, &d_track);
  const double p_before = path.project(prev_pos, nullptr);
  t.r_x = 1.0 - 2.0 * std::min(d_track / p.d_track_max, 1.0);
  t.r_p = std::clamp((p_after - p_before) / (p.v_max * p.dt), -1.0, 1.0);
  return t;
}

void compose_reward(const RewardTerms& t, double w_p, double w_c, double* r_b, double* r) {
  *r_b = t.r_g + w_p * t.r_p;
  *r = *r_b + w_c * (t.r_v + t.r_a + t.r_x);
}

double subset_base_reward(const RewardTerms& t, double w_p, double w_c, BaseSubset subset) {
  double r_b, r;
  compose_reward(t, w_p, w_c, &r_b, &r);
  switch (subset) {
    case BaseSubset::GP: return r_b;
    case BaseSubset::GPV: return r_b + w_c * t.r_v;
    case BaseSubset::GPA: return r_b + w_c * t.r_a;
    case BaseSubset::GPX: return r_b + w_c * t.r_x;
    case BaseSubset::Full: return r;
  }
  return r_b;
}

RobotEnv::RobotEnv(const RobotRewardParams& params, double w_c, BaseSubset subset,
                   int fixed_template)
    : params_(params), w_c_(w_c), subset_(subset), fixed_template_(fixed_template) {}

int RobotEnv::obs_dim() const {
  return 2 * params_.lidar_beams + 6 + 2 * params_.lookahead_n;
}

void RobotEnv::rescan() {
  cur_scan_ = lidar_scan(world_.map, pos_, heading_, params_.lidar_beams,
                         params_.lidar_range);
}

Vec RobotEnv::reset(RngState& rng) {
  world_ = generate_map(rng, fixed_template_, params_.robot_radius);
  pos_ = world_.start;
  heading_ = kPi - 2.0 * kPi * rng.uniform();
  v_ = 0.0;
  omega_ = 0.0;
  steps_ = 0;
  rescan();
  prev_scan_ = cur_scan_;
  return observe();
}

Vec RobotEnv::observe() const {
  const int nb = params_.lidar_beams;
  const double scale = 1.0 / 20.0;
  Vec o(obs_dim());
  o.segment(0, nb) = prev_scan_ / params_.lidar_range;
  o.segment(nb, nb) = cur_scan_ / params_.lidar_range;
  o(2 * nb + 0) = (pos_.x() - world_.goal.x()) * scale;
  o(2 * nb + 1) = (pos_.y() - world_.goal.y()) * scale;
  o(2 * nb + 2) = v_ / params_.v_max;
  o(2 * nb + 3) = omega_ / params_.omega_max;
  const Vec2 goal_rf = to_robot_frame(world_.goal, pos_, heading_);
  o(2 * nb + 4) = goal_rf.x() * scale;
  o(2 * nb + 5) = goal_rf.y() * scale;
  const double s0 = world_.path.project(pos_, nullptr);
  for (int k = 0; k < params_.lookahead_n; ++k) {
    const Vec2 wp = world_.path.point_at(s0 + (k + 1) * params_.lookahead_spacing);
    const Vec2 wp_rf = to_robot_frame(wp, pos_, heading_);
    o(2 * nb + 6 + 2 * k) = wp_rf.x() * scale;
    o(2 * nb + 7 + 2 * k) = wp_rf.y() * scale;
  }
  return o;
}

StepResult RobotEnv::step(const Vec& action) {
  Vec a(2);
  a << std::clamp(action(0), -1.0, 1.0), std::clamp(action(1), -1.0, 1.0);
  const double dt = params_.dt;

  v_ = std::clamp(v_ + a(0) * params_.a_max * dt, 0.0, params_.v_max);
  omega_ = std::clamp(omega_ + a(1) * params_.ang_acc_max * dt, -params_.omega_max,
                      params_.omega_max);
  heading_ = wrap_angle(heading_ + omega_ * dt);
  const Vec2 prev_pos = pos_;
  pos_ += v_ * dt * Vec2{std::cos(heading_), std::sin(heading_)};
  advance_dynamics(world_.map, dt);
  ++steps_;

  const RewardTerms terms =
      reward_terms(prev_pos, pos_, v_, a, world_.path, world_.goal, params_);

  StepResult r;
  if (terms.r_g > 0.0) {
    r.outcome = Outcome::Goal;
    r.done = true;
  } else if (collides(world_.map, pos_, params_.robot_radius)) {
    r.outcome = Outcome::Collision;
    r.done = true;
  } else if (steps_ >= params_.max_steps) {
    r.outcome = Outcome::Timeout;
    r.done = false;
  }

  double r_b_canon, r_full;
  compose_reward(terms, params_.w_p, w_c_, &r_b_canon, &r_full);
  r.rb_report = r_b_canon;
  r.rc_report = terms.r_v + terms.r_a + terms.r_x;
  r.r_base = subset_base_reward(terms, params_.w_p, w_c_, subset_);
  r.r_full = r_full;

  prev_scan_ = cur_scan_;
  rescan();
  r.obs = observe();
  return r;
}

void RobotEnv::save(std::ostream& os) const {
  put<int32_t>(os, world_.map.template_id);
  put<uint32_t>(os, static_cast<uint32_t>(world_.map.statics.size()));
  for (const Circle& c : world_.map.statics) {
    put_vec2(os, c.center);
    put(os, c.radius);
  }
  put<uint32_t>(os, static_cast<uint32_t>(world_.map.dynamics.size()));
  for (const DynObstacle& d : world_.map.dynamics) {
    put_vec2(os, d.c.center);
    put(os, d.c.radius);
    put_vec2(os, d.vel);
  }
  put_vec2(os, world_.start);
  put_vec2(os, world_.goal);
  world_.path.save(os);
  put_vec2(os, pos_);
  put(os, heading_);
  put(os, v_);
  put(os, omega_);
  put<int32_t>(os, steps_);
  for (int i = 0; i < params_.lidar_beams; ++i) put(os, prev_scan_(i));
  for (int i = 0; i < params_.lidar_beams; ++i) put(os, cur_scan_(i));
}

void RobotEnv::load(std::istream& is) {
  int32_t tid = 0;
  get(is, tid);
  world_.map = WorldMap{};
  world_.map.template_id = tid;
  world_.map.walls = template_walls(tid);
  world_.grid = OccupancyGrid::build(world_.map.width, world_.map.height, 0.25,
                                     world_.map.walls, params_.robot_radius);
  uint32_t n = 0;
  get(is, n);
  for (uint32_t i = 0; i < n; ++i) {
    Circle c;
    c.center = get_vec2(is);
    get(is, c.radius);
    world_.map.statics.push_back(c);
  }
  get(is, n);
  for (uint32_t i = 0; i < n; ++i) {
    DynObstacle d;
    d.c.center = get_vec2(is);
    get(is, d.c.radius);
    d.vel = get_vec2(is);
    world_.map.dynamics.push_back(d);
  }
  world_.start = get_vec2(is);
  world_.goal = get_vec2(is);
  world_.path.load(is);
  pos_ = get_vec2(is);
  get(is, heading_);
  get(is, v_);
  get(is, omega_);
  int32_t s = 0;
  get(is, s);
  steps_ = s;
  prev_scan_.resize(params_.lidar_beams);
  cur_scan_.resize(params_.lidar_beams);
  for (int i = 0; i < params_.lidar_beams; ++i) get(is, prev_scan_(i));
  for (int i = 0; i < params_.lidar_beams; ++i) get(is, cur_scan_(i));
}

}  // namespace rcrl
