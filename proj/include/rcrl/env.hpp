#pragma once

#include <iosfwd>

#include "rcrl/mlp.hpp"

namespace rcrl {

enum class Outcome : int { Running = 0, Goal = 1, Timeout = 2, Collision = 3 };

const char* outcome_name(Outcome o);

struct StepResult {
  Vec obs;
  double r_base = 0.0;   // reward trained on in phase 0
  double r_full = 0.0;   // r_base + w_c * constraint terms
  double rb_report = 0.0;  // canonical base part, for fixed-w_c reporting
  double rc_report = 0.0;  // canonical unweighted constraint part
  bool done = false;       // terminal for bootstrapping; timeouts stay false
  Outcome outcome = Outcome::Running;
};

// Episode-stepped environment. Instances hold no rng; all randomness comes
// in through reset() so checkpointing the caller's rng restores everything.
class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual int episode_cap() const = 0;
  virtual Vec reset(RngState& rng) = 0;
  virtual StepResult step(const Vec& action) = 0;
  // Episode-dynamic state only; construction parameters are not persisted.
  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;
};

}  // namespace rcrl
