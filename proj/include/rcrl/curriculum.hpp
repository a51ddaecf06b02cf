#pragma once

#include <deque>
#include <iosfwd>

#include "rcrl/mlp.hpp"

namespace rcrl {

// Two-stage curriculum phase controller. Tracks per-iteration actor-fit
// values and flips phase 0 -> 1 once the last `m` of them are all strictly
// below the threshold. The flip is one-way.
class CurriculumController {
 public:
  CurriculumController(double threshold, int window);

  // Appends one per-iteration fit value. Returns true exactly on the
  // iteration where the phase switches.
  bool record_actor_fit(double j_value);

  int phase() const { return phase_; }
  double threshold() const { return threshold_; }
  int window() const { return window_; }
  // Number of fit values recorded so far.
  long iteration_count() const { return iteration_count_; }
  // Iteration index (0-based, in recorded values) at which the switch fired,
  // or -1 while still in phase 0.
  long switch_iteration() const { return switch_iteration_; }

  // Only the last `window` values are retained; enough to decide a switch.
  const std::deque<double>& history_tail() const { return tail_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

  bool operator==(const CurriculumController& o) const;

 private:
  double threshold_;
  int window_;
  int phase_ = 0;
  long iteration_count_ = 0;
  long switch_iteration_ = -1;
  std::deque<double> tail_;
};

}  // namespace rcrl
