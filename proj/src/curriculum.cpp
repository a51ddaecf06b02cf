#include "rcrl/curriculum.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>

namespace rcrl {

CurriculumController::CurriculumController(double threshold, int window)
    : threshold_(threshold), window_(window) {
  if (window <= 0) throw ConfigError("curriculum: window must be positive");
}

bool CurriculumController::record_actor_fit(double j_value) {
  tail_.push_back(j_value);
  if (static_cast<int>(tail_.size()) > window_) tail_.pop_front();
  ++iteration_count_;
  if (phase_ != 0) return false;
  if (static_cast<int>(tail_.size()) < window_) return false;
  const bool all_below =
      std::all_of(tail_.begin(), tail_.end(), [&](double j) { return j < threshold_; });
  if (!all_below) return false;
  phase_ = 1;
  switch_iteration_ = iteration_count_ - 1;
  return true;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("curriculum: truncated stream");
}

}  // namespace

void CurriculumController::save(std::ostream& os) const {
  put(os, threshold_);
  put<int32_t>(os, window_);
  put<int32_t>(os, phase_);
  put<int64_t>(os, iteration_count_);
  put<int64_t>(os, switch_iteration_);
  put<uint32_t>(os, static_cast<uint32_t>(tail_.size()));
  for (double j : tail_) put(os, j);
}

void CurriculumController::load(std::istream& is) {
  int32_t window = 0, phase = 0;
  int64_t iters = 0, sw = 0;
  uint32_t n = 0;
  get(is, threshold_);
  get(is, window);
  get(is, phase);
  get(is, iters);
  get(is, sw);
  get(is, n);
  if (window <= 0 || (phase != 0 && phase != 1) || n > static_cast<uint32_t>(window))
    throw ConfigError("curriculum: corrupt checkpoint");
  window_ = window;
  phase_ = phase;
  iteration_count_ = iters;
  switch_iteration_ = sw;
  tail_.clear();
  for (uint32_t i = 0; i < n; ++i) {
    double j = 0;
    get(is, j);
    tail_.push_back(j);
  }
}

bool CurriculumController::operator==(const CurriculumController& o) const {
  return threshold_ == o.threshold_ && window_ == o.window_ && phase_ == o.phase_ &&
         iteration_count_ == o.iteration_count_ && switch_iteration_ == o.switch_iteration_ &&
         tail_ == o.tail_;
}

}  // namespace rcrl
