#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rcrl/curriculum.hpp"
#include "rcrl/rng.hpp"

using namespace rcrl;

namespace {

// First index i where values[i-m+1 .. i] are all strictly below the
// threshold, or -1. Scans every window independently.
long brute_force_switch(const std::vector<double>& values, double threshold, int m) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < static_cast<size_t>(m)) continue;
    bool all_below = true;
    for (size_t k = i + 1 - m; k <= i; ++k)
      if (!(values[k] < threshold)) all_below = false;
    if (all_below) return static_cast<long>(i);
  }
  return -1;
}

}  // namespace

TEST_CASE("switch fires exactly where the brute-force oracle says") {
  RngState rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const double threshold = rng.uniform(-10.0, 10.0);
    const int m = 1 + static_cast<int>(rng.uniform_int(30));
    const int len = 1 + static_cast<int>(rng.uniform_int(200));
    // Center the values on the threshold so windows of below-threshold
    // values occur often but not always.
    std::vector<double> values(len);
    for (double& v : values) v = threshold + rng.normal() * 2.0 + rng.uniform(-1.0, 1.0);

    CurriculumController ctrl(threshold, m);
    const long want = brute_force_switch(values, threshold, m);
    long got = -1;
    for (int i = 0; i < len; ++i) {
      const bool fired = ctrl.record_actor_fit(values[i]);
      if (fired) {
        REQUIRE(got == -1);  // at most one switch ever
        got = i;
      }
      REQUIRE(ctrl.phase() == (got >= 0 ? 1 : 0));
    }
    REQUIRE(got == want);
    REQUIRE(ctrl.switch_iteration() == want);
    REQUIRE(ctrl.iteration_count() == len);
  }
}

TEST_CASE("no switch without m consecutive sub-threshold values") {
  CurriculumController ctrl(-50.0, 3);
  // Runs of length 2 below the threshold, broken each time.
  for (int rep = 0; rep < 10; ++rep) {
    CHECK_FALSE(ctrl.record_actor_fit(-60.0));
    CHECK_FALSE(ctrl.record_actor_fit(-55.0));
    CHECK_FALSE(ctrl.record_actor_fit(-50.0));  // equality does not count
  }
  CHECK(ctrl.phase() == 0);
  CHECK(ctrl.switch_iteration() == -1);
}

TEST_CASE("strictly-below comparison at the threshold") {
  CurriculumController ctrl(0.0, 2);
  CHECK_FALSE(ctrl.record_actor_fit(-1.0));
  CHECK_FALSE(ctrl.record_actor_fit(0.0));   // breaks the run
  CHECK_FALSE(ctrl.record_actor_fit(-1.0));
  CHECK(ctrl.record_actor_fit(-0.5));        // two strictly below now
  CHECK(ctrl.phase() == 1);
  CHECK(ctrl.switch_iteration() == 3);
}

TEST_CASE("window of one fires immediately") {
  CurriculumController ctrl(-5.0, 1);
  CHECK_FALSE(ctrl.record_actor_fit(-5.0));
  CHECK(ctrl.record_actor_fit(-5.0000001));
  CHECK(ctrl.switch_iteration() == 1);
}

TEST_CASE("switch is one-way") {
  CurriculumController ctrl(0.0, 2);
  CHECK_FALSE(ctrl.record_actor_fit(-1.0));
  CHECK(ctrl.record_actor_fit(-1.0));
  // Further sub-threshold runs never report another switch.
  for (int i = 0; i < 50; ++i) {
    CHECK_FALSE(ctrl.record_actor_fit(-100.0));
    CHECK(ctrl.phase() == 1);
  }
  CHECK(ctrl.switch_iteration() == 1);
  CHECK(ctrl.iteration_count() == 52);
}

TEST_CASE("history tail keeps at most the window") {
  CurriculumController ctrl(0.0, 4);
  for (int i = 0; i < 10; ++i) {
    ctrl.record_actor_fit(static_cast<double>(i));
    CHECK(ctrl.history_tail().size() <= 4);
  }
  // Tail holds the most recent values in order.
  REQUIRE(ctrl.history_tail().size() == 4);
  CHECK(ctrl.history_tail().front() == 6.0);
  CHECK(ctrl.history_tail().back() == 9.0);
}

TEST_CASE("save and load preserve pending run state") {
  RngState rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const double threshold = rng.uniform(-5.0, 5.0);
    const int m = 2 + static_cast<int>(rng.uniform_int(10));
    CurriculumController a(threshold, m);
    const int pre = static_cast<int>(rng.uniform_int(40));
    for (int i = 0; i < pre; ++i) a.record_actor_fit(threshold + rng.normal());

    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    a.save(ss);
    CurriculumController b(0.0, 1);  // constructor values are overwritten
    b.load(ss);
    REQUIRE(a == b);

    // A partially filled below-threshold run must survive the round trip:
    // both copies see the same subsequent values and fire together.
    for (int i = 0; i < 60; ++i) {
      const double v = threshold + rng.normal() * 0.5 - 0.4;
      const bool fa = a.record_actor_fit(v);
      const bool fb = b.record_actor_fit(v);
      REQUIRE(fa == fb);
      REQUIRE(a.phase() == b.phase());
    }
    REQUIRE(a.switch_iteration() == b.switch_iteration());
    REQUIRE(a == b);
  }
}

TEST_CASE("load rejects truncated streams") {
  CurriculumController a(-50.0, 20);
  for (int i = 0; i < 5; ++i) a.record_actor_fit(-60.0);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  a.save(ss);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 4);
  std::stringstream cut(bytes, std::ios::in | std::ios::binary);
  CurriculumController b(0.0, 1);
  CHECK_THROWS_AS(b.load(cut), ConfigError);
}
