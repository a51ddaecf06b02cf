#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rcrl/rng.hpp"

using namespace rcrl;

TEST_CASE("uniform value pinned against the raw engine output") {
  // uniform() is the top 53 bits of the engine scaled by 2^-53.
  RngState r(42);
  std::mt19937_64 eng(42);
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = eng();
    CHECK(r.uniform() == (double)(x >> 11) * 0x1.0p-53);
  }
}

TEST_CASE("uniform range and mean") {
  RngState r(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal moments") {
  RngState r(123);
  double s1 = 0.0, s2 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("normal consumes exactly two uniforms per draw") {
  RngState a(9), b(9);
  (void)a.normal();
  (void)b.uniform();
  (void)b.uniform();
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("normal matches Box-Muller recomputation") {
  RngState a(5), b(5);
  for (int i = 0; i < 50; ++i) {
    const double u1 = 1.0 - b.uniform();
    const double u2 = b.uniform();
    const double want = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    CHECK(a.normal() == want);
  }
}

TEST_CASE("uniform_int bounds and exhaustive small-range coverage") {
  RngState r(11);
  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 50000; ++i) {
    const uint64_t v = r.uniform_int(5);
    REQUIRE(v < 5);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 9000);  // ~10000 expected each
}

TEST_CASE("derive gives decorrelated but reproducible streams") {
  RngState a = RngState::derive(42, 1);
  RngState a2 = RngState::derive(42, 1);
  RngState b = RngState::derive(42, 2);
  CHECK(a.uniform() == a2.uniform());
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (RngState::derive(42, 1).uniform_int(1000) == RngState::derive(43, 1).uniform_int(1000))
      ++same;
  CHECK(a.uniform() != b.uniform());
  CHECK(same < 5);
}

TEST_CASE("save/load round-trips mid-stream") {
  RngState r(99);
  for (int i = 0; i < 37; ++i) (void)r.normal();
  std::stringstream ss;
  r.save(ss);
  RngState q(0);
  q.load(ss);
  for (int i = 0; i < 100; ++i) CHECK(r.uniform() == q.uniform());
}
