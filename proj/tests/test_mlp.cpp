#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rcrl/mlp.hpp"

using namespace rcrl;

namespace {

// Straight-line re-evaluation with no shared code: two ReLU layers, linear out.
Vec naive_forward(const Mlp& p, const Vec& x) {
  Vec h1 = p.w1 * x + p.b1;
  for (int i = 0; i < h1.size(); ++i) h1[i] = h1[i] > 0.0 ? h1[i] : 0.0;
  Vec h2 = p.w2 * h1 + p.b2;
  for (int i = 0; i < h2.size(); ++i) h2[i] = h2[i] > 0.0 ? h2[i] : 0.0;
  return p.w3 * h2 + p.b3;
}

double scalar_loss(const Mlp& p, const Mat& input, const Vec& coeff) {
  Mat out;
  mlp_forward(p, input, out);
  double L = 0.0;
  for (int c = 0; c < out.cols(); ++c) L += coeff.dot(out.col(c));
  return L;
}

// Central finite difference of scalar_loss wrt one parameter entry, which is
// perturbed in place and restored.
double fd(Mlp& p, double* entry, const Mat& input, const Vec& coeff, double h = 1e-6) {
  const double orig = *entry;
  *entry = orig + h;
  const double up = scalar_loss(p, input, coeff);
  *entry = orig - h;
  const double dn = scalar_loss(p, input, coeff);
  *entry = orig;
  return (up - dn) / (2.0 * h);
}

}  // namespace

TEST_CASE("forward matches a naive re-evaluation") {
  RngState rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 1 + (int)rng.uniform_int(6);
    const int out = 1 + (int)rng.uniform_int(4);
    const int hid = 2 + (int)rng.uniform_int(10);
    Mlp p = Mlp::create(in, out, rng, OutputHead::Identity, hid);
    Vec x(in);
    for (int i = 0; i < in; ++i) x[i] = rng.normal();
    const Vec got = mlp_forward(p, x);
    const Vec want = naive_forward(p, x);
    REQUIRE(got.size() == want.size());
    for (int i = 0; i < out; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("batched forward equals per-column forward") {
  RngState rng(7);
  Mlp p = Mlp::create(4, 3, rng, OutputHead::Identity, 16);
  Mat input(4, 9);
  for (int i = 0; i < input.size(); ++i) input.data()[i] = rng.normal();
  Mat out;
  mlp_forward(p, input, out);
  REQUIRE(out.rows() == 3);
  REQUIRE(out.cols() == 9);
  for (int c = 0; c < 9; ++c) {
    const Vec one = mlp_forward(p, Vec(input.col(c)));
    for (int i = 0; i < 3; ++i) CHECK(out(i, c) == doctest::Approx(one[i]).epsilon(1e-14));
  }
}

TEST_CASE("backward gradients match central finite differences") {
  RngState rng(31);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int in = 1 + (int)rng.uniform_int(4);
    const int out = 1 + (int)rng.uniform_int(3);
    const int hid = 3 + (int)rng.uniform_int(6);
    const int B = 1 + (int)rng.uniform_int(5);
    Mlp p = Mlp::create(in, out, rng, OutputHead::Identity, hid);
    Mat input(in, B);
    for (int i = 0; i < input.size(); ++i) input.data()[i] = rng.normal();
    Vec coeff(out);
    for (int i = 0; i < out; ++i) coeff[i] = rng.normal();

    MlpWorkspace ws;
    Mat fout;
    mlp_forward(p, input, fout, &ws);
    Mat d_out(out, B);
    d_out.colwise() = coeff;
    MlpGrads g = MlpGrads::zeros_like(p);
    Mat d_input;
    mlp_backward(p, ws, d_out, &g, &d_input);

    // Spot-check a handful of entries per net against finite differences.
    auto probe = [&](double* param_entry, double analytic) {
      const double numeric = fd(p, param_entry, input, coeff);
      CHECK(analytic == doctest::Approx(numeric).epsilon(1e-4).scale(1.0));
      ++checked;
    };
    probe(&p.w1(0, 0), g.w1(0, 0));
    probe(&p.b1[hid / 2], g.b1[hid / 2]);
    probe(&p.w2(hid / 2, 0), g.w2(hid / 2, 0));
    probe(&p.b2[0], g.b2[0]);
    probe(&p.w3(out - 1, hid - 1), g.w3(out - 1, hid - 1));
    probe(&p.b3[out - 1], g.b3[out - 1]);

    // d_input via finite differences on one input entry.
    {
      Mat shifted = input;
      const double h = 1e-6;
      shifted(0, 0) += h;
      const double up = scalar_loss(p, shifted, coeff);
      shifted(0, 0) -= 2 * h;
      const double dn = scalar_loss(p, shifted, coeff);
      const double numeric = (up - dn) / (2 * h);
      CHECK(d_input(0, 0) == doctest::Approx(numeric).epsilon(1e-4).scale(1.0));
    }
  }
  CHECK(checked == 600);
}

TEST_CASE("init bounds follow fan-in") {
  RngState rng(5);
  Mlp p = Mlp::create(9, 2, rng, OutputHead::Identity, 64);
  const double lim1 = 1.0 / std::sqrt(9.0);
  const double lim2 = 1.0 / std::sqrt(64.0);
  CHECK(p.w1.cwiseAbs().maxCoeff() <= lim1);
  CHECK(p.b1.cwiseAbs().maxCoeff() <= lim1);
  CHECK(p.w2.cwiseAbs().maxCoeff() <= lim2);
  CHECK(p.w3.cwiseAbs().maxCoeff() <= lim2);
  // Bounds are actually reached somewhere near them.
  CHECK(p.w1.cwiseAbs().maxCoeff() > 0.9 * lim1);
}

TEST_CASE("adam single step matches hand-computed bias-corrected update") {
  RngState rng(13);
  Mlp p = Mlp::create(2, 1, rng, OutputHead::Identity, 3);
  Mlp before = p;
  MlpGrads g = MlpGrads::zeros_like(p);
  g.w1.setConstant(0.5);
  g.b1.setConstant(-0.25);
  g.w2.setConstant(1.0);
  g.b2.setConstant(0.0);
  g.w3.setConstant(2.0);
  g.b3.setConstant(-1.0);
  AdamState ad = AdamState::create(p, 1e-3);
  ad.update(p, g);
  // First step: m_hat = grad, v_hat = grad^2, delta = lr*g/(|g|+eps).
  auto expect = [&](double before_v, double after_v, double grad) {
    if (grad == 0.0) {
      CHECK(after_v == before_v);
      return;
    }
    const double delta = 1e-3 * grad / (std::abs(grad) + 1e-8);
    CHECK(after_v == doctest::Approx(before_v - delta).epsilon(1e-9));
  };
  expect(before.w1(0, 0), p.w1(0, 0), 0.5);
  expect(before.b1[1], p.b1[1], -0.25);
  expect(before.w2(2, 0), p.w2(2, 0), 1.0);
  expect(before.b2[0], p.b2[0], 0.0);
  expect(before.w3(0, 2), p.w3(0, 2), 2.0);
  expect(before.b3[0], p.b3[0], -1.0);
}

TEST_CASE("adam drives a quadratic to its minimum") {
  // Fit the single w1 entry of a degenerate 1-1-... net is overkill; instead
  // check ScalarAdam on f(x) = (x-3)^2.
  ScalarAdam ad;
  ad.lr = 0.05;
  double x = -4.0;
  for (int i = 0; i < 2000; ++i) x = ad.update(x, 2.0 * (x - 3.0));
  CHECK(x == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("polyak update blends parameters") {
  RngState rng(17);
  Mlp target = Mlp::create(3, 2, rng, OutputHead::Identity, 4);
  Mlp online = Mlp::create(3, 2, rng, OutputHead::Identity, 4);
  const double want = 0.9 * target.w2(1, 2) + 0.1 * online.w2(1, 2);
  const double want_b = 0.9 * target.b3[0] + 0.1 * online.b3[0];
  polyak_update(target, online, 0.9);
  CHECK(target.w2(1, 2) == doctest::Approx(want).epsilon(1e-15));
  CHECK(target.b3[0] == doctest::Approx(want_b).epsilon(1e-15));
}

TEST_CASE("net and adam state round-trip through save/load") {
  RngState rng(23);
  Mlp p = Mlp::create(5, 3, rng, OutputHead::GaussianMeanLogStd, 8);
  AdamState ad = AdamState::create(p, 2e-4);
  MlpGrads g = MlpGrads::zeros_like(p);
  g.w1.setRandom();
  g.w2.setRandom();
  g.w3.setRandom();
  g.b1.setRandom();
  g.b2.setRandom();
  g.b3.setRandom();
  ad.update(p, g);
  ad.update(p, g);

  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  save_mlp(ss, p);
  save_adam(ss, ad);
  const Mlp q = load_mlp(ss);
  const AdamState bd = load_adam(ss, q);

  CHECK(q.head == OutputHead::GaussianMeanLogStd);
  CHECK((q.w1 - p.w1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((q.w3 - p.w3).cwiseAbs().maxCoeff() == 0.0);
  CHECK((q.b2 - p.b2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(bd.step_count == 2);
  CHECK(bd.lr == ad.lr);
  CHECK((bd.m.w2 - ad.m.w2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bd.v.b3 - ad.v.b3).cwiseAbs().maxCoeff() == 0.0);

  // Identical further updates from the restored state.
  Mlp p2 = q;
  AdamState ad2 = bd;
  AdamState ad1 = ad;
  Mlp p1 = p;
  ad1.update(p1, g);
  ad2.update(p2, g);
  CHECK((p1.w1 - p2.w1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated net stream is rejected") {
  RngState rng(29);
  Mlp p = Mlp::create(3, 2, rng, OutputHead::Identity, 4);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  save_mlp(ss, p);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() / 2);
  std::istringstream cut(bytes, std::ios::binary);
  CHECK_THROWS_AS(load_mlp(cut), ConfigError);
}
