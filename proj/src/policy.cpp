#include "rcrl/policy.hpp"

#include <cmath>

namespace rcrl {

namespace {
const double kSquashBound = std::nextafter(1.0, 0.0);
const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);
}  // namespace

double squash(double x) {
  const double t = std::tanh(x);
  if (t > kSquashBound) return kSquashBound;
  if (t < -kSquashBound) return -kSquashBound;
  return t;
}

Mat squash(const Mat& x) {
  return x.unaryExpr([](double v) { return squash(v); });
}

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_one_minus_tanh_sq(double x) {
  return 2.0 * (std::log(2.0) - x - stable_softplus(-2.0 * x));
}

GaussianPolicyOutput policy_sample(const Mlp& params, const Vec& state, bool deterministic,
                                   RngState& rng) {
  if (params.head != OutputHead::GaussianMeanLogStd)
    throw ConfigError("policy_sample: net lacks Gaussian head");
  const Vec out = mlp_forward(params, state);
  const int d = params.out_dim() / 2;
  GaussianPolicyOutput r;
  r.mean = out.head(d);
  r.log_std = out.tail(d).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  r.pre_squash.resize(d);
  r.action.resize(d);
  r.log_prob = 0.0;
  for (int i = 0; i < d; ++i) {
    const double eps = deterministic ? 0.0 : rng.normal();
    const double sd = std::exp(r.log_std(i));
    const double pre = r.mean(i) + sd * eps;
    r.pre_squash(i) = pre;
    r.action(i) = squash(pre);
    r.log_prob += -kHalfLog2Pi - r.log_std(i) - 0.5 * eps * eps - log_one_minus_tanh_sq(pre);
  }
  return r;
}

GaussianBatchSample gaussian_sample_batch(const Mat& net_out, const Mat& eps) {
  const int d = static_cast<int>(net_out.rows()) / 2;
  const auto B = net_out.cols();
  GaussianBatchSample s;
  s.mean = net_out.topRows(d);
  const Mat ls_raw = net_out.bottomRows(d);
  s.ls_pass = ((ls_raw.array() > kLogStdMin) && (ls_raw.array() < kLogStdMax)).cast<double>();
  s.log_std = ls_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.std_eps = s.log_std.array().exp() * eps.array();
  s.pre = s.mean + s.std_eps;
  s.action = squash(s.pre);
  s.log_prob.resize(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    double lp = 0.0;
    for (int i = 0; i < d; ++i) {
      lp += -kHalfLog2Pi - s.log_std(i, j) - 0.5 * eps(i, j) * eps(i, j) -
            log_one_minus_tanh_sq(s.pre(i, j));
    }
    s.log_prob(j) = lp;
  }
  return s;
}

Mat dtanh_from_action(const Mat& action) { return 1.0 - action.array().square(); }

}  // namespace rcrl
