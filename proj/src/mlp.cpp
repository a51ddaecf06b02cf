#include "rcrl/mlp.hpp"

#include <cmath>

namespace rcrl {

namespace {

void init_layer(Mat& w, Vec& b, int rows, int cols, RngState& rng) {
  w.resize(rows, cols);
  b.resize(rows);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  // Column-major element order so the draw sequence is pinned.
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) w(r, c) = rng.uniform(-bound, bound);
  for (int r = 0; r < rows; ++r) b(r) = rng.uniform(-bound, bound);
}

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  if (!is) throw ConfigError("truncated checkpoint (u32)");
  return v;
}

void write_doubles(std::ostream& os, const double* p, size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& is, double* p, size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw ConfigError("truncated checkpoint (doubles)");
}

}  // namespace

long Mlp::param_count() const {
  return w1.size() + w2.size() + w3.size() + b1.size() + b2.size() + b3.size();
}

bool Mlp::same_shape(const Mlp& o) const {
  return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && w2.rows() == o.w2.rows() &&
         w2.cols() == o.w2.cols() && w3.rows() == o.w3.rows() && w3.cols() == o.w3.cols();
}

bool Mlp::all_finite() const {
  return w1.allFinite() && w2.allFinite() && w3.allFinite() && b1.allFinite() && b2.allFinite() &&
         b3.allFinite();
}

Mlp Mlp::create(int in, int out, RngState& rng, OutputHead head, int hidden) {
  if (in <= 0 || out <= 0 || hidden <= 0) throw ConfigError("mlp dims must be positive");
  Mlp p;
  p.head = head;
  init_layer(p.w1, p.b1, hidden, in, rng);
  init_layer(p.w2, p.b2, hidden, hidden, rng);
  init_layer(p.w3, p.b3, out, hidden, rng);
  return p;
}

MlpGrads MlpGrads::zeros_like(const Mlp& p) {
  MlpGrads g;
  g.w1 = Mat::Zero(p.w1.rows(), p.w1.cols());
  g.w2 = Mat::Zero(p.w2.rows(), p.w2.cols());
  g.w3 = Mat::Zero(p.w3.rows(), p.w3.cols());
  g.b1 = Vec::Zero(p.b1.size());
  g.b2 = Vec::Zero(p.b2.size());
  g.b3 = Vec::Zero(p.b3.size());
  return g;
}

void MlpGrads::set_zero() {
  w1.setZero();
  w2.setZero();
  w3.setZero();
  b1.setZero();
  b2.setZero();
  b3.setZero();
}

bool MlpGrads::all_finite() const {
  return w1.allFinite() && w2.allFinite() && w3.allFinite() && b1.allFinite() && b2.allFinite() &&
         b3.allFinite();
}

void mlp_forward(const Mlp& p, const Mat& input, Mat& out, MlpWorkspace* ws) {
  if (input.rows() != p.in_dim()) throw ConfigError("mlp_forward: input dim mismatch");
  const auto B = input.cols();
  Mat h1 = ((p.w1 * input).colwise() + p.b1).cwiseMax(0.0);
  Mat h2 = ((p.w2 * h1).colwise() + p.b2).cwiseMax(0.0);
  out.resize(p.out_dim(), B);
  out.noalias() = p.w3 * h2;
  out.colwise() += p.b3;
  if (ws) {
    ws->input = input;
    ws->h1 = std::move(h1);
    ws->h2 = std::move(h2);
    ws->out = out;
  }
}

Vec mlp_forward(const Mlp& p, const Vec& input) {
  Mat out;
  mlp_forward(p, input, out);
  return out.col(0);
}

void mlp_backward(const Mlp& p, const MlpWorkspace& ws, const Mat& d_out, MlpGrads* grads,
                  Mat* d_input) {
  if (!d_out.allFinite()) throw NumericalError("mlp_backward: non-finite upstream gradient");
  if (d_out.rows() != p.out_dim() || d_out.cols() != ws.h2.cols())
    throw ConfigError("mlp_backward: upstream shape mismatch");

  // ReLU subgradient taken as 0 at exactly 0 (h stores post-activation).
  Mat dh2 = p.w3.transpose() * d_out;
  Mat dz2 = (ws.h2.array() > 0.0).select(dh2, 0.0);
  Mat dh1 = p.w2.transpose() * dz2;
  Mat dz1 = (ws.h1.array() > 0.0).select(dh1, 0.0);

  if (grads) {
    grads->w3.noalias() = d_out * ws.h2.transpose();
    grads->b3 = d_out.rowwise().sum();
    grads->w2.noalias() = dz2 * ws.h1.transpose();
    grads->b2 = dz2.rowwise().sum();
    grads->w1.noalias() = dz1 * ws.input.transpose();
    grads->b1 = dz1.rowwise().sum();
  }
  if (d_input) {
    d_input->resize(p.in_dim(), d_out.cols());
    d_input->noalias() = p.w1.transpose() * dz1;
  }
}

AdamState AdamState::create(const Mlp& p, double lr) {
  AdamState s;
  s.lr = lr;
  s.m = MlpGrads::zeros_like(p);
  s.v = MlpGrads::zeros_like(p);
  return s;
}

namespace {

void adam_piece(Eigen::Ref<Mat> p, Eigen::Ref<Mat> m, Eigen::Ref<Mat> v, const Mat& g, double lr,
                double b1, double b2, double eps, double bc1, double bc2) {
  m = b1 * m + (1.0 - b1) * g;
  v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace

void AdamState::update(Mlp& p, const MlpGrads& g) {
  if (!g.all_finite()) throw NumericalError("adam: non-finite gradient");
  step_count += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  adam_piece(p.w1, m.w1, v.w1, g.w1, lr, beta1, beta2, eps, bc1, bc2);
  adam_piece(p.w2, m.w2, v.w2, g.w2, lr, beta1, beta2, eps, bc1, bc2);
  adam_piece(p.w3, m.w3, v.w3, g.w3, lr, beta1, beta2, eps, bc1, bc2);
  adam_piece(p.b1, m.b1, v.b1, g.b1, lr, beta1, beta2, eps, bc1, bc2);
  adam_piece(p.b2, m.b2, v.b2, g.b2, lr, beta1, beta2, eps, bc1, bc2);
  adam_piece(p.b3, m.b3, v.b3, g.b3, lr, beta1, beta2, eps, bc1, bc2);
  if (!p.all_finite()) throw NumericalError("adam: parameters diverged");
}

double ScalarAdam::update(double value, double grad) {
  if (!std::isfinite(grad)) throw NumericalError("scalar adam: non-finite gradient");
  step_count += 1;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(step_count)));
  const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(step_count)));
  return value - lr * mhat / (std::sqrt(vhat) + eps);
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_shape(online)) throw ConfigError("polyak_update: shape mismatch");
  target.w1 = tau * target.w1 + (1.0 - tau) * online.w1;
  target.w2 = tau * target.w2 + (1.0 - tau) * online.w2;
  target.w3 = tau * target.w3 + (1.0 - tau) * online.w3;
  target.b1 = tau * target.b1 + (1.0 - tau) * online.b1;
  target.b2 = tau * target.b2 + (1.0 - tau) * online.b2;
  target.b3 = tau * target.b3 + (1.0 - tau) * online.b3;
}

void save_mlp(std::ostream& os, const Mlp& p) {
  write_u32(os, 4);  // dim count
  write_u32(os, static_cast<uint32_t>(p.in_dim()));
  write_u32(os, static_cast<uint32_t>(p.hidden_dim()));
  write_u32(os, static_cast<uint32_t>(p.hidden_dim()));
  write_u32(os, static_cast<uint32_t>(p.out_dim()));
  write_u32(os, static_cast<uint32_t>(p.head));
  write_doubles(os, p.w1.data(), p.w1.size());
  write_doubles(os, p.b1.data(), p.b1.size());
  write_doubles(os, p.w2.data(), p.w2.size());
  write_doubles(os, p.b2.data(), p.b2.size());
  write_doubles(os, p.w3.data(), p.w3.size());
  write_doubles(os, p.b3.data(), p.b3.size());
}

Mlp load_mlp(std::istream& is) {
  const uint32_t nd = read_u32(is);
  if (nd != 4) throw ConfigError("net checkpoint: expected 4 dims");
  const int in = static_cast<int>(read_u32(is));
  const int h1 = static_cast<int>(read_u32(is));
  const int h2 = static_cast<int>(read_u32(is));
  const int out = static_cast<int>(read_u32(is));
  if (h1 != h2) throw ConfigError("net checkpoint: hidden dims differ");
  const uint32_t head = read_u32(is);
  if (head > 1) throw ConfigError("net checkpoint: unknown head tag");
  Mlp p;
  p.head = static_cast<OutputHead>(head);
  p.w1.resize(h1, in);
  p.b1.resize(h1);
  p.w2.resize(h2, h1);
  p.b2.resize(h2);
  p.w3.resize(out, h2);
  p.b3.resize(out);
  read_doubles(is, p.w1.data(), p.w1.size());
  read_doubles(is, p.b1.data(), p.b1.size());
  read_doubles(is, p.w2.data(), p.w2.size());
  read_doubles(is, p.b2.data(), p.b2.size());
  read_doubles(is, p.w3.data(), p.w3.size());
  read_doubles(is, p.b3.data(), p.b3.size());
  return p;
}

namespace {

void save_grads(std::ostream& os, const MlpGrads& g) {
  write_doubles(os, g.w1.data(), g.w1.size());
  write_doubles(os, g.b1.data(), g.b1.size());
  write_doubles(os, g.w2.data(), g.w2.size());
  write_doubles(os, g.b2.data(), g.b2.size());
  write_doubles(os, g.w3.data(), g.w3.size());
  write_doubles(os, g.b3.data(), g.b3.size());
}

void load_grads(std::istream& is, MlpGrads& g) {
  read_doubles(is, g.w1.data(), g.w1.size());
  read_doubles(is, g.b1.data(), g.b1.size());
  read_doubles(is, g.w2.data(), g.w2.size());
  read_doubles(is, g.b2.data(), g.b2.size());
  read_doubles(is, g.w3.data(), g.w3.size());
  read_doubles(is, g.b3.data(), g.b3.size());
}

}  // namespace

void save_adam(std::ostream& os, const AdamState& a) {
  write_doubles(os, &a.lr, 1);
  write_doubles(os, &a.beta1, 1);
  write_doubles(os, &a.beta2, 1);
  write_doubles(os, &a.eps, 1);
  const double steps = static_cast<double>(a.step_count);
  write_doubles(os, &steps, 1);
  save_grads(os, a.m);
  save_grads(os, a.v);
}

AdamState load_adam(std::istream& is, const Mlp& shape_ref) {
  AdamState a = AdamState::create(shape_ref, 3.0e-4);
  double steps = 0;
  read_doubles(is, &a.lr, 1);
  read_doubles(is, &a.beta1, 1);
  read_doubles(is, &a.beta2, 1);
  read_doubles(is, &a.eps, 1);
  read_doubles(is, &steps, 1);
  a.step_count = static_cast<long>(steps);
  load_grads(is, a.m);
  load_grads(is, a.v);
  return a;
}

}  // namespace rcrl
