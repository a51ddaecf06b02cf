#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "rcrl/rng.hpp"

namespace rcrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;  // one sample per column

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How the final linear layer is to be interpreted by policy code. Purely a
// tag; forward() always emits the raw linear output.
enum class OutputHead : uint32_t { Identity = 0, GaussianMeanLogStd = 1 };

// Fully connected net with two ReLU hidden layers. Hidden width defaults to
// 256 but is a parameter so tests can use small nets.
struct Mlp {
  Mat w1, w2, w3;
  Vec b1, b2, b3;
  OutputHead head = OutputHead::Identity;

  int in_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  int out_dim() const { return static_cast<int>(w3.rows()); }
  long param_count() const;

  bool same_shape(const Mlp& o) const;
  bool all_finite() const;

  // Uniform fan-in init, U[-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
  static Mlp create(int in, int out, RngState& rng, OutputHead head = OutputHead::Identity,
                    int hidden = 256);
};

// Parameter-shaped gradient (or moment) storage.
struct MlpGrads {
  Mat w1, w2, w3;
  Vec b1, b2, b3;

  static MlpGrads zeros_like(const Mlp& p);
  void set_zero();
  bool all_finite() const;
};

// Activations retained by forward() for the matching backward() call.
struct MlpWorkspace {
  Mat input;  // in x B
  Mat h1, h2; // post-ReLU
  Mat out;    // raw linear output
};

// Batched forward pass; ws may be null when no backward pass follows.
void mlp_forward(const Mlp& p, const Mat& input, Mat& out, MlpWorkspace* ws = nullptr);
Vec mlp_forward(const Mlp& p, const Vec& input);

// Reverse pass for the forward recorded in ws. d_out is dL/d(output).
// Either of grads / d_input may be null when not needed.
void mlp_backward(const Mlp& p, const MlpWorkspace& ws, const Mat& d_out, MlpGrads* grads,
                  Mat* d_input = nullptr);

// Adam with bias correction. Moments live here; one instance per net.
struct AdamState {
  double lr = 3.0e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  MlpGrads m, v;

  static AdamState create(const Mlp& p, double lr);
  void update(Mlp& p, const MlpGrads& g);
};

// Scalar variant used for the SAC temperature.
struct ScalarAdam {
  double lr = 3.0e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  double m = 0.0, v = 0.0;

  double update(double value, double grad);
};

// Elementwise target <- tau*target + (1-tau)*online.
void polyak_update(Mlp& target, const Mlp& online, double tau);

// Flat binary net checkpoint: little-endian u32 header (dim count, dims,
// head tag) then the layer-ordered doubles w1,b1,w2,b2,w3,b3 with matrices
// in column-major storage order.
void save_mlp(std::ostream& os, const Mlp& p);
Mlp load_mlp(std::istream& is);

void save_adam(std::ostream& os, const AdamState& a);
AdamState load_adam(std::istream& is, const Mlp& shape_ref);

}  // namespace rcrl
