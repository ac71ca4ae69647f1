#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kmoc/rng.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

// Channel-major (c, h, w) buffer, double precision throughout so gradient
// checks run at full accuracy.
struct Tensor3 {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, 0.0) {}

  double& at(int ci, int hi, int wi) { return v[(static_cast<size_t>(ci) * h + hi) * w + wi]; }
  double at(int ci, int hi, int wi) const {
    return v[(static_cast<size_t>(ci) * h + hi) * w + wi];
  }
  size_t size() const { return v.size(); }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// One learnable tensor. The effective value used in the forward pass is
// gamma * v; gradients are reported with respect to the raw v. gamma = 1
// gives the plain parameterization.
struct ParamTensor {
  std::string name;
  double gamma = 1.0;
  std::vector<double> v;
  std::vector<double> g;

  void init(const std::string& nm, size_t len, double gam = 1.0) {
    name = nm;
    gamma = gam;
    v.assign(len, 0.0);
    g.assign(len, 0.0);
  }
};

// 2D convolution with zero padding, stride 1, im2col + small GEMM. A 1D
// convolution over the line axis is the h = 1 special case.
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, int in_c, int out_c, int kh, int kw, int ph, int pw);

  Tensor3 forward(const Tensor3& x);
  // Accumulates parameter gradients, returns the gradient w.r.t. the input.
  Tensor3 backward(const Tensor3& gout);

  int in_c() const { return in_c_; }
  int out_c() const { return out_c_; }
  int fan_in() const { return in_c_ * kh_ * kw_; }

  ParamTensor w, b;

 private:
  int in_c_ = 0, out_c_ = 0, kh_ = 0, kw_ = 0, ph_ = 0, pw_ = 0;
  int xh_ = 0, xw_ = 0, oh_ = 0, ow_ = 0;
  std::vector<double> col_;   // (in_c*kh*kw) x (oh*ow)
  std::vector<double> gcol_;  // same shape, scratch for backward
  std::vector<double> weff_;  // gamma * w.v, refreshed each forward
};

// Per-channel PReLU, y = x > 0 ? x : a_c * x.
class PReLU {
 public:
  PReLU() = default;
  PReLU(const std::string& name, int channels);

  Tensor3 forward(const Tensor3& x);
  Tensor3 backward(const Tensor3& gout);

  ParamTensor a;

 private:
  Tensor3 x_;
};

// 2x2 max pooling, stride 2; ties resolve to the first element in scan order.
class MaxPool2 {
 public:
  Tensor3 forward(const Tensor3& x);
  Tensor3 backward(const Tensor3& gout);

 private:
  int c_ = 0, h_ = 0, w_ = 0;
  std::vector<uint32_t> arg_;
};

// Fully connected layer on flattened (len, 1, 1) tensors.
class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, int in_len, int out_len);

  Tensor3 forward(const Tensor3& x);
  Tensor3 backward(const Tensor3& gout);

  int in_len() const { return in_; }

  ParamTensor w, b;

 private:
  int in_ = 0, out_ = 0;
  std::vector<double> x_;
  std::vector<double> weff_;
};

// Inverted dropout: active only in train mode, kept units scaled by 1/(1-p).
class Dropout {
 public:
  explicit Dropout(double p = 0.25) : p_(p) {}

  Tensor3 forward(const Tensor3& x, bool train, Rng* rng);
  Tensor3 backward(const Tensor3& gout);

 private:
  double p_;
  bool active_ = false;
  std::vector<uint8_t> keep_;
};

// Window regressor: 2 x w x n k-space window -> (theta, tx, ty).
// Topology: three shape-preserving 1x3 convolutions, one w x 3 collapse to n
// channels reshaped to an n x n map, a 3x3 convolution, 2x2 pooling and two
// dense layers, PReLU activations and dropout before the output layer.
class SismikNet {
 public:
  SismikNet() = default;

  // Plain parameterization, U(+-1/sqrt(fan_in)) weights and biases.
  static SismikNet make(int n, int w, uint64_t seed);
  // Scaled parameterization: raw weights N(0, raw_std^2), per-layer
  // gamma = he_std / raw_std, zero biases. Forward-equivalent to He init but
  // the optimizer traverses the full layer scale within its step budget.
  static SismikNet make_scaled(int n, int w, uint64_t seed, double raw_std);

  std::array<double, 3> forward(const Tensor3& window, bool train = false, Rng* drop_rng = nullptr);
  // Gradient of the given output cotangent; accumulates into parameter grads.
  void backward(const std::array<double, 3>& gout);

  std::vector<ParamTensor*> params();
  void zero_grad();
  void set_dropout(double p) { drop_ = Dropout(p); }
  int n() const { return n_; }
  int window_h() const { return w_; }

 private:
  int n_ = 0, w_ = 0;
  Conv2d c1_, c2_, c3_, c4_, c5_;
  PReLU a1_, a2_, a3_, a5_, ad_;
  MaxPool2 pool_;
  Dense d1_, d2_;
  Dropout drop_{0.25};
};

// Line-signal detector: 1 x n quality signal -> per-line logits.
// Three 1x3 convolutions (3, 6, 9 channels) with PReLU and a 1x1 head;
// 271 parameters at any n.
class DetectorNet {
 public:
  DetectorNet() = default;

  static DetectorNet make(int n, uint64_t seed);

  std::vector<double> forward(const std::vector<double>& signal);
  void backward(const std::vector<double>& glogits);

  std::vector<ParamTensor*> params();
  void zero_grad();
  int n() const { return n_; }

 private:
  int n_ = 0;
  Conv2d c1_, c2_, c3_, head_;
  PReLU a1_, a2_, a3_;
};

// Total parameter count over a parameter list.
size_t param_count(const std::vector<ParamTensor*>& params);

}  // namespace kmoc
