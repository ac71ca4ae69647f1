#include "kmoc/nets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmoc {

namespace {

void fill_uniform(std::vector<double>& v, Rng& rng, double bound) {
  for (double& x : v) x = rng.uniform(-bound, bound);
}

void fill_normal(std::vector<double>& v, Rng& rng, double std) {
  for (double& x : v) x = rng.normal() * std;
}

// Four-lane dot product with a fixed summation order.
double dot4(const double* a, const double* b, size_t len) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    a0 += a[i] * b[i];
    a1 += a[i + 1] * b[i + 1];
    a2 += a[i + 2] * b[i + 2];
    a3 += a[i + 3] * b[i + 3];
  }
  double acc = (a0 + a1) + (a2 + a3);
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

Conv2d::Conv2d(const std::string& name, int in_c, int out_c, int kh, int kw, int ph, int pw)
    : in_c_(in_c), out_c_(out_c), kh_(kh), kw_(kw), ph_(ph), pw_(pw) {
  w.init(name + ".w", static_cast<size_t>(out_c) * in_c * kh * kw);
  b.init(name + ".b", static_cast<size_t>(out_c));
}

Tensor3 Conv2d::forward(const Tensor3& x) {
  if (x.c != in_c_) throw std::invalid_argument(w.name + ": channel mismatch");
  bool fresh = x.h != xh_ || x.w != xw_;
  xh_ = x.h;
  xw_ = x.w;
  oh_ = x.h + 2 * ph_ - kh_ + 1;
  ow_ = x.w + 2 * pw_ - kw_ + 1;
  if (oh_ <= 0 || ow_ <= 0) throw std::invalid_argument(w.name + ": kernel larger than input");

  int K = in_c_ * kh_ * kw_;
  size_t P = static_cast<size_t>(oh_) * ow_;
  // Padding slots are never rewritten, so the zero fill survives reuse at a
  // fixed geometry.
  if (fresh || col_.size() != static_cast<size_t>(K) * P) col_.assign(static_cast<size_t>(K) * P, 0.0);
  for (int ci = 0; ci < in_c_; ++ci) {
    for (int khi = 0; khi < kh_; ++khi) {
      for (int kwi = 0; kwi < kw_; ++kwi) {
        int k = (ci * kh_ + khi) * kw_ + kwi;
        double* dst = col_.data() + static_cast<size_t>(k) * P;
        for (int oy = 0; oy < oh_; ++oy) {
          int iy = oy + khi - ph_;
          if (iy < 0 || iy >= xh_) continue;
          const double* src = x.v.data() + (static_cast<size_t>(ci) * xh_ + iy) * xw_;
          int ox_lo = std::max(0, pw_ - kwi);
          int ox_hi = std::min(ow_, xw_ + pw_ - kwi);
          double* drow = dst + static_cast<size_t>(oy) * ow_;
          for (int ox = ox_lo; ox < ox_hi; ++ox) drow[ox] = src[ox + kwi - pw_];
        }
      }
    }
  }

  weff_.resize(w.v.size());
  for (size_t i = 0; i < w.v.size(); ++i) weff_[i] = w.gamma * w.v[i];

  Tensor3 out(out_c_, oh_, ow_);
  for (int oc = 0; oc < out_c_; ++oc) {
    double* orow = out.v.data() + static_cast<size_t>(oc) * P;
    double bias = b.gamma * b.v[oc];
    for (size_t p = 0; p < P; ++p) orow[p] = bias;
    const double* wrow = weff_.data() + static_cast<size_t>(oc) * K;
    for (int k = 0; k < K; ++k) {
      double wk = wrow[k];
      if (wk == 0.0) continue;
      const double* crow = col_.data() + static_cast<size_t>(k) * P;
      for (size_t p = 0; p < P; ++p) orow[p] += wk * crow[p];
    }
  }
  return out;
}

Tensor3 Conv2d::backward(const Tensor3& gout) {
  int K = in_c_ * kh_ * kw_;
  size_t P = static_cast<size_t>(oh_) * ow_;

  for (int oc = 0; oc < out_c_; ++oc) {
    const double* grow = gout.v.data() + static_cast<size_t>(oc) * P;
    double gb = 0.0;
    for (size_t p = 0; p < P; ++p) gb += grow[p];
    b.g[oc] += b.gamma * gb;
    double* gw = w.g.data() + static_cast<size_t>(oc) * K;
    for (int k = 0; k < K; ++k)
      gw[k] += w.gamma * dot4(grow, col_.data() + static_cast<size_t>(k) * P, P);
  }

  // gradient w.r.t. the column matrix, then scatter back to the input
  gcol_.resize(static_cast<size_t>(K) * P);
  for (int k = 0; k < K; ++k) {
    double* crow = gcol_.data() + static_cast<size_t>(k) * P;
    const double* g0 = gout.v.data();
    int oc = 0;
    if (out_c_ >= 4) {
      double w0 = weff_[static_cast<size_t>(0) * K + k];
      double w1 = weff_[static_cast<size_t>(1) * K + k];
      double w2 = weff_[static_cast<size_t>(2) * K + k];
      double w3 = weff_[static_cast<size_t>(3) * K + k];
      for (size_t p = 0; p < P; ++p)
        crow[p] = (w0 * g0[p] + w1 * g0[P + p]) + (w2 * g0[2 * P + p] + w3 * g0[3 * P + p]);
      oc = 4;
      for (; oc + 4 <= out_c_; oc += 4) {
        const double* ga = g0 + static_cast<size_t>(oc) * P;
        double v0 = weff_[static_cast<size_t>(oc + 0) * K + k];
        double v1 = weff_[static_cast<size_t>(oc + 1) * K + k];
        double v2 = weff_[static_cast<size_t>(oc + 2) * K + k];
        double v3 = weff_[static_cast<size_t>(oc + 3) * K + k];
        for (size_t p = 0; p < P; ++p)
          crow[p] += (v0 * ga[p] + v1 * ga[P + p]) + (v2 * ga[2 * P + p] + v3 * ga[3 * P + p]);
      }
    } else {
      double w0 = weff_[k];
      for (size_t p = 0; p < P; ++p) crow[p] = w0 * g0[p];
      oc = 1;
    }
    for (; oc < out_c_; ++oc) {
      const double* ga = g0 + static_cast<size_t>(oc) * P;
      double wk = weff_[static_cast<size_t>(oc) * K + k];
      for (size_t p = 0; p < P; ++p) crow[p] += wk * ga[p];
    }
  }

  Tensor3 gin(in_c_, xh_, xw_);
  for (int ci = 0; ci < in_c_; ++ci) {
    for (int khi = 0; khi < kh_; ++khi) {
      for (int kwi = 0; kwi < kw_; ++kwi) {
        int k = (ci * kh_ + khi) * kw_ + kwi;
        const double* src = gcol_.data() + static_cast<size_t>(k) * P;
        for (int oy = 0; oy < oh_; ++oy) {
          int iy = oy + khi - ph_;
          if (iy < 0 || iy >= xh_) continue;
          double* dst = gin.v.data() + (static_cast<size_t>(ci) * xh_ + iy) * xw_;
          int ox_lo = std::max(0, pw_ - kwi);
          int ox_hi = std::min(ow_, xw_ + pw_ - kwi);
          const double* srow = src + static_cast<size_t>(oy) * ow_;
          for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox + kwi - pw_] += srow[ox];
        }
      }
    }
  }
  return gin;
}

PReLU::PReLU(const std::string& name, int channels) {
  a.init(name + ".a", static_cast<size_t>(channels));
  std::fill(a.v.begin(), a.v.end(), 0.25);
}

Tensor3 PReLU::forward(const Tensor3& x) {
  x_ = x;
  Tensor3 out = x;
  size_t plane = static_cast<size_t>(x.h) * x.w;
  for (int ci = 0; ci < x.c; ++ci) {
    double ac = a.v[ci];
    double* row = out.v.data() + ci * plane;
    for (size_t i = 0; i < plane; ++i)
      if (row[i] <= 0.0) row[i] *= ac;
  }
  return out;
}

Tensor3 PReLU::backward(const Tensor3& gout) {
  Tensor3 gin(x_.c, x_.h, x_.w);
  size_t plane = static_cast<size_t>(x_.h) * x_.w;
  for (int ci = 0; ci < x_.c; ++ci) {
    double ac = a.v[ci];
    const double* xr = x_.v.data() + ci * plane;
    const double* gr = gout.v.data() + ci * plane;
    double* dr = gin.v.data() + ci * plane;
    double ga = 0.0;
    for (size_t i = 0; i < plane; ++i) {
      if (xr[i] > 0.0) {
        dr[i] = gr[i];
      } else {
        dr[i] = ac * gr[i];
        ga += gr[i] * xr[i];
      }
    }
    a.g[ci] += ga;
  }
  return gin;
}

Tensor3 MaxPool2::forward(const Tensor3& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0) throw std::invalid_argument("maxpool: odd input");
  c_ = x.c;
  h_ = x.h;
  w_ = x.w;
  Tensor3 out(x.c, x.h / 2, x.w / 2);
  arg_.assign(out.size(), 0);
  size_t o = 0;
  for (int ci = 0; ci < x.c; ++ci) {
    for (int oy = 0; oy < out.h; ++oy) {
      for (int ox = 0; ox < out.w; ++ox, ++o) {
        double best = -1e300;
        uint32_t bidx = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            size_t idx = (static_cast<size_t>(ci) * h_ + 2 * oy + dy) * w_ + 2 * ox + dx;
            if (x.v[idx] > best) {
              best = x.v[idx];
              bidx = static_cast<uint32_t>(idx);
            }
          }
        }
        out.v[o] = best;
        arg_[o] = bidx;
      }
    }
  }
  return out;
}

Tensor3 MaxPool2::backward(const Tensor3& gout) {
  Tensor3 gin(c_, h_, w_);
  for (size_t o = 0; o < gout.size(); ++o) gin.v[arg_[o]] += gout.v[o];
  return gin;
}

Dense::Dense(const std::string& name, int in_len, int out_len) : in_(in_len), out_(out_len) {
  w.init(name + ".w", static_cast<size_t>(out_len) * in_len);
  b.init(name + ".b", static_cast<size_t>(out_len));
}

Tensor3 Dense::forward(const Tensor3& x) {
  if (static_cast<int>(x.size()) != in_) throw std::invalid_argument(w.name + ": length mismatch");
  x_ = x.v;
  weff_.resize(w.v.size());
  for (size_t i = 0; i < w.v.size(); ++i) weff_[i] = w.gamma * w.v[i];
  Tensor3 out(out_, 1, 1);
  for (int oc = 0; oc < out_; ++oc)
    out.v[oc] = b.gamma * b.v[oc] + dot4(weff_.data() + static_cast<size_t>(oc) * in_, x_.data(),
                                         static_cast<size_t>(in_));
  return out;
}

Tensor3 Dense::backward(const Tensor3& gout) {
  Tensor3 gin(in_, 1, 1);
  for (int oc = 0; oc < out_; ++oc) {
    double go = gout.v[oc];
    b.g[oc] += b.gamma * go;
    double* gw = w.g.data() + static_cast<size_t>(oc) * in_;
    const double* wrow = weff_.data() + static_cast<size_t>(oc) * in_;
    for (int i = 0; i < in_; ++i) {
      gw[i] += w.gamma * go * x_[i];
      gin.v[i] += wrow[i] * go;
    }
  }
  return gin;
}

Tensor3 Dropout::forward(const Tensor3& x, bool train, Rng* rng) {
  active_ = train && p_ > 0.0;
  if (!active_) return x;
  if (rng == nullptr) throw std::invalid_argument("dropout: train mode needs an rng");
  keep_.resize(x.size());
  Tensor3 out = x;
  double scale = 1.0 / (1.0 - p_);
  for (size_t i = 0; i < x.size(); ++i) {
    keep_[i] = rng->uniform() >= p_ ? 1 : 0;
    out.v[i] = keep_[i] ? x.v[i] * scale : 0.0;
  }
  return out;
}

Tensor3 Dropout::backward(const Tensor3& gout) {
  if (!active_) return gout;
  Tensor3 gin = gout;
  double scale = 1.0 / (1.0 - p_);
  for (size_t i = 0; i < gin.size(); ++i) gin.v[i] = keep_[i] ? gin.v[i] * scale : 0.0;
  return gin;
}

SismikNet SismikNet::make(int n, int w, uint64_t seed) {
  if (w % 2 == 0) throw std::invalid_argument("sismik: window height must be odd");
  SismikNet net;
  net.n_ = n;
  net.w_ = w;
  net.c1_ = Conv2d("c1", 2, 8, 1, 3, 0, 1);
  net.c2_ = Conv2d("c2", 8, 16, 1, 3, 0, 1);
  net.c3_ = Conv2d("c3", 16, 16, 1, 3, 0, 1);
  net.c4_ = Conv2d("c4", 16, n, w, 3, 0, 1);
  net.c5_ = Conv2d("c5", 1, 1, 3, 3, 1, 1);
  net.a1_ = PReLU("a1", 8);
  net.a2_ = PReLU("a2", 16);
  net.a3_ = PReLU("a3", 16);
  net.a5_ = PReLU("a5", 1);
  net.ad_ = PReLU("ad", 256);
  net.d1_ = Dense("d1", (n / 2) * (n / 2), 256);
  net.d2_ = Dense("d2", 256, 3);

  Rng rng = derive_rng(seed, "sismik-init");
  for (Conv2d* c : {&net.c1_, &net.c2_, &net.c3_, &net.c4_, &net.c5_}) {
    double bound = 1.0 / std::sqrt(static_cast<double>(c->fan_in()));
    fill_uniform(c->w.v, rng, bound);
    fill_uniform(c->b.v, rng, bound);
  }
  for (Dense* d : {&net.d1_, &net.d2_}) {
    double bound = 1.0 / std::sqrt(static_cast<double>(d->in_len()));
    fill_uniform(d->w.v, rng, bound);
    fill_uniform(d->b.v, rng, bound);
  }
  return net;
}

SismikNet SismikNet::make_scaled(int n, int w, uint64_t seed, double raw_std) {
  SismikNet net = make(n, w, seed);
  Rng rng = derive_rng(seed, "sismik-scaled-init");
  const double a2 = 1.0 + 0.25 * 0.25;
  auto setup = [&](ParamTensor& wt, ParamTensor& bt, int fan, bool relu) {
    double he = relu ? std::sqrt(2.0 / a2 / fan) : std::sqrt(1.0 / fan);
    double gamma = he / raw_std;
    wt.gamma = gamma;
    bt.gamma = gamma;
    fill_normal(wt.v, rng, raw_std);
    std::fill(bt.v.begin(), bt.v.end(), 0.0);
  };
  setup(net.c1_.w, net.c1_.b, net.c1_.fan_in(), true);
  setup(net.c2_.w, net.c2_.b, net.c2_.fan_in(), true);
  setup(net.c3_.w, net.c3_.b, net.c3_.fan_in(), true);
  setup(net.c4_.w, net.c4_.b, net.c4_.fan_in(), true);
  setup(net.c5_.w, net.c5_.b, net.c5_.fan_in(), true);
  setup(net.d1_.w, net.d1_.b, net.d1_.in_len(), true);
  setup(net.d2_.w, net.d2_.b, net.d2_.in_len(), false);
  return net;
}

std::array<double, 3> SismikNet::forward(const Tensor3& window, bool train, Rng* drop_rng) {
  if (window.c != 2 || window.h != w_ || window.w != n_)
    throw std::invalid_argument("sismik: bad window shape");
  Tensor3 x = a1_.forward(c1_.forward(window));
  x = a2_.forward(c2_.forward(x));
  x = a3_.forward(c3_.forward(x));
  x = c4_.forward(x);  // n x 1 x n
  x.c = 1;
  x.h = n_;            // same buffer viewed as 1 x n x n
  x = a5_.forward(c5_.forward(x));
  x = pool_.forward(x);
  Tensor3 flat(static_cast<int>(x.size()), 1, 1);
  flat.v = std::move(x.v);
  flat = drop_.forward(ad_.forward(d1_.forward(flat)), train, drop_rng);
  Tensor3 out = d2_.forward(flat);
  return {out.v[0], out.v[1], out.v[2]};
}

void SismikNet::backward(const std::array<double, 3>& gout) {
  Tensor3 g(3, 1, 1);
  g.v = {gout[0], gout[1], gout[2]};
  g = d2_.backward(g);
  g = drop_.backward(g);
  g = ad_.backward(g);
  g = d1_.backward(g);
  int half = n_ / 2;
  Tensor3 gp(1, half, half);
  gp.v = std::move(g.v);
  g = pool_.backward(gp);
  g = c5_.backward(a5_.backward(g));
  g.c = n_;            // back to n x 1 x n for the collapse convolution
  g.h = 1;
  g = c4_.backward(g);
  g = c3_.backward(a3_.backward(g));
  g = c2_.backward(a2_.backward(g));
  c1_.backward(a1_.backward(g));
}

std::vector<ParamTensor*> SismikNet::params() {
  return {&c1_.w, &c1_.b, &a1_.a, &c2_.w, &c2_.b, &a2_.a, &c3_.w, &c3_.b, &a3_.a,
          &c4_.w, &c4_.b, &c5_.w, &c5_.b, &a5_.a, &d1_.w, &d1_.b, &ad_.a, &d2_.w, &d2_.b};
}

void SismikNet::zero_grad() {
  for (ParamTensor* p : params()) std::fill(p->g.begin(), p->g.end(), 0.0);
}

DetectorNet DetectorNet::make(int n, uint64_t seed) {
  DetectorNet net;
  net.n_ = n;
  net.c1_ = Conv2d("c1", 1, 3, 1, 3, 0, 1);
  net.c2_ = Conv2d("c2", 3, 6, 1, 3, 0, 1);
  net.c3_ = Conv2d("c3", 6, 9, 1, 3, 0, 1);
  net.head_ = Conv2d("head", 9, 1, 1, 1, 0, 0);
  net.a1_ = PReLU("a1", 3);
  net.a2_ = PReLU("a2", 6);
  net.a3_ = PReLU("a3", 9);
  Rng rng = derive_rng(seed, "detector-init");
  for (Conv2d* c : {&net.c1_, &net.c2_, &net.c3_, &net.head_}) {
    double bound = 1.0 / std::sqrt(static_cast<double>(c->fan_in()));
    fill_uniform(c->w.v, rng, bound);
    fill_uniform(c->b.v, rng, bound);
  }
  return net;
}

std::vector<double> DetectorNet::forward(const std::vector<double>& signal) {
  if (static_cast<int>(signal.size()) != n_)
    throw std::invalid_argument("detector: bad signal length");
  Tensor3 x(1, 1, n_);
  x.v = signal;
  x = a1_.forward(c1_.forward(x));
  x = a2_.forward(c2_.forward(x));
  x = a3_.forward(c3_.forward(x));
  x = head_.forward(x);
  return x.v;
}

void DetectorNet::backward(const std::vector<double>& glogits) {
  Tensor3 g(1, 1, n_);
  g.v = glogits;
  g = head_.backward(g);
  g = a3_.backward(g);
  g = c3_.backward(g);
  g = a2_.backward(g);
  g = c2_.backward(g);
  g = a1_.backward(g);
  c1_.backward(g);
}

std::vector<ParamTensor*> DetectorNet::params() {
  return {&c1_.w, &c1_.b, &a1_.a, &c2_.w, &c2_.b, &a2_.a,
          &c3_.w, &c3_.b, &a3_.a, &head_.w, &head_.b};
}

void DetectorNet::zero_grad() {
  for (ParamTensor* p : params()) std::fill(p->g.begin(), p->g.end(), 0.0);
}

size_t param_count(const std::vector<ParamTensor*>& params) {
  size_t total = 0;
  for (const ParamTensor* p : params) total += p->v.size();
  return total;
}

}  // namespace kmoc
