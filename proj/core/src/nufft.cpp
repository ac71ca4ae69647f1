#include "kmoc/nufft.hpp"

#include <cmath>

#include "kmoc/fft.hpp"

namespace kmoc {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

NufftPlan::NufftPlan(int n, int J, double oversample, double beta) : n_(n), J_(J) {
  m_ = static_cast<int>(std::lround(oversample * n));
  if ((m_ & (m_ - 1)) != 0) throw std::invalid_argument("NufftPlan: oversampled size not a power of two");
  double os = static_cast<double>(m_) / n_;
  beta_ = (beta > 0.0) ? beta
                       : kPi * std::sqrt((J / os) * (J / os) * (os - 0.5) * (os - 0.5) - 0.8);

  // Deapodizer from the DFT of the integer-sampled kernel: on-grid points then
  // see an exact discrete convolution, and the on-grid NUFFT matches the FFT
  // to machine precision.
  std::vector<cplx> kv(m_);
  for (int i = 0; i < m_; ++i) {
    double u = std::fabs(static_cast<double>(i - m_ / 2));
    kv[i] = cplx(kernel(u), 0.0);
  }
  auto sh = [this](std::vector<cplx>& a) {
    std::vector<cplx> b(m_);
    for (int i = 0; i < m_; ++i) b[(i + m_ / 2) % m_] = a[i];
    a.swap(b);
  };
  sh(kv);
  fft_1d(kv.data(), m_, true);
  sh(kv);
  deapod_.resize(n_);
  int off = (m_ - n_) / 2;
  for (int i = 0; i < n_; ++i) deapod_[i] = kv[off + i].real() * m_;
}

double NufftPlan::kernel(double u) const {
  double t = 1.0 - (2.0 * u / J_) * (2.0 * u / J_);
  if (t <= 0.0) return 0.0;
  return std::cyl_bessel_i(0, beta_ * std::sqrt(t));
}

NufftPlan::Weights NufftPlan::weights(const SamplePoints& pts) const {
  Weights pre;
  pre.J2 = J_ * J_;
  pre.npts = pts.size();
  pre.idx.resize(pre.npts * pre.J2);
  pre.w.resize(pre.npts * pre.J2);
  std::vector<double> wx(J_), wy(J_);
  std::vector<int> gx(J_), gy(J_);
  for (size_t p = 0; p < pre.npts; ++p) {
    double ux = pts.kx[p] * m_;
    double uy = pts.ky[p] * m_;
    int ix0 = static_cast<int>(std::ceil(ux - J_ / 2.0));
    int iy0 = static_cast<int>(std::ceil(uy - J_ / 2.0));
    for (int j = 0; j < J_; ++j) {
      wx[j] = kernel(ux - (ix0 + j));
      wy[j] = kernel(uy - (iy0 + j));
      gx[j] = ((ix0 + j + m_ / 2) % m_ + m_) % m_;
      gy[j] = ((iy0 + j + m_ / 2) % m_ + m_) % m_;
    }
    size_t base = p * pre.J2;
    for (int jy = 0; jy < J_; ++jy)
      for (int jx = 0; jx < J_; ++jx) {
        pre.idx[base + jy * J_ + jx] = static_cast<uint32_t>(gy[jy] * m_ + gx[jx]);
        pre.w[base + jy * J_ + jx] = wy[jy] * wx[jx];
      }
  }
  return pre;
}

std::vector<cplx> NufftPlan::forward(const CImage& img, const Weights& pre) const {
  if (img.n != n_) throw std::invalid_argument("nufft forward: size mismatch");
  CImage pad(m_);
  int off = (m_ - n_) / 2;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      pad.at(off + r, off + c) = img.at(r, c) / (deapod_[r] * deapod_[c]);
  CImage S = fft2c(pad);
  std::vector<cplx> out(pre.npts);
  for (size_t p = 0; p < pre.npts; ++p) {
    cplx acc(0.0, 0.0);
    size_t base = p * pre.J2;
    for (int j = 0; j < pre.J2; ++j) acc += S.v[pre.idx[base + j]] * pre.w[base + j];
    out[p] = acc;
  }
  return out;
}

CImage NufftPlan::adjoint(const std::vector<cplx>& samples, const Weights& pre) const {
  if (samples.size() != pre.npts) throw std::invalid_argument("nufft adjoint: size mismatch");
  CImage S(m_);
  for (size_t p = 0; p < pre.npts; ++p) {
    size_t base = p * pre.J2;
    for (int j = 0; j < pre.J2; ++j) S.v[pre.idx[base + j]] += pre.w[base + j] * samples[p];
  }
  CImage img = ifft2c(S);
  double scale = static_cast<double>(m_) * m_;
  CImage out(n_);
  int off = (m_ - n_) / 2;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      out.at(r, c) = img.at(off + r, off + c) * scale / (deapod_[r] * deapod_[c]);
  return out;
}

std::vector<cplx> ndft(const CImage& img, const SamplePoints& pts) {
  int n = img.n;
  std::vector<cplx> out(pts.size());
  for (size_t p = 0; p < pts.size(); ++p) {
    cplx acc(0.0, 0.0);
    for (int r = 0; r < n; ++r) {
      double y = r - n / 2;
      for (int c = 0; c < n; ++c) {
        double x = c - n / 2;
        double ph = -2 * kPi * (pts.kx[p] * x + pts.ky[p] * y);
        acc += img.at(r, c) * cplx(std::cos(ph), std::sin(ph));
      }
    }
    out[p] = acc;
  }
  return out;
}

}  // namespace kmoc
