#pragma once

#include "kmoc/grid.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

// Off-grid sample positions in cycles/pixel, |k| nominally <= 0.5.
struct SamplePoints {
  std::vector<double> kx, ky;
  size_t size() const { return kx.size(); }
};

// Gridding NUFFT: Kaiser-Bessel kernel of width J on a sigma-oversampled
// grid, image-domain deapodization by the transform of the sampled kernel.
// Forward maps an n x n image to arbitrary k-space samples; the adjoint is
// the exact conjugate-transpose built from the same weights.
class NufftPlan {
 public:
  NufftPlan(int n, int J = 6, double oversample = 2.0, double beta = 0.0);

  int n() const { return n_; }
  int m() const { return m_; }
  int J() const { return J_; }
  double beta() const { return beta_; }

  // Precomputed per-point gather indices and separable kernel weights.
  struct Weights {
    int J2 = 0;                   // J*J entries per point
    std::vector<uint32_t> idx;    // size() * J2 flattened oversampled-grid indices
    std::vector<double> w;        // matching weights
    size_t npts = 0;
  };
  Weights weights(const SamplePoints& pts) const;

  std::vector<cplx> forward(const CImage& img, const Weights& pre) const;
  CImage adjoint(const std::vector<cplx>& samples, const Weights& pre) const;

  double kernel(double u) const;  // Kaiser-Bessel, support |u| <= J/2

 private:
  int n_, J_, m_;
  double beta_;
  std::vector<double> deapod_;    // 1D, length n
};

// Brute-force non-uniform DFT, the oracle for the gridding approximation.
std::vector<cplx> ndft(const CImage& img, const SamplePoints& pts);

}  // namespace kmoc
