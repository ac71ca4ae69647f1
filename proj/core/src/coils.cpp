#include "kmoc/coils.hpp"

#include <cmath>

#include "kmoc/fft.hpp"

namespace kmoc {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

CoilSet CoilSet::make(int n_coils, int n, uint64_t seed, double sigma_frac, double floor) {
  CoilSet cs;
  cs.n = n;
  Rng rng = derive_rng(seed, "coils");
  double kappa = 4.0 / (kPi * kPi * sigma_frac * sigma_frac);
  std::vector<CImage> prof;
  for (int c = 0; c < n_coils; ++c) {
    double ang = 2 * kPi * c / n_coils;
    double cx = std::cos(ang), cy = std::sin(ang);
    double coef[4];
    for (double& v : coef) v = rng.uniform(-1.0, 1.0);
    CImage p(n);
    for (int r = 0; r < n; ++r) {
      double y = (r - n / 2) / (n / 2.0);
      double sy = std::sin(kPi * (y - cy));
      double cyv = std::cos(kPi * (y - cy));
      for (int col = 0; col < n; ++col) {
        double x = (col - n / 2) / (n / 2.0);
        double sx = std::sin(kPi * (x - cx));
        double cxv = std::cos(kPi * (x - cx));
        double env = std::exp(kappa * (cxv + cyv - 2.0));
        double ph = 0.4 * kPi * (coef[0] * 0.5 + 0.6 * coef[1] * sx + 0.6 * coef[2] * sy +
                                 0.4 * coef[3] * sx * sy);
        p.at(r, col) = (env + floor) * cplx(std::cos(ph), std::sin(ph));
      }
    }
    prof.push_back(std::move(p));
  }
  // pointwise sum-of-squares normalization
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      double ss = 0;
      for (const auto& p : prof) ss += std::norm(p.at(r, col));
      double inv = 1.0 / std::sqrt(ss);
      for (auto& p : prof) p.at(r, col) *= inv;
    }
  cs.profiles = std::move(prof);
  return cs;
}

CImage combine(const CoilImages& per_coil_k, const CoilSet& coils) {
  int n = coils.n;
  CImage acc(n);
  for (size_t c = 0; c < per_coil_k.size(); ++c) {
    CImage img = ifft2c(per_coil_k[c]);
    const CImage& p = coils.profiles[c];
    for (size_t i = 0; i < acc.size(); ++i) acc.v[i] += std::conj(p.v[i]) * img.v[i];
  }
  return fft2c(acc);
}

CoilImages coil_kspaces(const CImage& img, const CoilSet& coils) {
  CoilImages out;
  out.reserve(coils.profiles.size());
  for (const CImage& p : coils.profiles) {
    CImage w(img.n);
    for (size_t i = 0; i < w.size(); ++i) w.v[i] = p.v[i] * img.v[i];
    out.push_back(fft2c(w));
  }
  return out;
}

CoilImages coil_kspaces(const RImage& img, const CoilSet& coils) {
  CImage c(img.n);
  for (size_t i = 0; i < c.size(); ++i) c.v[i] = cplx(img.v[i], 0.0);
  return coil_kspaces(c, coils);
}

}  // namespace kmoc
