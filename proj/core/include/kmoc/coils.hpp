#pragma once

#include "kmoc/rng.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

// Synthetic receive sensitivities: smooth localized bumps centered on the FOV
// border with a smooth low-order phase, jointly normalized so that
// sum_c |C_c|^2 = 1 at every pixel. Profiles are periodic across the FOV so
// the sensitivity-weighted combine has a compact k-space kernel.
struct CoilSet {
  int n = 0;
  CoilImages profiles;

  static CoilSet make(int n_coils, int n, uint64_t seed, double sigma_frac = 0.45,
                      double floor = 0.05);

  int count() const { return static_cast<int>(profiles.size()); }
};

// Sensitivity-weighted combination, returned in k-space:
// fft2c( sum_c conj(C_c) * ifft2c(Y_c) ).
CImage combine(const CoilImages& per_coil_k, const CoilSet& coils);

// Per-coil k-space of a coil-weighted image.
CoilImages coil_kspaces(const RImage& img, const CoilSet& coils);
CoilImages coil_kspaces(const CImage& img, const CoilSet& coils);

}  // namespace kmoc
