#pragma once

#include "kmoc/types.hpp"

namespace kmoc {

// Per-line k-space quality signal. The slice-averaged magnitude is scaled to
// unit maximum, then value_j = -(sum_col |log(M[j,col] + eps)|^p)^(1/p) with
// eps = 1e-12 * max magnitude. Lower values mean stronger signal loss.
struct QuasinormSignal {
  double p = 0.5;
  int band_half = 8;              // excluded half-width around the DC line
  std::vector<double> values;     // one per PE line

  int n() const { return static_cast<int>(values.size()); }
  bool excluded(int line) const {
    int dc = n() / 2;
    return line >= dc - band_half && line <= dc + band_half;
  }
};

// mag: slice-averaged |k-space|.
QuasinormSignal quasinorm_signal(const RImage& mag, double p = 0.5, int band_half = 8);

// Average of per-slice magnitudes of combined k-spaces.
RImage slice_averaged_magnitude(const std::vector<CImage>& slices);

}  // namespace kmoc
