#pragma once

#include "kmoc/types.hpp"

namespace kmoc {

// Cartesian acquisition grid. Rows index phase encoding, columns frequency
// encoding. Sizes are powers of two, n >= 8, so the radix-2 transforms apply.
struct KGrid {
  int n;

  explicit KGrid(int n_);

  int dc() const { return n / 2; }                      // index of the DC row/column
  double k(int idx) const { return (idx - n / 2) / static_cast<double>(n); }  // cycles/pixel
  double x(int idx) const { return idx - n / 2; }       // pixels from center
};

// Frequency coordinates of every grid node, row-major, matching fft2c layout.
struct FreqCoords {
  int n = 0;
  std::vector<double> kx, ky;  // size n*n; ky varies with row, kx with column

  static FreqCoords cartesian(const KGrid& g);
};

}  // namespace kmoc
