#pragma once

#include "kmoc/types.hpp"

namespace kmoc {

// Radix-2 in-place transform. Forward is unnormalized, inverse carries 1/n.
void fft_1d(cplx* a, int n, bool inverse);

// Unnormalized 2D forward / normalized (1/n^2) inverse, DC at (0, 0).
void fft2(CImage& a, bool inverse);

// Move the origin between corner and center. For even n both directions
// coincide with a half-period roll.
template <class T>
Arr2<T> shift2(const Arr2<T>& a) {
  Arr2<T> out(a.n);
  int h = a.n / 2;
  for (int r = 0; r < a.n; ++r)
    for (int c = 0; c < a.n; ++c) out.at((r + h) % a.n, (c + h) % a.n) = a.at(r, c);
  return out;
}

// Centered transforms: DC of the spectrum sits at (n/2, n/2) and the image
// origin is the center pixel. fft2c(ones)[n/2][n/2] = n^2.
CImage fft2c(const CImage& img);
CImage ifft2c(const CImage& ksp);
CImage fft2c(const RImage& img);

}  // namespace kmoc
