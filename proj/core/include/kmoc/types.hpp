#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kmoc {

using cplx = std::complex<double>;

// Square row-major array. Most objects in this library live on an n x n grid.
template <class T>
struct Arr2 {
  int n = 0;
  std::vector<T> v;

  Arr2() = default;
  explicit Arr2(int n_, T fill = T{}) : n(n_), v(static_cast<size_t>(n_) * n_, fill) {}

  T& at(int r, int c) { return v[static_cast<size_t>(r) * n + c]; }
  const T& at(int r, int c) const { return v[static_cast<size_t>(r) * n + c]; }
  T* row(int r) { return v.data() + static_cast<size_t>(r) * n; }
  const T* row(int r) const { return v.data() + static_cast<size_t>(r) * n; }
  size_t size() const { return v.size(); }
};

using RImage = Arr2<double>;
using CImage = Arr2<cplx>;
using CoilImages = std::vector<CImage>;  // one complex image per coil

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool all_finite(const RImage& a);
bool all_finite(const CImage& a);

}  // namespace kmoc
