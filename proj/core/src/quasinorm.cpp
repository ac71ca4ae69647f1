#include "kmoc/quasinorm.hpp"

#include <algorithm>
#include <cmath>

namespace kmoc {

QuasinormSignal quasinorm_signal(const RImage& mag, double p, int band_half) {
  int n = mag.n;
  double mx = 0.0;
  for (double v : mag.v) mx = std::max(mx, v);
  if (!(mx > 0.0)) throw NumericError("quasinorm: empty magnitude");
  double inv = 1.0 / mx;
  double eps = 1e-12;
  QuasinormSignal sig;
  sig.p = p;
  sig.band_half = band_half;
  sig.values.resize(n);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    const double* row = mag.row(r);
    for (int c = 0; c < n; ++c) {
      double l = std::fabs(std::log(row[c] * inv + eps));
      acc += std::pow(l, p);
    }
    sig.values[r] = -std::pow(acc, 1.0 / p);
  }
  return sig;
}

RImage slice_averaged_magnitude(const std::vector<CImage>& slices) {
  if (slices.empty()) throw std::invalid_argument("slice_averaged_magnitude: no slices");
  int n = slices[0].n;
  RImage avg(n, 0.0);
  for (const CImage& s : slices)
    for (size_t i = 0; i < avg.size(); ++i) avg.v[i] += std::abs(s.v[i]);
  double inv = 1.0 / slices.size();
  for (double& v : avg.v) v *= inv;
  return avg;
}

}  // namespace kmoc
