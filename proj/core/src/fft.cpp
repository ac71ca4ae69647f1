#include "kmoc/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace kmoc {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

const std::vector<cplx>& twiddles(int n, bool inverse) {
  static std::map<std::pair<int, bool>, std::vector<cplx>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, inverse);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> tw(n / 2);
  double sign = inverse ? 1.0 : -1.0;
  for (int i = 0; i < n / 2; ++i) {
    double a = sign * kTau * i / n;
    tw[i] = cplx(std::cos(a), std::sin(a));
  }
  return cache.emplace(key, std::move(tw)).first->second;
}

}  // namespace

void fft_1d(cplx* a, int n, bool inverse) {
  if (n <= 1) return;
  if ((n & (n - 1)) != 0) throw NumericError("fft size must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = twiddles(n, inverse);
  for (int len = 2; len <= n; len <<= 1) {
    int stride = n / len;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < len / 2; ++k) {
        cplx w = tw[static_cast<size_t>(k) * stride];
        cplx u = a[i + k];
        cplx t = a[i + k + len / 2] * w;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) a[i] *= inv;
  }
}

void fft2(CImage& a, bool inverse) {
  int n = a.n;
  for (int r = 0; r < n; ++r) fft_1d(a.row(r), n, inverse);
  std::vector<cplx> col(n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) col[r] = a.at(r, c);
    fft_1d(col.data(), n, inverse);
    for (int r = 0; r < n; ++r) a.at(r, c) = col[r];
  }
}

CImage fft2c(const CImage& img) {
  CImage t = shift2(img);
  fft2(t, false);
  return shift2(t);
}

CImage ifft2c(const CImage& ksp) {
  CImage t = shift2(ksp);
  fft2(t, true);
  return shift2(t);
}

CImage fft2c(const RImage& img) {
  CImage t(img.n);
  for (size_t i = 0; i < img.size(); ++i) t.v[i] = cplx(img.v[i], 0.0);
  return fft2c(t);
}

}  // namespace kmoc
