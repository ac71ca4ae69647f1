#include "doctest.h"

#include <cmath>

#include "kmoc/fft.hpp"
#include "kmoc/grid.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/rng.hpp"

using namespace kmoc;

namespace {

CImage random_cimage(int n, uint64_t seed) {
  Rng rng(seed);
  CImage a(n);
  for (auto& v : a.v) v = cplx(rng.normal(), rng.normal());
  return a;
}

double rel_l2(const CImage& a, const CImage& b) {
  double num = 0, den = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.v[i] - b.v[i]);
    den += std::norm(b.v[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("grid conventions") {
  CHECK_THROWS(KGrid(7));
  CHECK_THROWS(KGrid(4));
  CHECK_THROWS(KGrid(48));
  KGrid g(64);
  CHECK(g.dc() == 32);
  CHECK(g.k(32) == 0.0);
  CHECK(g.k(0) == doctest::Approx(-0.5));
  CHECK(g.x(32) == 0.0);
  auto f = FreqCoords::cartesian(g);
  CHECK(f.kx[32 * 64 + 32] == 0.0);
  CHECK(f.ky[32 * 64 + 32] == 0.0);
  CHECK(f.ky[0] == doctest::Approx(-0.5));
}

TEST_CASE("dc of ones is n^2") {
  int n = 32;
  CImage ones(n, cplx(1.0, 0.0));
  CImage K = fft2c(ones);
  CHECK(std::abs(K.at(n / 2, n / 2) - cplx(n * n, 0.0)) < 1e-9);
  double off = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (r != n / 2 || c != n / 2) off = std::max(off, std::abs(K.at(r, c)));
  CHECK(off < 1e-9);
}

TEST_CASE("roundtrip and Parseval") {
  int n = 64;
  CImage x = random_cimage(n, 42);
  CImage K = fft2c(x);
  CImage back = ifft2c(K);
  CHECK(rel_l2(back, x) < 1e-13);

  double ex = 0, ek = 0;
  for (auto& v : x.v) ex += std::norm(v);
  for (auto& v : K.v) ek += std::norm(v);
  CHECK(std::fabs(ek - ex * n * n) / (ex * n * n) < 1e-10);
}

TEST_CASE("fft matches brute-force dft on 8x8") {
  int n = 8;
  CImage x = random_cimage(n, 7);
  CImage K = fft2c(x);
  KGrid g(n);
  double worst = 0;
  for (int kr = 0; kr < n; ++kr)
    for (int kc = 0; kc < n; ++kc) {
      cplx acc(0, 0);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          double ph = -2 * M_PI * (g.k(kc) * g.x(c) + g.k(kr) * g.x(r));
          acc += x.at(r, c) * cplx(std::cos(ph), std::sin(ph));
        }
      worst = std::max(worst, std::abs(acc - K.at(kr, kc)));
    }
  double scale = 0;
  for (auto& v : K.v) scale = std::max(scale, std::abs(v));
  CHECK(worst / scale < 1e-10);
}

TEST_CASE("integer shift equals phase ramp") {
  int n = 32;
  CImage x = random_cimage(n, 3);
  int dx = 5, dy = -3;
  CImage shifted(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      shifted.at(((r + dy) % n + n) % n, ((c + dx) % n + n) % n) = x.at(r, c);
  CImage K = fft2c(x);
  apply_phase_ramp(K, dx, dy);
  CImage K2 = fft2c(shifted);
  CHECK(rel_l2(K, K2) < 1e-10);
}

TEST_CASE("fft_1d rejects non-power-of-two") {
  std::vector<cplx> a(12);
  CHECK_THROWS_AS(fft_1d(a.data(), 12, false), NumericError);
}

TEST_CASE("rng streams are deterministic and tag-separated") {
  Rng a = derive_rng(123, "alpha");
  Rng b = derive_rng(123, "alpha");
  Rng c = derive_rng(123, "beta");
  for (int i = 0; i < 16; ++i) CHECK(a.u64() == b.u64());
  bool differ = false;
  Rng a2 = derive_rng(123, "alpha");
  for (int i = 0; i < 16; ++i) differ |= (a2.u64() != c.u64());
  CHECK(differ);

  Rng n1(99);
  double m = 0, s = 0;
  const int N = 20000;
  std::vector<double> xs(N);
  for (auto& v : xs) v = n1.normal();
  for (double v : xs) m += v;
  m /= N;
  for (double v : xs) s += (v - m) * (v - m);
  s = std::sqrt(s / N);
  CHECK(std::fabs(m) < 0.03);
  CHECK(std::fabs(s - 1.0) < 0.03);
}
