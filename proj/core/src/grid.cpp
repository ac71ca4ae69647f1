#include "kmoc/grid.hpp"

#include <cmath>

#include "kmoc/rng.hpp"

namespace kmoc {

KGrid::KGrid(int n_) : n(n_) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("KGrid: n must be a power of two, n >= 8");
}

FreqCoords FreqCoords::cartesian(const KGrid& g) {
  FreqCoords f;
  f.n = g.n;
  f.kx.resize(static_cast<size_t>(g.n) * g.n);
  f.ky.resize(f.kx.size());
  for (int r = 0; r < g.n; ++r) {
    double kyv = g.k(r);
    for (int c = 0; c < g.n; ++c) {
      size_t i = static_cast<size_t>(r) * g.n + c;
      f.ky[i] = kyv;
      f.kx[i] = g.k(c);
    }
  }
  return f;
}

bool all_finite(const RImage& a) {
  for (double x : a.v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const CImage& a) {
  for (const cplx& x : a.v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 14695981039346656037ull;  // FNV-1a
  for (char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

Rng derive_rng(uint64_t master, std::string_view tag, uint64_t index) {
  Rng mix(master ^ hash_tag(tag));
  uint64_t a = mix.u64();
  Rng mix2(a + 0x632be59bd9b4e019ull * (index + 1));
  return Rng(mix2.u64());
}

}  // namespace kmoc
