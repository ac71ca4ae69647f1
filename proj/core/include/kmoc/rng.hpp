#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace kmoc {

// splitmix64 stream with explicit float mappings so sequences are identical
// across standard libraries and platforms.
struct Rng {
  uint64_t state = 0x9e3779b97f4a7c15ull;
  bool have_cached = false;
  double cached = 0.0;

  explicit Rng(uint64_t seed = 1) : state(seed) {}

  uint64_t u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; second value of each pair is cached.
  double normal() {
    if (have_cached) {
      have_cached = false;
      return cached;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached = r * std::sin(a);
    have_cached = true;
    return r * std::cos(a);
  }

  int uniform_int(int lo, int hi) {  // inclusive ends
    return lo + static_cast<int>(u64() % static_cast<uint64_t>(hi - lo + 1));
  }
};

uint64_t hash_tag(std::string_view tag);

// Independent named substream of a master seed.
Rng derive_rng(uint64_t master, std::string_view tag, uint64_t index = 0);

}  // namespace kmoc
