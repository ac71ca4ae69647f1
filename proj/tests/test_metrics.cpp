#include "doctest.h"

#include <cmath>

#include "kmoc/metrics.hpp"
#include "kmoc/phantom.hpp"
#include "kmoc/rng.hpp"

using namespace kmoc;

namespace {

CImage to_cimage(const RImage& r) {
  CImage c(r.n);
  for (size_t i = 0; i < r.size(); ++i) c.v[i] = cplx(r.v[i], 0.0);
  return c;
}

}  // namespace

TEST_CASE("psnr basics") {
  RImage img = raster_phantom(head_ellipses(64), 64);
  CImage a = to_cimage(img);
  CHECK(std::isinf(psnr(a, a)));

  // known-noise oracle: peak 1, noise std eps -> psnr ~ -20 log10(eps)
  int n = 64;
  CImage ref(n), noisy(n);
  Rng rng(4);
  for (int i = 0; i < n * n; ++i) {
    double v = (i % 97) / 96.0;
    ref.v[i] = v;
    noisy.v[i] = v + 1e-3 * rng.normal();
  }
  double p = psnr(ref, noisy);
  CHECK(p > 55.0);
  CHECK(p < 65.0);
}

TEST_CASE("ssim basics") {
  RImage img = raster_phantom(head_ellipses(64), 64);
  CImage a = to_cimage(img);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  CImage b = a;
  Rng rng(9);
  for (auto& v : b.v) v += 0.12 * rng.normal();
  double s = ssim(a, b);
  CHECK(s < 0.9);
  CHECK(s > -1.0);
  CHECK(s <= 1.0);
}

TEST_CASE("entropy basics") {
  CImage flat(32, cplx(3.0, 0.0));
  CHECK(entropy(flat) == 0.0);

  CImage two(32);
  for (size_t i = 0; i < two.size(); ++i) two.v[i] = (i % 2) ? cplx(1, 0) : cplx(0, 0);
  CHECK(entropy(two) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CImage rnd(32);
  Rng rng(5);
  for (auto& v : rnd.v) v = cplx(rng.uniform(), 0.0);
  double h = entropy(rnd);
  CHECK(h > std::log(2.0));
  CHECK(h <= std::log(256.0) + 1e-12);
}

TEST_CASE("info gain sign convention") {
  CImage disordered(32), ordered(32, cplx(1.0, 0.0));
  Rng rng(6);
  for (auto& v : disordered.v) v = cplx(rng.uniform(), 0.0);
  CHECK(info_gain(disordered, ordered) > 0.0);
}

TEST_CASE("roc endpoints") {
  std::vector<double> pos{1.0, 0.9, 0.8}, neg{0.1, 0.0, 0.2};
  RocCurve rc = roc_curve(pos, neg);
  CHECK(rc.auc == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> same{0.4, 0.5, 0.6, 0.7};
  RocCurve rc2 = roc_curve(same, same);
  CHECK(rc2.auc == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("trapezoid auc equals the pairwise comparison statistic") {
  Rng rng(12);
  std::vector<double> pos(80), neg(120);
  for (auto& v : pos) v = rng.normal() + 0.8;
  for (auto& v : neg) v = rng.normal();
  RocCurve rc = roc_curve(pos, neg, 1000);
  double wins = 0;
  for (double p : pos)
    for (double q : neg) wins += (p > q) + 0.5 * (p == q);
  double mw = wins / (pos.size() * neg.size());
  CHECK(std::fabs(rc.auc - mw) < 1e-3);
}

TEST_CASE("pearson and rmse") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> c{5, 4, 3, 2, 1};
  CHECK(pearson(a, c) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rmse(a, a) == 0.0);
  std::vector<double> d{2, 3, 4, 5, 6};
  CHECK(rmse(a, d) == doctest::Approx(1.0));
}
