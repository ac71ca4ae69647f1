#include "kmoc/phantom.hpp"

#include <cmath>

#include "kmoc/fft.hpp"

namespace kmoc {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// (amplitude, a, b, x0, y0, phi) in unit coordinates
constexpr double kHead[10][6] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

}  // namespace

EllipseSet head_ellipses(int n, double margin) {
  double s = margin * n / 2.0;
  EllipseSet out;
  out.reserve(10);
  for (const auto& e : kHead)
    out.push_back({e[0], e[1] * s, e[2] * s, e[3] * s, e[4] * s, e[5]});
  return out;
}

EllipseSet random_ellipses(int n, Rng& rng, double margin) {
  double s = margin * n / 2.0;
  int n_ell = rng.uniform_int(6, 11);
  EllipseSet e;
  double A0 = rng.uniform(0.7, 1.0);
  double a0 = rng.uniform(0.62, 0.8);
  double b0 = rng.uniform(0.75, 0.92);
  double x0 = rng.uniform(-0.05, 0.05);
  double y0 = rng.uniform(-0.05, 0.05);
  double phi0 = rng.uniform(-10.0, 10.0);
  e.push_back({A0, a0 * s, b0 * s, x0 * s, y0 * s, phi0});
  e.push_back({-A0 * rng.uniform(0.6, 0.9), a0 * 0.93 * s, b0 * 0.93 * s, x0 * s, y0 * s, phi0});
  for (int i = 0; i < n_ell - 2; ++i) {
    double a = rng.uniform(0.03, 0.25);
    double b = rng.uniform(0.03, 0.25);
    double r = rng.uniform(0.0, 0.6);
    double ang = rng.uniform(0.0, 2 * kPi);
    double amp = rng.uniform(-0.6, 0.8);
    double phi = rng.uniform(0.0, 180.0);
    e.push_back({amp, a * s, b * s, r * std::cos(ang) * s, r * std::sin(ang) * s, phi});
  }
  return e;
}

RImage raster_phantom(const EllipseSet& es, int n) {
  RImage img(n, 0.0);
  for (const Ellipse& e : es) {
    double th = e.phi_deg * kPi / 180.0;
    double c = std::cos(th), s = std::sin(th);
    for (int r = 0; r < n; ++r) {
      double y = r - n / 2;
      for (int col = 0; col < n; ++col) {
        double x = col - n / 2;
        double dx = x - e.x0, dy = y - e.y0;
        double xr = c * dx + s * dy;
        double yr = -s * dx + c * dy;
        double q = (xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b);
        if (q <= 1.0) img.at(r, col) += e.amp;
      }
    }
  }
  return img;
}

cplx analytic_ft(const EllipseSet& es, double kx, double ky) {
  cplx out(0.0, 0.0);
  for (const Ellipse& e : es) {
    double th = e.phi_deg * kPi / 180.0;
    double c = std::cos(th), s = std::sin(th);
    double kxr = c * kx + s * ky;
    double kyr = -s * kx + c * ky;
    double sr = std::sqrt(e.a * kxr * e.a * kxr + e.b * kyr * e.b * kyr);
    double amp;
    if (sr > 1e-12)
      amp = std::cyl_bessel_j(1, 2 * kPi * sr) / sr;
    else
      amp = kPi;
    double ph = -2 * kPi * (kx * e.x0 + ky * e.y0);
    out += e.amp * e.a * e.b * amp * cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

CImage smooth_kspace(const CImage& ksp, double sigma_px) {
  CImage out = ksp;
  int n = ksp.n;
  KGrid g(n);
  for (int r = 0; r < n; ++r) {
    double ky = g.k(r);
    for (int c = 0; c < n; ++c) {
      double kx = g.k(c);
      out.at(r, c) *= std::exp(-2 * kPi * kPi * sigma_px * sigma_px * (kx * kx + ky * ky));
    }
  }
  return out;
}

RImage smooth_image(const RImage& img, double sigma_px) {
  if (sigma_px <= 0) return img;
  CImage k = fft2c(img);
  k = smooth_kspace(k, sigma_px);
  CImage back = ifft2c(k);
  RImage out(img.n);
  for (size_t i = 0; i < out.size(); ++i) out.v[i] = back.v[i].real();
  return out;
}

}  // namespace kmoc
