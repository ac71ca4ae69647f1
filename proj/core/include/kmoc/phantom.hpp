#pragma once

#include "kmoc/grid.hpp"
#include "kmoc/rng.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

// Additive ellipse, pixel units, center-origin coordinates.
struct Ellipse {
  double amp;
  double a, b;      // semi-axes in pixels
  double x0, y0;    // center offset in pixels
  double phi_deg;   // CCW tilt
};

using EllipseSet = std::vector<Ellipse>;

// Classic 10-ellipse head phantom scaled so the outer skull spans
// margin * n/2 pixels.
EllipseSet head_ellipses(int n, double margin = 0.92);

// Randomized head-like phantom: outer skull pair plus 4..10 interior
// structures of varying intensity.
EllipseSet random_ellipses(int n, Rng& rng, double margin = 0.95);

// Indicator rasterization: each pixel center either inside or outside.
RImage raster_phantom(const EllipseSet& e, int n);

// Continuous Fourier transform of the ellipse sum at (kx, ky) cycles/pixel.
cplx analytic_ft(const EllipseSet& e, double kx, double ky);

// Gaussian apodization in k-space, equivalent to image-space blur of the
// given sigma in pixels. Used to produce band-limited variants.
CImage smooth_kspace(const CImage& ksp, double sigma_px);
RImage smooth_image(const RImage& img, double sigma_px);

}  // namespace kmoc
