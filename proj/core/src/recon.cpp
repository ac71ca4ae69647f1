#include "kmoc/recon.hpp"

#include <cmath>

#include "kmoc/fft.hpp"
#include "kmoc/grid.hpp"

namespace kmoc {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

cplx vdot(const CImage& a, const CImage& b) {
  cplx acc(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a.v[i]) * b.v[i];
  return acc;
}
}  // namespace

SamplePoints rotated_sample_points(const MotionTrajectory& traj, int n) {
  KGrid g(n);
  SamplePoints pts;
  pts.kx.resize(static_cast<size_t>(n) * n);
  pts.ky.resize(pts.kx.size());
  for (int j = 0; j < n; ++j) {
    double th = traj.line[j].theta_deg * kPi / 180.0;
    double c = std::cos(th), s = std::sin(th);
    double ky = g.k(j);
    for (int col = 0; col < n; ++col) {
      double kx = g.k(col);
      size_t i = static_cast<size_t>(j) * n + col;
      pts.kx[i] = c * kx + s * ky;   // R(-theta) * k
      pts.ky[i] = -s * kx + c * ky;
    }
  }
  return pts;
}

void cancel_phase(CImage& ksp, const MotionTrajectory& traj) {
  int n = ksp.n;
  KGrid g(n);
  for (int j = 0; j < n; ++j) {
    double tx = traj.line[j].tx, ty = traj.line[j].ty;
    if (tx == 0.0 && ty == 0.0) continue;
    double ky = g.k(j);
    for (int col = 0; col < n; ++col) {
      double a = 2 * kPi * (g.k(col) * tx + ky * ty);
      ksp.at(j, col) *= cplx(std::cos(a), std::sin(a));
    }
  }
}

CImage solve_least_squares(const NufftPlan& plan, const NufftPlan::Weights& pre,
                           const std::vector<cplx>& y, int iters) {
  CImage b = plan.adjoint(y, pre);
  CImage x(plan.n());
  CImage r = b;
  CImage p = r;
  double rs = vdot(r, r).real();
  for (int it = 0; it < iters; ++it) {
    CImage Ap = plan.adjoint(plan.forward(p, pre), pre);
    double alpha = rs / vdot(p, Ap).real();
    for (size_t i = 0; i < x.size(); ++i) {
      x.v[i] += alpha * p.v[i];
      r.v[i] -= alpha * Ap.v[i];
    }
    double rs_new = vdot(r, r).real();
    double beta = rs_new / rs;
    for (size_t i = 0; i < p.size(); ++i) p.v[i] = r.v[i] + beta * p.v[i];
    rs = rs_new;
  }
  if (!all_finite(x)) throw NumericError("least squares: non-finite iterate");
  return x;
}

CImage correct_kspace(const CImage& corrupted, const MotionTrajectory& traj, int iters) {
  CImage y = corrupted;
  cancel_phase(y, traj);
  int n = y.n;
  bool any_rotation = false;
  for (const auto& m : traj.line)
    if (m.theta_deg != 0.0) any_rotation = true;
  if (!any_rotation) return ifft2c(y);
  NufftPlan plan(n);
  SamplePoints pts = rotated_sample_points(traj, n);
  auto pre = plan.weights(pts);
  return solve_least_squares(plan, pre, y.v, iters);
}

CImage correct_coils(const CoilImages& corrupted, const MotionTrajectory& traj,
                     const CoilSet& coils, int iters) {
  if (corrupted.empty()) throw NumericError("correct_coils: no coil data");
  int n = corrupted[0].n;
  bool any_rotation = false;
  for (const auto& m : traj.line)
    if (m.theta_deg != 0.0) any_rotation = true;

  CImage out(n);
  if (!any_rotation) {
    for (size_t c = 0; c < corrupted.size(); ++c) {
      CImage y = corrupted[c];
      cancel_phase(y, traj);
      CImage xc = ifft2c(y);
      for (size_t i = 0; i < out.size(); ++i)
        out.v[i] += std::conj(coils.profiles[c].v[i]) * xc.v[i];
    }
    return out;
  }

  NufftPlan plan(n);
  SamplePoints pts = rotated_sample_points(traj, n);
  auto pre = plan.weights(pts);
  for (size_t c = 0; c < corrupted.size(); ++c) {
    CImage y = corrupted[c];
    cancel_phase(y, traj);
    CImage xc = solve_least_squares(plan, pre, y.v, iters);
    for (size_t i = 0; i < out.size(); ++i)
      out.v[i] += std::conj(coils.profiles[c].v[i]) * xc.v[i];
  }
  return out;
}

}  // namespace kmoc
