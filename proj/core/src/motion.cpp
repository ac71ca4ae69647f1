#include "kmoc/motion.hpp"

#include <cmath>
#include <map>

#include "kmoc/fft.hpp"
#include "kmoc/grid.hpp"

namespace kmoc {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

template <class T>
Arr2<T> rotate_impl(const Arr2<T>& img, double theta_deg) {
  int n = img.n;
  if (theta_deg == 0.0) return img;
  double th = theta_deg * kPi / 180.0;
  double c = std::cos(th), s = std::sin(th);
  double cx = n / 2, cy = n / 2;
  Arr2<T> out(n, T{});
  for (int r = 0; r < n; ++r) {
    double yo = r - cy;
    for (int col = 0; col < n; ++col) {
      double xo = col - cx;
      double xs = c * xo + s * yo + cx;   // source = R(-theta) * dest
      double ys = -s * xo + c * yo + cy;
      int x0 = static_cast<int>(std::floor(xs));
      int y0 = static_cast<int>(std::floor(ys));
      double fx = xs - x0, fy = ys - y0;
      T acc{};
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          int xi = x0 + dx, yi = y0 + dy;
          if (xi < 0 || xi >= n || yi < 0 || yi >= n) continue;
          double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
          acc += img.at(yi, xi) * w;
        }
      out.at(r, col) = acc;
    }
  }
  return out;
}

struct StateKey {
  double th, tx, ty;
  bool operator<(const StateKey& o) const {
    if (th != o.th) return th < o.th;
    if (tx != o.tx) return tx < o.tx;
    return ty < o.ty;
  }
};

}  // namespace

RigidMotion motion_about_pivot(double theta_deg, double tau_x, double tau_y) {
  double th = theta_deg * kPi / 180.0;
  double c = std::cos(th), s = std::sin(th);
  RigidMotion m;
  m.theta_deg = theta_deg;
  m.tx = -tau_x * c + tau_y * s + tau_x;
  m.ty = -tau_x * s - tau_y * c + tau_y;
  return m;
}

RImage rotate_image(const RImage& img, double theta_deg) { return rotate_impl(img, theta_deg); }
CImage rotate_image(const CImage& img, double theta_deg) { return rotate_impl(img, theta_deg); }

void apply_phase_ramp(CImage& ksp, double tx, double ty) {
  int n = ksp.n;
  KGrid g(n);
  std::vector<cplx> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    double a = -2 * kPi * g.k(i) * tx;
    double b = -2 * kPi * g.k(i) * ty;
    px[i] = cplx(std::cos(a), std::sin(a));
    py[i] = cplx(std::cos(b), std::sin(b));
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) ksp.at(r, c) *= px[c] * py[r];
}

MotionTrajectory step_trajectory(int n, int onset, const RigidMotion& state, bool smooth3) {
  MotionTrajectory t = MotionTrajectory::identity(n);
  for (int j = onset; j < n; ++j) t.line[j] = state;
  if (smooth3 && onset >= 1) {
    t.line[onset - 1] = {state.theta_deg / 3, state.tx / 3, state.ty / 3};
    t.line[onset] = {2 * state.theta_deg / 3, 2 * state.tx / 3, 2 * state.ty / 3};
  }
  return t;
}

MotionTrajectory multi_event_trajectory(int n, const std::vector<int>& onsets,
                                        const std::vector<RigidMotion>& states, bool smooth3) {
  MotionTrajectory t = MotionTrajectory::identity(n);
  for (size_t e = 0; e < onsets.size(); ++e)
    for (int j = onsets[e]; j < n; ++j) t.line[j] = states[e];
  if (smooth3) {
    // average each parameter series with its two neighbors (edge-replicated)
    auto src = t.line;
    auto at = [&](int j) -> const RigidMotion& {
      if (j < 0) return src.front();
      if (j >= n) return src.back();
      return src[j];
    };
    for (int j = 0; j < n; ++j) {
      t.line[j].theta_deg = (at(j - 1).theta_deg + at(j).theta_deg + at(j + 1).theta_deg) / 3;
      t.line[j].tx = (at(j - 1).tx + at(j).tx + at(j + 1).tx) / 3;
      t.line[j].ty = (at(j - 1).ty + at(j).ty + at(j + 1).ty) / 3;
    }
  }
  return t;
}

CoilImages corrupt(const RImage& img, const MotionTrajectory& traj, const CoilSet& coils) {
  int n = img.n;
  if (traj.n() != n) throw std::invalid_argument("corrupt: trajectory length != n");
  int nc = coils.count();
  CoilImages per(nc, CImage(n));

  std::map<StateKey, std::vector<int>> groups;
  for (int j = 0; j < n; ++j) {
    const RigidMotion& m = traj.line[j];
    groups[{m.theta_deg, m.tx, m.ty}].push_back(j);
  }
  for (const auto& [key, rows] : groups) {
    RImage moved = (key.th == 0.0) ? img : rotate_image(img, key.th);
    CoilImages ks = coil_kspaces(moved, coils);
    for (int c = 0; c < nc; ++c) {
      if (key.tx != 0.0 || key.ty != 0.0) apply_phase_ramp(ks[c], key.tx, key.ty);
      for (int row : rows)
        for (int col = 0; col < n; ++col) per[c].at(row, col) = ks[c].at(row, col);
    }
  }
  return per;
}

}  // namespace kmoc
