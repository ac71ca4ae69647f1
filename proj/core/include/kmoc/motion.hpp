#pragma once

#include "kmoc/coils.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

// One rigid-body state: CCW in-plane rotation (degrees) about the FOV center
// plus residual translations in pixels. (0,0,0) is the identity motion.
struct RigidMotion {
  double theta_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  bool is_identity() const { return theta_deg == 0.0 && tx == 0.0 && ty == 0.0; }
  friend bool operator==(const RigidMotion&, const RigidMotion&) = default;
};

// Per-phase-encoding-line motion state, acquisition order = row order.
struct MotionTrajectory {
  std::vector<RigidMotion> line;

  static MotionTrajectory identity(int n) { return {std::vector<RigidMotion>(n)}; }
  int n() const { return static_cast<int>(line.size()); }
};

// Rotation about an off-center pivot equals rotation about the center plus a
// residual translation t = (I - R) * tau, tau measured from the FOV center.
RigidMotion motion_about_pivot(double theta_deg, double tau_x, double tau_y);

// Bilinear interpolation, zero fill outside, content rotated CCW by theta.
RImage rotate_image(const RImage& img, double theta_deg);
CImage rotate_image(const CImage& img, double theta_deg);

// k-space phase ramp equivalent to translating the image by (+tx, +ty).
void apply_phase_ramp(CImage& ksp, double tx, double ty);

// Step trajectory: identity before onset, the given state from onset on.
// smooth3 convolves each parameter series with [1/3 1/3 1/3] across the
// transition (line onset-1 gets 1/3 of the state, onset gets 2/3).
MotionTrajectory step_trajectory(int n, int onset, const RigidMotion& state, bool smooth3 = false);

MotionTrajectory multi_event_trajectory(int n, const std::vector<int>& onsets,
                                        const std::vector<RigidMotion>& states,
                                        bool smooth3 = false);

// Row-replacement corruption: lines of each distinct motion state are taken
// from the k-space of the moved, coil-weighted image; translations enter as
// phase ramps. Returns per-coil corrupted k-spaces.
CoilImages corrupt(const RImage& img, const MotionTrajectory& traj, const CoilSet& coils);

}  // namespace kmoc
