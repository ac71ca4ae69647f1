#pragma once

#include "kmoc/coils.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/nufft.hpp"

namespace kmoc {

// Rotation part of the trajectory as sample coordinates: acquired row j lives
// at R(-theta_j) applied to its Cartesian positions.
SamplePoints rotated_sample_points(const MotionTrajectory& traj, int n);

// Undo per-line translation phase ramps in place.
void cancel_phase(CImage& ksp, const MotionTrajectory& traj);

// Conjugate-gradient least squares on the normal equations F'F x = F'y with
// x0 = 0 and a fixed iteration count.
CImage solve_least_squares(const NufftPlan& plan, const NufftPlan::Weights& pre,
                           const std::vector<cplx>& y, int iters);

// Full restoration: phase cancellation, then iterative reconstruction on the
// rotated trajectory. Returns the restored image (image domain).
CImage correct_kspace(const CImage& corrupted, const MotionTrajectory& traj, int iters = 12);

// Multi-coil restoration: each coil k-space is corrected independently, the
// per-coil images are then combined with conjugate sensitivities. For a
// translation-only trajectory this restores the image exactly.
CImage correct_coils(const CoilImages& corrupted, const MotionTrajectory& traj,
                     const CoilSet& coils, int iters = 12);

}  // namespace kmoc
