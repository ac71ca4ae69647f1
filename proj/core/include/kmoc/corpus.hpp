#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kmoc/coils.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/nets.hpp"
#include "kmoc/phantom.hpp"
#include "kmoc/quasinorm.hpp"

namespace kmoc {

// Pre-rendered random phantoms sharing one synthetic coil set.
struct PhantomBank {
  int n = 0;
  CoilSet coils;
  std::vector<RImage> images;

  static PhantomBank make(int n, int count, uint64_t seed, int n_coils = 4,
                          double smooth_px = 0.0);

  int count() const { return static_cast<int>(images.size()); }

  // Single event at `onset` (rotation about an off-center pivot): lines at
  // and after the onset come from the moved state. Returns the combined
  // k-space; *residual (if given) receives the induced translations.
  CImage corrupt_single_event(int idx, int onset, double theta_deg, double tau_x, double tau_y,
                              bool smooth3, RigidMotion* residual = nullptr) const;
};

// Per-location normalization maps over the bank's motion-free windows.
struct NormStats {
  int w = 0, n = 0, line = 0;
  std::vector<float> mu, sd;   // each 2*w*n, channel-major
};

NormStats norm_stats(const PhantomBank& bank, int line, int w);

// Labeled window corpus at one PE line: each sample is a single-event
// corruption with onset at that line, the window the surrounding w rows of
// the combined k-space, the label the event's (theta, tx, ty).
struct WindowDataset {
  int n = 0, w = 0, line = 0;
  std::vector<float> X;        // count * 2*w*n, normalized when stats given
  std::vector<std::array<double, 3>> Y;
  std::vector<int32_t> phantom_id;
  std::vector<uint8_t> is_val;

  size_t count() const { return Y.size(); }
  size_t window_len() const { return static_cast<size_t>(2) * w * n; }
  void fill_window(size_t i, Tensor3& out) const;
};

// Validation samples come from the top val_frac of phantom ids, so the split
// separates phantoms, not draws.
WindowDataset gen_windows(const PhantomBank& bank, int line, size_t count, uint64_t seed,
                          int w = 9, const NormStats* stats = nullptr, double val_frac = 0.2);

// Extract a 2 x w x n window (real/imag channels) around `line`.
void kspace_window(const CImage& k, int line, int w, Tensor3& out);

// One simulated volume for detector work: line signals at p = 1/2 and p = 2
// from a slice-averaged single-event corruption.
struct DetectorVolume {
  std::vector<double> s_half, s_two;
  int onset = 0;
  double theta = 0.0;
  int pid = 0;
};

// Random volumes (onset uniform outside the excluded band, theta ~ N(0, 1.5))
// or the deterministic calibration grid (onset x angle lattice, random sign).
std::vector<DetectorVolume> gen_detector_volumes(const PhantomBank& bank, int count,
                                                 uint64_t seed, int slices_per_volume = 3,
                                                 bool grid = false, int band_half = 8);

}  // namespace kmoc
