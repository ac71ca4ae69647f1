#pragma once

#include <map>
#include <vector>

#include "kmoc/corpus.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/nets.hpp"

namespace kmoc {

// z-score a line signal over the non-excluded lines and zero the excluded
// band. mask_out (if given) receives 1 for allowed lines.
std::vector<double> prep_signal(const std::vector<double>& sig, int band_half,
                                std::vector<uint8_t>* mask_out = nullptr);

struct Detection {
  int line = -1;              // top-1 onset candidate
  double confidence = 0.0;    // softmax probability of that line
  double score = 0.0;         // confidence weighted toward the k-space center
  std::vector<double> prob;   // full posterior, zero on excluded lines
};

// Low-frequency corruption matters more: weight falls linearly from 1 at DC
// to 0 at the outermost line.
double degradation_weight(int line, int n);

Detection detect_onset(DetectorNet& net, const std::vector<double>& quasinorm_values,
                       int band_half = 8);

// Estimator nets trained at representative PE lines with their stats; lines
// in between fall back to the nearest trained net within `reach`.
struct LineEstimators {
  std::map<int, SismikNet> nets;
  std::map<int, NormStats> stats;
  int w = 9;
  int reach = 5;

  // Trained line for `line`, or -1 when none is within reach.
  int net_for(int line) const;
};

// Per-line estimates assembled into an absolute trajectory: line 0 is the
// identity; estimates below the no-motion floor (or lines too close to the
// edge for a window) keep the previous line's state.
MotionTrajectory estimate_trajectory(LineEstimators& est, const CImage& combined_k,
                                     double theta_floor = 0.3, double trans_floor = 0.2);

}  // namespace kmoc
