#include "kmoc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmoc {

std::vector<double> prep_signal(const std::vector<double>& sig, int band_half,
                                std::vector<uint8_t>* mask_out) {
  int n = static_cast<int>(sig.size());
  int dc = n / 2;
  std::vector<uint8_t> mask(n, 1);
  for (int j = std::max(0, dc - band_half); j <= std::min(n - 1, dc + band_half); ++j) mask[j] = 0;

  double mu = 0.0;
  int m = 0;
  for (int j = 0; j < n; ++j)
    if (mask[j]) {
      mu += sig[j];
      ++m;
    }
  if (m == 0) throw std::invalid_argument("prep_signal: excluded band covers everything");
  mu /= m;
  double var = 0.0;
  for (int j = 0; j < n; ++j)
    if (mask[j]) var += (sig[j] - mu) * (sig[j] - mu);
  double sd = std::sqrt(var / m) + 1e-12;

  std::vector<double> out(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (mask[j]) out[j] = (sig[j] - mu) / sd;
  if (mask_out) *mask_out = std::move(mask);
  return out;
}

double degradation_weight(int line, int n) {
  return std::max(0.0, 1.0 - std::abs(line - n / 2) / (n / 2.0));
}

Detection detect_onset(DetectorNet& net, const std::vector<double>& quasinorm_values,
                       int band_half) {
  std::vector<uint8_t> mask;
  std::vector<double> x = prep_signal(quasinorm_values, band_half, &mask);
  std::vector<double> logits = net.forward(x);

  int n = static_cast<int>(logits.size());
  double m = -1e300;
  for (int j = 0; j < n; ++j)
    if (mask[j]) m = std::max(m, logits[j]);
  double z = 0.0;
  for (int j = 0; j < n; ++j)
    if (mask[j]) z += std::exp(logits[j] - m);

  Detection det;
  det.prob.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (!mask[j]) continue;
    det.prob[j] = std::exp(logits[j] - m) / z;
    if (det.prob[j] > det.confidence) {
      det.confidence = det.prob[j];
      det.line = j;
    }
  }
  det.score = det.confidence * degradation_weight(det.line, n);
  return det;
}

int LineEstimators::net_for(int line) const {
  int best = -1, best_d = reach + 1;
  for (const auto& [l, _] : nets) {
    int d = std::abs(l - line);
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  return best;
}

MotionTrajectory estimate_trajectory(LineEstimators& est, const CImage& combined_k,
                                     double theta_floor, double trans_floor) {
  int n = combined_k.n;
  MotionTrajectory traj = MotionTrajectory::identity(n);
  int h = est.w / 2;
  Tensor3 win;
  for (int j = 1; j < n; ++j) {
    if (j - h < 0 || j + h >= n) {
      traj.line[j] = traj.line[j - 1];
      continue;
    }
    int l = est.net_for(j);
    if (l < 0) throw std::invalid_argument("estimate: no net within reach of line " +
                                           std::to_string(j));
    kspace_window(combined_k, j, est.w, win);
    const NormStats& st = est.stats.at(l);
    for (size_t i = 0; i < win.size(); ++i) win.v[i] = (win.v[i] - st.mu[i]) / st.sd[i];
    auto out = est.nets.at(l).forward(win, false, nullptr);
    bool quiet = std::abs(out[0]) < theta_floor && std::abs(out[1]) < trans_floor &&
                 std::abs(out[2]) < trans_floor;
    if (quiet)
      traj.line[j] = traj.line[j - 1];
    else
      traj.line[j] = RigidMotion{out[0], out[1], out[2]};
  }
  return traj;
}

}  // namespace kmoc
