#pragma once

#include "kmoc/types.hpp"

namespace kmoc {

// Peak signal-to-noise ratio on magnitudes, peak = max |ref|. Identical
// images return +infinity.
double psnr(const CImage& ref, const CImage& test);
double psnr(const RImage& ref, const CImage& test);

// Structural similarity on magnitudes: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range = max |ref|, valid-region mean.
double ssim(const CImage& ref, const CImage& test);
double ssim(const RImage& ref, const CImage& test);

// Shannon entropy (nats) of the magnitude over a 256-bin min-max histogram.
double entropy(const CImage& img, int bins = 256);

// entropy(corrupted) - entropy(restored); positive means restoration reduced
// disorder.
double info_gain(const CImage& corrupted, const CImage& restored);

struct RocPoint {
  double fpr, tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Threshold sweep over the pooled score range; AUC by trapezoid rule.
RocCurve roc_curve(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg,
                   int n_thresholds = 1000);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double rmse(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kmoc
