#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kmoc/corpus.hpp"
#include "kmoc/nets.hpp"

namespace kmoc {

// Estimator training recipe. Defaults follow the motion-regression setup:
// Adam at 1e-6 with L2 weight decay 1e-6, batch 128, dropout 0.25, learning
// rate halved when validation loss plateaus and floored at 1e-8.
struct TrainConfig {
  double lr_init = 1e-6;
  int batch = 128;
  double weight_decay = 1e-6;
  double dropout = 0.25;
  int max_epochs = 100;
  int plateau_patience = 5;    // epochs without relative improvement before halving
  double plateau_rel = 1e-4;
  double lr_floor = 1e-8;
  int stop_patience = 12;      // epochs past the best before stopping
  uint64_t seed = 1;
  std::ostream* progress = nullptr;  // per-epoch stats when set

  void validate() const;       // throws std::invalid_argument
};

// Adam with L2-style weight decay folded into the gradient
// (g <- g + wd * p) and bias-corrected moments, beta = (0.9, 0.999).
class Adam {
 public:
  Adam(std::vector<ParamTensor*> params, double lr, double weight_decay = 0.0);

  void step();
  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

 private:
  std::vector<ParamTensor*> ps_;
  std::vector<std::vector<double>> m_, v_;
  int64_t t_ = 0;
  double lr_, wd_;
};

// Plateau-driven learning rate halving: the metric must improve by a relative
// margin within `patience` epochs, otherwise lr *= factor.
class PlateauHalver {
 public:
  PlateauHalver(double factor = 0.5, int patience = 5, double rel_threshold = 1e-4)
      : factor_(factor), patience_(patience), rel_(rel_threshold) {}

  // Returns the new lr after observing this epoch's validation metric.
  double step(double metric, double lr);

 private:
  double factor_;
  int patience_;
  double rel_;
  double best_ = 1e300;
  int bad_ = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double rmse_theta = 0.0;
  double pearson_theta = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  double best_val = 1e300;
  int best_epoch = -1;
};

// Per-sample loss 0.5 * |out - label|^2, batch-averaged; returns history and
// leaves the net at its final-epoch parameters.
TrainResult train_sismik(SismikNet& net, const WindowDataset& data, const TrainConfig& cfg);

// Validation metrics of a trained net on the dataset's validation split.
struct EvalStats {
  double loss = 0.0;
  double rmse_theta = 0.0;
  double pearson_theta = 0.0;
};
EvalStats eval_sismik(SismikNet& net, const WindowDataset& data, bool val_split_only = true);

// Softmax cross entropy over the non-excluded lines; excluded logits are
// treated as -inf. Returns the loss; *grad (if given) receives dloss/dlogits.
double masked_cross_entropy(const std::vector<double>& logits, const std::vector<uint8_t>& mask,
                            int target, std::vector<double>* grad);

struct DetectorTrainConfig {
  double lr = 2e-3;
  int batch = 64;
  int epochs = 60;
  uint64_t seed = 0;
};

// X: prepared signals (z-scored, excluded band zeroed), one per volume.
void train_detector(DetectorNet& net, const std::vector<std::vector<double>>& X,
                    const std::vector<int>& onsets, const std::vector<uint8_t>& mask,
                    const DetectorTrainConfig& cfg);

}  // namespace kmoc
