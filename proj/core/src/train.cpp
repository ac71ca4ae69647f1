#include "kmoc/train.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "kmoc/metrics.hpp"

namespace kmoc {

void TrainConfig::validate() const {
  if (lr_init <= 0 || batch <= 0 || weight_decay < 0 || dropout <= 0 || max_epochs <= 0 ||
      plateau_patience <= 0 || plateau_rel <= 0 || lr_floor <= 0 || stop_patience <= 0)
    throw std::invalid_argument("train config: all fields must be positive");
  if (lr_init > 1e-3) throw std::invalid_argument("train config: lr_init above 1e-3 diverges");
}

Adam::Adam(std::vector<ParamTensor*> params, double lr, double weight_decay)
    : ps_(std::move(params)), lr_(lr), wd_(weight_decay) {
  m_.reserve(ps_.size());
  v_.reserve(ps_.size());
  for (const ParamTensor* p : ps_) {
    m_.emplace_back(p->v.size(), 0.0);
    v_.emplace_back(p->v.size(), 0.0);
  }
}

void Adam::step() {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++t_;
  double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (size_t i = 0; i < ps_.size(); ++i) {
    ParamTensor& p = *ps_[i];
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (size_t j = 0; j < p.v.size(); ++j) {
      double g = p.g[j] + wd_ * p.v[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      p.v[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps);
    }
  }
}

double PlateauHalver::step(double metric, double lr) {
  if (metric < best_ * (1.0 - rel_)) {
    best_ = metric;
    bad_ = 0;
  } else {
    ++bad_;
  }
  if (bad_ > patience_) {
    lr *= factor_;
    bad_ = 0;
  }
  return lr;
}

EvalStats eval_sismik(SismikNet& net, const WindowDataset& data, bool val_split_only) {
  std::vector<double> pred, truth;
  double loss = 0.0;
  size_t used = 0;
  Tensor3 win;
  for (size_t i = 0; i < data.count(); ++i) {
    if (val_split_only && !data.is_val[i]) continue;
    data.fill_window(i, win);
    auto out = net.forward(win, false, nullptr);
    double l = 0.0;
    for (int k = 0; k < 3; ++k) {
      double d = out[k] - data.Y[i][k];
      l += 0.5 * d * d;
    }
    loss += l;
    pred.push_back(out[0]);
    truth.push_back(data.Y[i][0]);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("eval: empty split");
  EvalStats ev;
  ev.loss = loss / used;
  ev.rmse_theta = rmse(pred, truth);
  ev.pearson_theta = pearson(pred, truth);
  return ev;
}

TrainResult train_sismik(SismikNet& net, const WindowDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  std::vector<size_t> tr;
  for (size_t i = 0; i < data.count(); ++i)
    if (!data.is_val[i]) tr.push_back(i);
  if (tr.empty() || tr.size() == data.count())
    throw std::invalid_argument("train: empty train or validation split");

  net.set_dropout(cfg.dropout);
  Adam opt(net.params(), cfg.lr_init, cfg.weight_decay);
  PlateauHalver sched(0.5, cfg.plateau_patience, cfg.plateau_rel);
  Rng rng = derive_rng(cfg.seed, "train");
  double lr = cfg.lr_init;

  TrainResult res;
  Tensor3 win;
  for (int ep = 0; ep < cfg.max_epochs; ++ep) {
    for (size_t i = tr.size(); i > 1; --i)
      std::swap(tr[i - 1], tr[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

    double tl = 0.0;
    for (size_t s = 0; s < tr.size(); s += cfg.batch) {
      size_t e = std::min(s + cfg.batch, tr.size());
      double bs = static_cast<double>(e - s);
      net.zero_grad();
      for (size_t i = s; i < e; ++i) {
        data.fill_window(tr[i], win);
        auto out = net.forward(win, true, &rng);
        std::array<double, 3> g;
        for (int k = 0; k < 3; ++k) {
          double d = out[k] - data.Y[tr[i]][k];
          tl += 0.5 * d * d;
          g[k] = d / bs;
        }
        net.backward(g);
      }
      opt.set_lr(lr);
      opt.step();
    }
    tl /= tr.size();

    EvalStats ev = eval_sismik(net, data, true);
    lr = sched.step(ev.loss, lr);
    res.history.push_back({ep, tl, ev.loss, ev.rmse_theta, ev.pearson_theta, lr});
    if (cfg.progress)
      *cfg.progress << "epoch " << ep << " train " << tl << " val " << ev.loss << " rmse_theta "
                    << ev.rmse_theta << " r_theta " << ev.pearson_theta << " lr " << lr
                    << std::endl;
    if (ev.loss < res.best_val * (1.0 - cfg.plateau_rel)) {
      res.best_val = ev.loss;
      res.best_epoch = ep;
    }
    if (ep - res.best_epoch > cfg.stop_patience || lr < cfg.lr_floor) break;
  }
  return res;
}

double masked_cross_entropy(const std::vector<double>& logits, const std::vector<uint8_t>& mask,
                            int target, std::vector<double>* grad) {
  if (logits.size() != mask.size()) throw std::invalid_argument("ce: mask length mismatch");
  if (target < 0 || target >= static_cast<int>(logits.size()) || !mask[target])
    throw std::invalid_argument("ce: target outside the allowed lines");
  double m = -1e300;
  for (size_t i = 0; i < logits.size(); ++i)
    if (mask[i]) m = std::max(m, logits[i]);
  double z = 0.0;
  for (size_t i = 0; i < logits.size(); ++i)
    if (mask[i]) z += std::exp(logits[i] - m);
  double logz = m + std::log(z);
  if (grad) {
    grad->assign(logits.size(), 0.0);
    for (size_t i = 0; i < logits.size(); ++i)
      if (mask[i]) (*grad)[i] = std::exp(logits[i] - logz);
    (*grad)[target] -= 1.0;
  }
  return logz - logits[target];
}

void train_detector(DetectorNet& net, const std::vector<std::vector<double>>& X,
                    const std::vector<int>& onsets, const std::vector<uint8_t>& mask,
                    const DetectorTrainConfig& cfg) {
  if (X.size() != onsets.size() || X.empty())
    throw std::invalid_argument("detector train: bad dataset");
  Adam opt(net.params(), cfg.lr, 0.0);
  Rng rng = derive_rng(cfg.seed, "det-train");
  std::vector<size_t> idx(X.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  std::vector<double> grad;
  for (int ep = 0; ep < cfg.epochs; ++ep) {
    for (size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    for (size_t s = 0; s < idx.size(); s += cfg.batch) {
      size_t e = std::min(s + cfg.batch, idx.size());
      double bs = static_cast<double>(e - s);
      net.zero_grad();
      for (size_t i = s; i < e; ++i) {
        auto logits = net.forward(X[idx[i]]);
        masked_cross_entropy(logits, mask, onsets[idx[i]], &grad);
        for (double& g : grad) g /= bs;
        net.backward(grad);
      }
      opt.step();
    }
  }
}

}  // namespace kmoc
