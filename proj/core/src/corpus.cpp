#include "kmoc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "kmoc/fft.hpp"
#include "kmoc/motion.hpp"

namespace kmoc {

PhantomBank PhantomBank::make(int n, int count, uint64_t seed, int n_coils, double smooth_px) {
  PhantomBank bank;
  bank.n = n;
  bank.coils = CoilSet::make(n_coils, n, seed + 1);
  Rng rng = derive_rng(seed, "bank");
  bank.images.reserve(count);
  for (int i = 0; i < count; ++i) {
    RImage img = raster_phantom(random_ellipses(n, rng), n);
    if (smooth_px > 0.0) img = smooth_image(img, smooth_px);
    bank.images.push_back(std::move(img));
  }
  return bank;
}

CImage PhantomBank::corrupt_single_event(int idx, int onset, double theta_deg, double tau_x,
                                         double tau_y, bool smooth3, RigidMotion* residual) const {
  if (idx < 0 || idx >= count()) throw std::invalid_argument("bank: phantom index out of range");
  RigidMotion state = motion_about_pivot(theta_deg, tau_x, tau_y);
  if (residual) *residual = state;
  MotionTrajectory traj = step_trajectory(n, onset, state, smooth3);
  CoilImages per = corrupt(images[idx], traj, coils);
  return combine(per, coils);
}

void kspace_window(const CImage& k, int line, int w, Tensor3& out) {
  int n = k.n;
  int h = w / 2;
  if (line - h < 0 || line + h >= n) throw std::invalid_argument("window: line too close to edge");
  if (out.c != 2 || out.h != w || out.w != n) out = Tensor3(2, w, n);
  for (int r = 0; r < w; ++r) {
    for (int col = 0; col < n; ++col) {
      cplx v = k.at(line - h + r, col);
      out.at(0, r, col) = v.real();
      out.at(1, r, col) = v.imag();
    }
  }
}

NormStats norm_stats(const PhantomBank& bank, int line, int w) {
  NormStats st;
  st.w = w;
  st.n = bank.n;
  st.line = line;
  size_t len = static_cast<size_t>(2) * w * bank.n;
  std::vector<double> mean(len, 0.0), sq(len, 0.0);
  Tensor3 win;
  for (int i = 0; i < bank.count(); ++i) {
    CImage k = combine(coil_kspaces(bank.images[i], bank.coils), bank.coils);
    kspace_window(k, line, w, win);
    for (size_t j = 0; j < len; ++j) {
      mean[j] += win.v[j];
      sq[j] += win.v[j] * win.v[j];
    }
  }
  double inv = 1.0 / bank.count();
  st.mu.resize(len);
  st.sd.resize(len);
  double sd_sum = 0.0;
  std::vector<double> sd(len);
  for (size_t j = 0; j < len; ++j) {
    mean[j] *= inv;
    double var = std::max(0.0, sq[j] * inv - mean[j] * mean[j]);
    sd[j] = std::sqrt(var);
    sd_sum += sd[j];
  }
  double eps = 1e-8 * (sd_sum / len);
  for (size_t j = 0; j < len; ++j) {
    st.mu[j] = static_cast<float>(mean[j]);
    st.sd[j] = static_cast<float>(sd[j] + eps);
  }
  return st;
}

void WindowDataset::fill_window(size_t i, Tensor3& out) const {
  if (out.c != 2 || out.h != w || out.w != n) out = Tensor3(2, w, n);
  const float* src = X.data() + i * window_len();
  for (size_t j = 0; j < out.size(); ++j) out.v[j] = src[j];
}

WindowDataset gen_windows(const PhantomBank& bank, int line, size_t count, uint64_t seed, int w,
                          const NormStats* stats, double val_frac) {
  WindowDataset ds;
  ds.n = bank.n;
  ds.w = w;
  ds.line = line;
  ds.X.resize(count * ds.window_len());
  ds.Y.resize(count);
  ds.phantom_id.resize(count);
  ds.is_val.resize(count);

  int val_from = static_cast<int>(bank.count() * (1.0 - val_frac));
  double scale = bank.n / 256.0;
  Rng rng = derive_rng(seed, "windows");
  Tensor3 win;
  for (size_t i = 0; i < count; ++i) {
    int idx = rng.uniform_int(0, bank.count() - 1);
    double th = rng.normal() * 1.5;
    double taux = rng.uniform(-40.0, 40.0) * scale;
    double tauy = rng.uniform(-40.0, 40.0) * scale;
    bool sm = rng.uniform() < 0.5;
    RigidMotion res;
    CImage k = bank.corrupt_single_event(idx, line, th, taux, tauy, sm, &res);
    kspace_window(k, line, w, win);
    float* dst = ds.X.data() + i * ds.window_len();
    if (stats) {
      for (size_t j = 0; j < win.size(); ++j)
        dst[j] = static_cast<float>((win.v[j] - stats->mu[j]) / stats->sd[j]);
    } else {
      for (size_t j = 0; j < win.size(); ++j) dst[j] = static_cast<float>(win.v[j]);
    }
    ds.Y[i] = {th, res.tx, res.ty};
    ds.phantom_id[i] = idx;
    ds.is_val[i] = idx >= val_from ? 1 : 0;
  }
  return ds;
}

std::vector<DetectorVolume> gen_detector_volumes(const PhantomBank& bank, int count, uint64_t seed,
                                                 int slices_per_volume, bool grid, int band_half) {
  int n = bank.n;
  double scale = n / 256.0;
  Rng rng = derive_rng(seed, "det-cases");

  std::vector<std::pair<int, double>> cases;
  if (grid) {
    std::set<int> onset_set;
    for (int k = 0; k < 49; ++k) {
      int o = static_cast<int>(std::lround(10 * scale + k * 5 * scale));
      if (o >= 6 && o <= n - 7 && std::abs(o - n / 2) > band_half + 1) onset_set.insert(o);
    }
    const double angles[] = {0.0, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 2.0, 3.0, 4.0};
    for (int o : onset_set)
      for (double a : angles) cases.emplace_back(o, rng.uniform() < 0.5 ? a : -a);
    if (count > 0 && static_cast<int>(cases.size()) > count) cases.resize(count);
  } else {
    for (int i = 0; i < count; ++i) {
      int o;
      do {
        o = rng.uniform_int(6, n - 8);
      } while (std::abs(o - n / 2) <= band_half + 1);
      cases.emplace_back(o, rng.normal() * 1.5);
    }
  }

  std::vector<DetectorVolume> out(cases.size());
  for (size_t i = 0; i < cases.size(); ++i) {
    Rng r = derive_rng(seed, "det-vol", i);
    // distinct slices for one volume
    std::vector<int> ids(bank.count());
    for (int j = 0; j < bank.count(); ++j) ids[j] = j;
    for (int j = 0; j < slices_per_volume; ++j) {
      int pick = r.uniform_int(j, bank.count() - 1);
      std::swap(ids[j], ids[pick]);
    }

    auto [onset, theta] = cases[i];
    std::vector<CImage> slices;
    slices.reserve(slices_per_volume);
    double taux = r.uniform(-40.0, 40.0) * scale;
    double tauy = r.uniform(-40.0, 40.0) * scale;
    bool sm = r.uniform() < 0.5;
    for (int j = 0; j < slices_per_volume; ++j)
      slices.push_back(bank.corrupt_single_event(ids[j], onset, theta, taux, tauy, sm));

    RImage M = slice_averaged_magnitude(slices);
    out[i].s_half = quasinorm_signal(M, 0.5, band_half).values;
    out[i].s_two = quasinorm_signal(M, 2.0, band_half).values;
    out[i].onset = onset;
    out[i].theta = theta;
    out[i].pid = ids[0];
  }
  return out;
}

}  // namespace kmoc
