#include "kmoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmoc {

namespace {

RImage magnitude(const CImage& a) {
  RImage m(a.n);
  for (size_t i = 0; i < m.size(); ++i) m.v[i] = std::abs(a.v[i]);
  return m;
}

// valid-mode correlation with a separable Gaussian window
std::vector<double> gauss_kernel(int sz, double sigma) {
  std::vector<double> g(sz);
  double sum = 0;
  for (int i = 0; i < sz; ++i) {
    double r = i - sz / 2;
    g[i] = std::exp(-r * r / (2 * sigma * sigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

RImage conv_valid(const RImage& a, const std::vector<double>& k) {
  int n = a.n, sz = static_cast<int>(k.size());
  int m = n - sz + 1;
  // horizontal pass
  Arr2<double> tmp(n);  // rows full, cols valid (packed into left m entries)
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) {
      double acc = 0;
      for (int i = 0; i < sz; ++i) acc += a.at(r, c + i) * k[i];
      tmp.at(r, c) = acc;
    }
  RImage out(m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      double acc = 0;
      for (int i = 0; i < sz; ++i) acc += tmp.at(r + i, c) * k[i];
      out.at(r, c) = acc;
    }
  return out;
}

double psnr_mag(const RImage& ref, const RImage& test) {
  double mse = 0, peak = 0;
  for (size_t i = 0; i < ref.size(); ++i) {
    double d = ref.v[i] - test.v[i];
    mse += d * d;
    peak = std::max(peak, ref.v[i]);
  }
  mse /= static_cast<double>(ref.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(peak / std::sqrt(mse));
}

double ssim_mag(const RImage& ref, const RImage& test) {
  constexpr double K1 = 0.01, K2 = 0.03;
  double L = 0;
  for (double v : ref.v) L = std::max(L, v);
  double C1 = K1 * L * K1 * L, C2 = K2 * L * K2 * L;
  auto k = gauss_kernel(11, 1.5);
  RImage mu1 = conv_valid(ref, k), mu2 = conv_valid(test, k);
  RImage rr(ref.n), tt(ref.n), rt(ref.n);
  for (size_t i = 0; i < ref.size(); ++i) {
    rr.v[i] = ref.v[i] * ref.v[i];
    tt.v[i] = test.v[i] * test.v[i];
    rt.v[i] = ref.v[i] * test.v[i];
  }
  RImage s11 = conv_valid(rr, k), s22 = conv_valid(tt, k), s12 = conv_valid(rt, k);
  double acc = 0;
  for (size_t i = 0; i < mu1.size(); ++i) {
    double m1 = mu1.v[i], m2 = mu2.v[i];
    double v1 = s11.v[i] - m1 * m1;
    double v2 = s22.v[i] - m2 * m2;
    double cv = s12.v[i] - m1 * m2;
    acc += ((2 * m1 * m2 + C1) * (2 * cv + C2)) / ((m1 * m1 + m2 * m2 + C1) * (v1 + v2 + C2));
  }
  return acc / static_cast<double>(mu1.size());
}

}  // namespace

double psnr(const CImage& ref, const CImage& test) { return psnr_mag(magnitude(ref), magnitude(test)); }

double psnr(const RImage& ref, const CImage& test) {
  RImage r(ref.n);
  for (size_t i = 0; i < r.size(); ++i) r.v[i] = std::fabs(ref.v[i]);
  return psnr_mag(r, magnitude(test));
}

double ssim(const CImage& ref, const CImage& test) { return ssim_mag(magnitude(ref), magnitude(test)); }

double ssim(const RImage& ref, const CImage& test) {
  RImage r(ref.n);
  for (size_t i = 0; i < r.size(); ++i) r.v[i] = std::fabs(ref.v[i]);
  return ssim_mag(r, magnitude(test));
}

double entropy(const CImage& img, int bins) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> a(img.size());
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = std::abs(img.v[i]);
    lo = std::min(lo, a[i]);
    hi = std::max(hi, a[i]);
  }
  if (hi == lo) return 0.0;
  std::vector<double> cnt(bins, 0.0);
  double scale = bins / (hi - lo);
  for (double v : a) {
    int idx = std::min(static_cast<int>((v - lo) * scale), bins - 1);
    cnt[idx] += 1.0;
  }
  double H = 0.0, N = static_cast<double>(a.size());
  for (double c : cnt)
    if (c > 0) {
      double p = c / N;
      H -= p * std::log(p);
    }
  return H;
}

double info_gain(const CImage& corrupted, const CImage& restored) {
  return entropy(corrupted) - entropy(restored);
}

RocCurve roc_curve(const std::vector<double>& sp, const std::vector<double>& sn, int n_thresholds) {
  if (sp.empty() || sn.empty()) throw std::invalid_argument("roc_curve: empty score list");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : sp) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : sn) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  lo -= 1e-9;
  hi += 1e-9;
  RocCurve rc;
  rc.points.reserve(n_thresholds);
  for (int i = 0; i < n_thresholds; ++i) {
    double t = lo + (hi - lo) * i / (n_thresholds - 1);
    double tp = 0, fp = 0;
    for (double v : sp) tp += (v >= t);
    for (double v : sn) fp += (v >= t);
    rc.points.push_back({fp / sn.size(), tp / sp.size()});
  }
  std::sort(rc.points.begin(), rc.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
  double auc = 0.0;
  for (size_t i = 1; i < rc.points.size(); ++i)
    auc += (rc.points[i].fpr - rc.points[i - 1].fpr) * (rc.points[i].tpr + rc.points[i - 1].tpr) / 2;
  auc += rc.points.front().fpr * rc.points.front().tpr / 2;  // close to the origin
  rc.auc = auc;
  return rc;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double num = 0, da = 0, db = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / (std::sqrt(da) * std::sqrt(db) + 1e-300);
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0;
  for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / a.size());
}

}  // namespace kmoc
