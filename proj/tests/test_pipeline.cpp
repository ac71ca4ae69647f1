#include <bit>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "kmoc/corpus.hpp"
#include "kmoc/detect.hpp"
#include "kmoc/fft.hpp"
#include "kmoc/io.hpp"
#include "kmoc/metrics.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/recon.hpp"
#include "kmoc/train.hpp"

using namespace kmoc;

TEST_CASE("sidecar recipe, manual pipeline, and combined-path correction agree" *
          doctest::timeout(600)) {
  MetaSidecar sc;
  sc.master_seed = 11;
  sc.n = 128;
  sc.phantom = PhantomSpec{"head", 11, 128, 0.92, 1.0};
  sc.coils = CoilSpec{4, 12, 0.45, 0.05};
  sc.speed_mode = "instant";
  sc.events = {{40, 2.5, 0.4, -0.3}};
  sc.trajectory = trajectory_from_events(sc.n, sc.events, sc.speed_mode);

  RImage img = build_phantom(sc.phantom);
  CoilSet coils = build_coils(sc.coils, sc.n);
  CImage combined = combine(corrupt(img, sc.trajectory, coils), coils);

  CImage resim = resimulate(sc);
  REQUIRE(resim.n == combined.n);
  for (size_t i = 0; i < combined.v.size(); ++i) {
    CHECK(resim.v[i].real() == combined.v[i].real());
    CHECK(resim.v[i].imag() == combined.v[i].imag());
  }

  CImage restored = correct_kspace(combined, sc.trajectory, 12);
  CImage corrupted_img = ifft2c(combined);
  double p_cor = psnr(img, corrupted_img);
  double p_res = psnr(img, restored);
  INFO("psnr corrupted ", p_cor, " restored ", p_res);
  CHECK(p_res > p_cor);
  CHECK(p_res >= 35.0);
  CHECK(ssim(img, restored) >= 0.95);
}

TEST_CASE("window corpus keeps lines before the transition motion free") {
  // The smooth onset ramps in from line - 1, so only rows up to line - 2 are
  // guaranteed clean in both speed modes.
  int n = 32, w = 7, line = 10, h = w / 2;
  PhantomBank bank = PhantomBank::make(n, 6, 3, 2);
  WindowDataset ds = gen_windows(bank, line, 40, 17, w, nullptr);
  REQUIRE(ds.count() == 40);

  for (size_t i = 0; i < ds.count(); ++i) {
    CImage clean = bank.corrupt_single_event(ds.phantom_id[i], line, 0.0, 0.0, 0.0, false);
    const float* win = ds.X.data() + i * ds.window_len();
    for (int r = 0; r + 1 < h; ++r) {
      int src = line - h + r;
      for (int c = 0; c < n; ++c) {
        float re = static_cast<float>(clean.at(src, c).real());
        float im = static_cast<float>(clean.at(src, c).imag());
        CHECK(std::bit_cast<uint32_t>(win[r * n + c]) == std::bit_cast<uint32_t>(re));
        CHECK(std::bit_cast<uint32_t>(win[static_cast<size_t>(w) * n + r * n + c]) ==
              std::bit_cast<uint32_t>(im));
      }
    }
  }
}

TEST_CASE("window labels stay within the sampling ranges") {
  int n = 32;
  PhantomBank bank = PhantomBank::make(n, 6, 3, 2);
  WindowDataset ds = gen_windows(bank, 10, 200, 29, 5, nullptr);
  int val = 0;
  for (size_t i = 0; i < ds.count(); ++i) {
    CHECK(std::abs(ds.Y[i][0]) < 10.0);
    CHECK(std::abs(ds.Y[i][1]) < 10.0);
    CHECK(std::abs(ds.Y[i][2]) < 10.0);
    CHECK(ds.phantom_id[i] >= 0);
    CHECK(ds.phantom_id[i] < bank.count());
    val += ds.is_val[i] ? 1 : 0;
    if (ds.is_val[i])
      CHECK(ds.phantom_id[i] >= static_cast<int>(0.8 * bank.count()));
  }
  CHECK(val > 0);
  CHECK(val < static_cast<int>(ds.count()));
}

TEST_CASE("a small detector run beats chance on held-out volumes" * doctest::timeout(600)) {
  int n = 64, band = 8;
  PhantomBank bank = PhantomBank::make(n, 8, 5, 2);
  auto vols = gen_detector_volumes(bank, 200, 5, 2, false, band);

  std::vector<std::vector<double>> X_train;
  std::vector<int> onset_train;
  std::vector<uint8_t> mask;
  for (const auto& v : vols)
    if (v.pid < 6) {
      X_train.push_back(prep_signal(v.s_half, band, &mask));
      onset_train.push_back(v.onset);
    }

  DetectorNet net = DetectorNet::make(n, 7);
  DetectorTrainConfig cfg;
  cfg.epochs = 50;
  cfg.seed = 7;
  train_detector(net, X_train, onset_train, mask, cfg);

  int hit = 0, total = 0;
  for (const auto& v : vols)
    if (v.pid >= 6 && std::abs(v.theta) >= 0.5) {
      Detection d = detect_onset(net, v.s_half, band);
      ++total;
      hit += std::abs(d.line - v.onset) <= 2 ? 1 : 0;
    }
  INFO("held-out hits ", hit, " of ", total);
  REQUIRE(total >= 20);
  CHECK(hit * 5 >= total * 3);
}

TEST_CASE("trajectory estimation respects the no-motion floors") {
  int n = 64;
  PhantomBank bank = PhantomBank::make(n, 4, 9, 2);
  LineEstimators est;
  est.w = 9;
  for (int line : {9, 19, 29, 39, 49, 59}) {
    est.nets[line] = SismikNet::make_scaled(n, 9, 13 + line, 8e-3);
    est.stats[line] = norm_stats(bank, line, 9);
  }

  CHECK(est.net_for(29) == 29);
  CHECK(est.net_for(32) == 29);
  CHECK(est.net_for(34) == 29);
  CHECK(est.net_for(35) == 39);

  CImage combined = bank.corrupt_single_event(0, 32, 3.0, 0.0, 0.0, false);
  MotionTrajectory lazy = estimate_trajectory(est, combined, 1e6, 1e6);
  REQUIRE(lazy.n() == n);
  for (int i = 0; i < n; ++i) CHECK(lazy.line[i].is_identity());

  MotionTrajectory eager = estimate_trajectory(est, combined, 0.0, 0.0);
  bool moved = false;
  for (int i = 0; i < n; ++i) moved = moved || !eager.line[i].is_identity();
  CHECK(moved);
}
