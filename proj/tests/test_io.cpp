#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kmoc/fft.hpp"
#include "kmoc/io.hpp"
#include "kmoc/rng.hpp"

using namespace kmoc;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("kmoc_test_") + name;
}

std::string file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void put_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << bytes;
}

KRaw random_kraw(std::vector<uint32_t> dims, uint64_t seed) {
  KRaw raw;
  raw.dims = std::move(dims);
  Rng rng(seed);
  raw.data.resize(raw.count());
  for (auto& z : raw.data)
    z = {static_cast<float>(rng.normal()), static_cast<float>(rng.normal())};
  return raw;
}

}  // namespace

TEST_CASE("kraw write-read identity and rewrite gives identical bytes") {
  for (auto dims : std::vector<std::vector<uint32_t>>{{8, 8}, {3, 4, 4}, {5}}) {
    KRaw raw = random_kraw(dims, 7 + dims.size());
    auto p1 = tmp_path("a.kraw"), p2 = tmp_path("b.kraw");
    write_kraw(p1, raw);
    KRaw back = read_kraw(p1);
    CHECK(back.dims == raw.dims);
    REQUIRE(back.data.size() == raw.data.size());
    for (size_t i = 0; i < raw.data.size(); ++i) CHECK(back.data[i] == raw.data[i]);
    write_kraw(p2, back);
    CHECK(file_bytes(p1) == file_bytes(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
  }
}

TEST_CASE("kraw header corruption is diagnosed by kind") {
  KRaw raw = random_kraw({4, 4}, 3);
  auto p = tmp_path("hdr.kraw");
  write_kraw(p, raw);
  std::string good = file_bytes(p);

  SUBCASE("magic mismatch") {
    std::string bad = good;
    bad[0] = 'X';
    put_bytes(p, bad);
    CHECK_THROWS_AS(read_kraw(p), MagicError);
  }
  SUBCASE("unsupported version") {
    std::string bad = good;
    bad[4] = 9;
    put_bytes(p, bad);
    CHECK_THROWS_AS(read_kraw(p), VersionError);
  }
  SUBCASE("payload truncation names expected and actual byte counts") {
    put_bytes(p, good.substr(0, good.size() - 10));
    try {
      read_kraw(p);
      FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
      std::string msg = e.what();
      CHECK(msg.find("128") != std::string::npos);  // 4*4 complex64 = 128 bytes
      CHECK(msg.find("118") != std::string::npos);
    }
  }
  SUBCASE("header truncation") {
    put_bytes(p, good.substr(0, 6));
    CHECK_THROWS_AS(read_kraw(p), TruncationError);
  }
  SUBCASE("trailing bytes rejected") {
    put_bytes(p, good + "zz");
    CHECK_THROWS_AS(read_kraw(p), IoError);
  }
  std::remove(p.c_str());
}

TEST_CASE("kraw image and coil-stack conversions round-trip") {
  // Oracles compare one scalar component at a time through bit_cast. A fused
  // "cplx(float(re), float(im))" oracle is miscompiled by gcc 11 -O3: SLP
  // elides the narrowing pair, so the expected values keep full precision.
  Rng rng(11);
  CImage img(6);
  for (auto& z : img.v) z = {rng.normal(), rng.normal()};
  KRaw iraw = to_kraw(img);
  for (size_t i = 0; i < img.v.size(); ++i) {
    float er = static_cast<float>(img.v[i].real());
    float ei = static_cast<float>(img.v[i].imag());
    CHECK(std::bit_cast<uint32_t>(iraw.data[i].real()) == std::bit_cast<uint32_t>(er));
    CHECK(std::bit_cast<uint32_t>(iraw.data[i].imag()) == std::bit_cast<uint32_t>(ei));
  }
  CImage img2 = image_from_kraw(iraw);
  for (size_t i = 0; i < img.v.size(); ++i) {
    CHECK(img2.v[i].real() == static_cast<double>(iraw.data[i].real()));
    CHECK(img2.v[i].imag() == static_cast<double>(iraw.data[i].imag()));
  }

  CoilImages coils(3, CImage(5));
  for (auto& c : coils)
    for (auto& z : c.v) z = {rng.normal(), rng.normal()};
  KRaw craw = to_kraw(coils);
  CoilImages coils2 = coils_from_kraw(craw);
  REQUIRE(coils2.size() == coils.size());
  size_t per = coils[0].size();
  for (size_t c = 0; c < coils.size(); ++c)
    for (size_t i = 0; i < per; ++i) {
      float er = static_cast<float>(coils[c].v[i].real());
      CHECK(std::bit_cast<uint32_t>(craw.data[c * per + i].real()) == std::bit_cast<uint32_t>(er));
      CHECK(coils2[c].v[i].real() == static_cast<double>(craw.data[c * per + i].real()));
      CHECK(coils2[c].v[i].imag() == static_cast<double>(craw.data[c * per + i].imag()));
    }

  CHECK_THROWS_AS(image_from_kraw(random_kraw({3, 4}, 1)), IoError);
  CHECK_THROWS_AS(coils_from_kraw(random_kraw({4, 4}, 1)), IoError);
}

TEST_CASE("sidecar round-trips and re-simulation is bit-exact") {
  MetaSidecar sc;
  sc.master_seed = 271828182845904523ull;
  sc.n = 32;
  sc.phantom = {"random", 99, 32, 0.95, 1.0};
  sc.coils = {3, 55, 0.45, 0.05};
  sc.speed_mode = "smooth3";
  sc.events = {{9, 2.25, 14.5, -3.0}, {21, -1.0, 0.0, 6.5}};
  sc.trajectory = trajectory_from_events(
      sc.n, sc.events, sc.speed_mode);

  auto pj = tmp_path("sim.json"), pk1 = tmp_path("sim1.kraw"), pk2 = tmp_path("sim2.kraw");
  write_sidecar(pj, sc);
  MetaSidecar back = read_sidecar(pj);
  CHECK(back.master_seed == sc.master_seed);
  CHECK(back.n == sc.n);
  CHECK(back.phantom.kind == sc.phantom.kind);
  CHECK(back.phantom.seed == sc.phantom.seed);
  CHECK(back.phantom.smooth_px == sc.phantom.smooth_px);
  CHECK(back.coils.count == sc.coils.count);
  CHECK(back.speed_mode == sc.speed_mode);
  REQUIRE(back.events.size() == sc.events.size());
  CHECK(back.events[1].theta_deg == sc.events[1].theta_deg);
  REQUIRE(back.trajectory.n() == sc.n);
  for (int i = 0; i < sc.n; ++i) CHECK(back.trajectory.line[i] == sc.trajectory.line[i]);

  write_kraw(pk1, to_kraw(resimulate(sc)));
  write_kraw(pk2, to_kraw(resimulate(back)));
  CHECK(file_bytes(pk1) == file_bytes(pk2));

  std::remove(pj.c_str());
  std::remove(pk1.c_str());
  std::remove(pk2.c_str());
}

TEST_CASE("sidecar with a missing field is rejected with the field named") {
  auto p = tmp_path("bad.json");
  put_bytes(p, "{\"master_seed\": 1, \"grid_size\": 8}");
  try {
    read_sidecar(p);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("software_version") != std::string::npos);
  }
  put_bytes(p, "not json at all{");
  CHECK_THROWS_AS(read_sidecar(p), IoError);
  std::remove(p.c_str());
}

TEST_CASE("norm stats round-trip exactly") {
  NormStats st;
  st.w = 3;
  st.n = 4;
  st.line = 2;
  Rng rng(5);
  st.mu.resize(2 * 3 * 4);
  st.sd.resize(2 * 3 * 4);
  for (auto& v : st.mu) v = static_cast<float>(rng.normal());
  for (auto& v : st.sd) v = static_cast<float>(std::abs(rng.normal()) + 0.5);
  auto p = tmp_path("norm.json");
  write_norm_stats(p, st);
  NormStats back = read_norm_stats(p);
  CHECK(back.w == st.w);
  CHECK(back.line == st.line);
  CHECK(back.mu == st.mu);
  CHECK(back.sd == st.sd);
  std::remove(p.c_str());
}

TEST_CASE("net snapshots: save-load fixpoint and bit-exact inference") {
  SismikNet net = SismikNet::make_scaled(16, 5, 42, 1e-2);
  auto p1 = tmp_path("net1.kmnp"), p2 = tmp_path("net2.kmnp");
  save_net(p1, net);
  CHECK(net_arch(p1) == "sismik;n=16;w=5");

  SismikNet l1 = load_sismik(p1);
  save_net(p2, l1);
  CHECK(file_bytes(p1) == file_bytes(p2));

  SismikNet l2 = load_sismik(p2);
  Rng rng(7);
  Tensor3 win(2, 5, 16);
  for (auto& v : win.v) v = rng.normal();
  auto o1 = l1.forward(win, false, nullptr);
  auto o2 = l2.forward(win, false, nullptr);
  for (int k = 0; k < 3; ++k) CHECK(o1[k] == o2[k]);

  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("detector snapshots round-trip and reject wrong architecture") {
  DetectorNet net = DetectorNet::make(24, 9);
  auto p = tmp_path("det.kmnp");
  save_net(p, net);
  CHECK(net_arch(p) == "detector;n=24");

  DetectorNet back = load_detector(p);
  Rng rng(3);
  std::vector<double> sig(24);
  for (auto& v : sig) v = rng.normal();
  auto lo1 = net.forward(sig);
  auto lo2 = back.forward(sig);
  for (size_t i = 0; i < lo1.size(); ++i)
    CHECK(static_cast<float>(lo1[i]) == doctest::Approx(static_cast<float>(lo2[i])).epsilon(1e-6));

  CHECK_THROWS_AS(load_sismik(p), IoError);

  std::string good = file_bytes(p);
  put_bytes(p, good.substr(0, good.size() - 8));
  CHECK_THROWS_AS(load_detector(p), TruncationError);
  std::remove(p.c_str());
}
