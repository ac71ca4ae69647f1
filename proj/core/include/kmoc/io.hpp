#pragma once

#include <string>

#include "kmoc/coils.hpp"
#include "kmoc/corpus.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/nets.hpp"
#include "kmoc/types.hpp"

namespace kmoc {

inline constexpr const char* software_version = "0.1.0";

// Header-corruption causes, each its own kind; all derive IoError.
struct MagicError : IoError {
  using IoError::IoError;
};
struct VersionError : IoError {
  using IoError::IoError;
};
struct TruncationError : IoError {
  using IoError::IoError;
};

// Raw complex array file. Layout: magic "KMOC", u32 format version, u32 ndims,
// u32 per dimension, u32 dtype tag (1 = complex64), then the payload as
// row-major interleaved (re, im) float32. All integers little-endian.
struct KRaw {
  std::vector<uint32_t> dims;
  std::vector<std::complex<float>> data;

  size_t count() const;
};

KRaw read_kraw(const std::string& path);
void write_kraw(const std::string& path, const KRaw& raw);

KRaw to_kraw(const CImage& img);
KRaw to_kraw(const CoilImages& imgs);
CImage image_from_kraw(const KRaw& raw);
CoilImages coils_from_kraw(const KRaw& raw);

// Generative phantom description; enough to rebuild the image exactly.
struct PhantomSpec {
  std::string kind = "random";  // "random" | "head"
  uint64_t seed = 1;
  int n = 128;
  double margin = 0.95;
  double smooth_px = 0.0;  // 0 = hard-edged raster
};

struct CoilSpec {
  int count = 4;
  uint64_t seed = 1;
  double sigma_frac = 0.45;
  double floor = 0.05;
};

// One motion event: rotation about a pivot offset from the FOV center.
struct SidecarEvent {
  int line = 0;
  double theta_deg = 0.0;
  double tau_x = 0.0, tau_y = 0.0;
};

// Companion JSON for every simulation artifact. Carries the full recipe, so
// re-running it reproduces the KRaw byte-for-byte.
struct MetaSidecar {
  uint64_t master_seed = 1;
  int n = 0;
  PhantomSpec phantom;
  CoilSpec coils;
  std::string speed_mode = "instant";  // "instant" | "smooth3"
  std::vector<SidecarEvent> events;
  MotionTrajectory trajectory;
  std::string norm_map_ref;  // NormStats file path, "" if none
  std::string version = software_version;
};

MetaSidecar read_sidecar(const std::string& path);
void write_sidecar(const std::string& path, const MetaSidecar& sc);

RImage build_phantom(const PhantomSpec& spec);
CoilSet build_coils(const CoilSpec& spec, int n);
MotionTrajectory trajectory_from_events(int n, const std::vector<SidecarEvent>& events,
                                        const std::string& speed_mode);
// Re-run the corruption a sidecar describes; returns the combined k-space.
CImage resimulate(const MetaSidecar& sc);

void write_norm_stats(const std::string& path, const NormStats& st);
NormStats read_norm_stats(const std::string& path);

// Network snapshot file. Layout: magic "KMNP", u32 version, architecture tag
// string, layer table (name, length, float offset), float32 payload of the
// effective parameter values. Loading sets gamma = 1, so a loaded net saves
// back byte-identically and further save/load cycles leave inference bit-exact.
void save_net(const std::string& path, SismikNet& net);
void save_net(const std::string& path, DetectorNet& net);
SismikNet load_sismik(const std::string& path);
DetectorNet load_detector(const std::string& path);
std::string net_arch(const std::string& path);

}  // namespace kmoc
