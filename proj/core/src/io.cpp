#include "kmoc/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kmoc/phantom.hpp"
#include "kmoc/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need swap helpers");

namespace kmoc {

using nlohmann::json;

size_t KRaw::count() const {
  size_t t = 1;
  for (uint32_t d : dims) t *= d;
  return dims.empty() ? 0 : t;
}

namespace {

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError(path + ": read failed");
  return bytes;
}

// Sequential reader over an in-memory file with position-diagnosed errors.
struct Cursor {
  const std::string& path;
  const std::vector<uint8_t>& b;
  size_t off = 0;

  void need(size_t k, const char* what) {
    if (off + k > b.size()) {
      std::ostringstream m;
      m << path << ": truncated reading " << what << " at byte " << off << ": expected " << k
        << " more bytes, got " << (b.size() - off);
      throw TruncationError(m.str());
    }
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v;
    std::memcpy(&v, b.data() + off, 4);
    off += 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v;
    std::memcpy(&v, b.data() + off, 8);
    off += 8;
    return v;
  }
  float f32(const char* what) {
    need(4, what);
    float v;
    std::memcpy(&v, b.data() + off, 4);
    off += 4;
    return v;
  }
  std::string str(const char* what) {
    uint32_t len = u32(what);
    if (len > (1u << 20)) throw IoError(path + ": implausible string length in " + what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(b.data() + off), len);
    off += len;
    return s;
  }
  void magic(const char* expect) {
    need(4, "magic");
    if (std::memcmp(b.data() + off, expect, 4) != 0) {
      std::ostringstream m;
      m << path << ": bad magic at byte 0, expected \"" << expect << "\"";
      throw MagicError(m.str());
    }
    off += 4;
  }
  void version(uint32_t supported) {
    uint32_t v = u32("format version");
    if (v != supported) {
      std::ostringstream m;
      m << path << ": unsupported format version " << v << " (supported: " << supported << ")";
      throw VersionError(m.str());
    }
  }
};

// Buffered little-endian writer; one flush, one error site.
struct Sink {
  std::string path;
  std::string buf;

  void raw(const void* p, size_t k) { buf.append(static_cast<const char*>(p), k); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void flush() {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path + ": cannot open for writing");
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    f.flush();
    if (!f.good()) throw IoError(path + ": write failed");
  }
};

constexpr uint32_t kKrawVersion = 1;
constexpr uint32_t kDtypeComplex64 = 1;
constexpr uint32_t kNetVersion = 1;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << text;
  f.flush();
  if (!f.good()) throw IoError(path + ": write failed");
}

json parse_json(const std::string& path) {
  auto bytes = slurp(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": not valid JSON");
  return j;
}

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(path + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace

KRaw read_kraw(const std::string& path) {
  auto bytes = slurp(path);
  Cursor c{path, bytes};
  c.magic("KMOC");
  c.version(kKrawVersion);
  uint32_t ndims = c.u32("ndims");
  if (ndims < 1 || ndims > 8) throw IoError(path + ": ndims " + std::to_string(ndims) + " out of range 1..8");
  KRaw raw;
  uint64_t total = 1;
  for (uint32_t i = 0; i < ndims; ++i) {
    uint32_t d = c.u32("dims");
    if (d == 0) throw IoError(path + ": zero-length dimension");
    total *= d;
    if (total > (1ull << 31)) throw IoError(path + ": element count overflow");
    raw.dims.push_back(d);
  }
  uint32_t dtype = c.u32("dtype tag");
  if (dtype != kDtypeComplex64)
    throw IoError(path + ": unsupported dtype tag " + std::to_string(dtype));

  uint64_t expected = 8 * total;
  uint64_t actual = bytes.size() - c.off;
  if (actual < expected) {
    std::ostringstream m;
    m << path << ": payload truncated: expected " << expected << " bytes, got " << actual;
    throw TruncationError(m.str());
  }
  if (actual > expected) {
    std::ostringstream m;
    m << path << ": " << (actual - expected) << " trailing bytes after payload";
    throw IoError(m.str());
  }
  raw.data.resize(total);
  std::memcpy(raw.data.data(), bytes.data() + c.off, expected);
  return raw;
}

void write_kraw(const std::string& path, const KRaw& raw) {
  if (raw.dims.empty() || raw.data.size() != raw.count())
    throw std::invalid_argument("KRaw dims/payload mismatch");
  Sink s{path};
  s.raw("KMOC", 4);
  s.u32(kKrawVersion);
  s.u32(static_cast<uint32_t>(raw.dims.size()));
  for (uint32_t d : raw.dims) s.u32(d);
  s.u32(kDtypeComplex64);
  s.raw(raw.data.data(), raw.data.size() * 8);
  s.flush();
}

KRaw to_kraw(const CImage& img) {
  KRaw raw;
  raw.dims = {static_cast<uint32_t>(img.n), static_cast<uint32_t>(img.n)};
  raw.data.reserve(img.size());
  for (const cplx& z : img.v)
    raw.data.emplace_back(static_cast<float>(z.real()), static_cast<float>(z.imag()));
  return raw;
}

KRaw to_kraw(const CoilImages& imgs) {
  if (imgs.empty()) throw std::invalid_argument("empty coil stack");
  KRaw raw;
  raw.dims = {static_cast<uint32_t>(imgs.size()), static_cast<uint32_t>(imgs[0].n),
              static_cast<uint32_t>(imgs[0].n)};
  for (const CImage& img : imgs) {
    if (img.n != imgs[0].n) throw std::invalid_argument("ragged coil stack");
    for (const cplx& z : img.v)
      raw.data.emplace_back(static_cast<float>(z.real()), static_cast<float>(z.imag()));
  }
  return raw;
}

CImage image_from_kraw(const KRaw& raw) {
  if (raw.dims.size() != 2 || raw.dims[0] != raw.dims[1])
    throw IoError("expected a square 2-d array, got ndims " + std::to_string(raw.dims.size()));
  CImage img(static_cast<int>(raw.dims[0]));
  for (size_t i = 0; i < raw.data.size(); ++i)
    img.v[i] = cplx(raw.data[i].real(), raw.data[i].imag());
  return img;
}

CoilImages coils_from_kraw(const KRaw& raw) {
  if (raw.dims.size() != 3 || raw.dims[1] != raw.dims[2])
    throw IoError("expected a coils x n x n array, got ndims " + std::to_string(raw.dims.size()));
  CoilImages out(raw.dims[0], CImage(static_cast<int>(raw.dims[1])));
  size_t per = static_cast<size_t>(raw.dims[1]) * raw.dims[2];
  for (size_t c = 0; c < out.size(); ++c)
    for (size_t i = 0; i < per; ++i) {
      const auto& z = raw.data[c * per + i];
      out[c].v[i] = cplx(z.real(), z.imag());
    }
  return out;
}

MetaSidecar read_sidecar(const std::string& path) {
  json j = parse_json(path);
  try {
    MetaSidecar sc;
    sc.master_seed = field(j, "master_seed", path).get<uint64_t>();
    sc.n = field(j, "grid_size", path).get<int>();
    sc.version = field(j, "software_version", path).get<std::string>();
    sc.speed_mode = field(j, "speed_mode", path).get<std::string>();
    sc.norm_map_ref = j.value("normalization_map", "");

    const json& p = field(j, "phantom", path);
    sc.phantom.kind = field(p, "kind", path).get<std::string>();
    sc.phantom.seed = field(p, "seed", path).get<uint64_t>();
    sc.phantom.n = field(p, "n", path).get<int>();
    sc.phantom.margin = field(p, "margin", path).get<double>();
    sc.phantom.smooth_px = field(p, "smooth_px", path).get<double>();

    const json& c = field(j, "coils", path);
    sc.coils.count = field(c, "count", path).get<int>();
    sc.coils.seed = field(c, "seed", path).get<uint64_t>();
    sc.coils.sigma_frac = field(c, "sigma_frac", path).get<double>();
    sc.coils.floor = field(c, "floor", path).get<double>();

    for (const json& e : field(j, "events", path)) {
      SidecarEvent ev;
      ev.line = field(e, "line", path).get<int>();
      ev.theta_deg = field(e, "theta_deg", path).get<double>();
      ev.tau_x = field(e, "tau_x", path).get<double>();
      ev.tau_y = field(e, "tau_y", path).get<double>();
      sc.events.push_back(ev);
    }

    const json& t = field(j, "trajectory", path);
    const json& th = field(t, "theta_deg", path);
    const json& tx = field(t, "tx", path);
    const json& ty = field(t, "ty", path);
    if (th.size() != static_cast<size_t>(sc.n) || tx.size() != th.size() || ty.size() != th.size())
      throw IoError(path + ": trajectory arrays must each have grid_size entries");
    sc.trajectory.line.resize(sc.n);
    for (int i = 0; i < sc.n; ++i) {
      sc.trajectory.line[i].theta_deg = th[i].get<double>();
      sc.trajectory.line[i].tx = tx[i].get<double>();
      sc.trajectory.line[i].ty = ty[i].get<double>();
    }
    return sc;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_sidecar(const std::string& path, const MetaSidecar& sc) {
  json j;
  j["master_seed"] = sc.master_seed;
  j["grid_size"] = sc.n;
  j["software_version"] = sc.version;
  j["speed_mode"] = sc.speed_mode;
  j["normalization_map"] = sc.norm_map_ref;
  j["phantom"] = {{"kind", sc.phantom.kind},
                  {"seed", sc.phantom.seed},
                  {"n", sc.phantom.n},
                  {"margin", sc.phantom.margin},
                  {"smooth_px", sc.phantom.smooth_px}};
  j["coils"] = {{"count", sc.coils.count},
                {"seed", sc.coils.seed},
                {"sigma_frac", sc.coils.sigma_frac},
                {"floor", sc.coils.floor}};
  j["events"] = json::array();
  for (const SidecarEvent& e : sc.events)
    j["events"].push_back({{"line", e.line},
                           {"theta_deg", e.theta_deg},
                           {"tau_x", e.tau_x},
                           {"tau_y", e.tau_y}});
  json th = json::array(), tx = json::array(), ty = json::array();
  for (const RigidMotion& m : sc.trajectory.line) {
    th.push_back(m.theta_deg);
    tx.push_back(m.tx);
    ty.push_back(m.ty);
  }
  j["trajectory"] = {{"theta_deg", th}, {"tx", tx}, {"ty", ty}};
  write_text(path, j.dump(2) + "\n");
}

RImage build_phantom(const PhantomSpec& spec) {
  EllipseSet es;
  if (spec.kind == "head") {
    es = head_ellipses(spec.n, spec.margin);
  } else if (spec.kind == "random") {
    Rng rng = derive_rng(spec.seed, "phantom");
    es = random_ellipses(spec.n, rng, spec.margin);
  } else {
    throw IoError("unknown phantom kind \"" + spec.kind + "\"");
  }
  RImage img = raster_phantom(es, spec.n);
  if (spec.smooth_px > 0.0) img = smooth_image(img, spec.smooth_px);
  return img;
}

CoilSet build_coils(const CoilSpec& spec, int n) {
  return CoilSet::make(spec.count, n, spec.seed, spec.sigma_frac, spec.floor);
}

MotionTrajectory trajectory_from_events(int n, const std::vector<SidecarEvent>& events,
                                        const std::string& speed_mode) {
  if (speed_mode != "instant" && speed_mode != "smooth3")
    throw IoError("unknown speed mode \"" + speed_mode + "\"");
  std::vector<int> onsets;
  std::vector<RigidMotion> states;
  for (const SidecarEvent& e : events) {
    onsets.push_back(e.line);
    states.push_back(motion_about_pivot(e.theta_deg, e.tau_x, e.tau_y));
  }
  return multi_event_trajectory(n, onsets, states, speed_mode == "smooth3");
}

CImage resimulate(const MetaSidecar& sc) {
  if (sc.trajectory.n() != sc.n) throw IoError("sidecar trajectory length != grid_size");
  if (sc.phantom.n != sc.n) throw IoError("sidecar phantom size != grid_size");
  RImage img = build_phantom(sc.phantom);
  CoilSet coils = build_coils(sc.coils, sc.n);
  return combine(corrupt(img, sc.trajectory, coils), coils);
}

void write_norm_stats(const std::string& path, const NormStats& st) {
  json j;
  j["w"] = st.w;
  j["n"] = st.n;
  j["line"] = st.line;
  j["mu"] = st.mu;
  j["sd"] = st.sd;
  write_text(path, j.dump() + "\n");
}

NormStats read_norm_stats(const std::string& path) {
  json j = parse_json(path);
  try {
    NormStats st;
    st.w = field(j, "w", path).get<int>();
    st.n = field(j, "n", path).get<int>();
    st.line = field(j, "line", path).get<int>();
    st.mu = field(j, "mu", path).get<std::vector<float>>();
    st.sd = field(j, "sd", path).get<std::vector<float>>();
    size_t expect = static_cast<size_t>(2) * st.w * st.n;
    if (st.mu.size() != expect || st.sd.size() != expect)
      throw IoError(path + ": mu/sd must each have 2*w*n entries");
    return st;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

namespace {

void save_params(const std::string& path, const std::string& tag, std::vector<ParamTensor*> ps) {
  Sink s{path};
  s.raw("KMNP", 4);
  s.u32(kNetVersion);
  s.str(tag);
  s.u32(static_cast<uint32_t>(ps.size()));
  uint64_t offset = 0;
  for (ParamTensor* p : ps) {
    s.str(p->name);
    s.u32(static_cast<uint32_t>(p->v.size()));
    s.u64(offset);
    offset += p->v.size();
  }
  for (ParamTensor* p : ps)
    for (size_t i = 0; i < p->v.size(); ++i) s.f32(static_cast<float>(p->gamma * p->v[i]));
  s.flush();
}

struct NetFile {
  std::string tag;
  std::vector<std::pair<std::string, uint32_t>> layers;
  std::vector<float> values;
};

NetFile read_params(const std::string& path) {
  auto bytes = slurp(path);
  Cursor c{path, bytes};
  c.magic("KMNP");
  c.version(kNetVersion);
  NetFile f;
  f.tag = c.str("architecture tag");
  uint32_t count = c.u32("layer count");
  if (count > 4096) throw IoError(path + ": implausible layer count");
  uint64_t total = 0;
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = c.str("layer name");
    uint32_t len = c.u32("layer length");
    uint64_t off = c.u64("layer offset");
    if (off != total) throw IoError(path + ": layer \"" + name + "\" offset out of order");
    total += len;
    f.layers.emplace_back(std::move(name), len);
  }
  uint64_t expected = 4 * total;
  uint64_t actual = bytes.size() - c.off;
  if (actual < expected) {
    std::ostringstream m;
    m << path << ": payload truncated: expected " << expected << " bytes, got " << actual;
    throw TruncationError(m.str());
  }
  if (actual > expected) throw IoError(path + ": trailing bytes after payload");
  f.values.resize(total);
  std::memcpy(f.values.data(), bytes.data() + c.off, expected);
  return f;
}

// Applies a parsed file onto a freshly built net whose params must match the
// layer table exactly.
void fill_params(const NetFile& f, const std::string& path, std::vector<ParamTensor*> ps) {
  if (ps.size() != f.layers.size())
    throw IoError(path + ": layer count mismatch for architecture " + f.tag);
  size_t at = 0;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i]->name != f.layers[i].first || ps[i]->v.size() != f.layers[i].second)
      throw IoError(path + ": layer table mismatch at \"" + f.layers[i].first + "\"");
    ps[i]->gamma = 1.0;
    for (size_t k = 0; k < ps[i]->v.size(); ++k) ps[i]->v[k] = f.values[at++];
    std::fill(ps[i]->g.begin(), ps[i]->g.end(), 0.0);
  }
}

int tag_int(const std::string& tag, const std::string& key, const std::string& path) {
  std::string needle = key + "=";
  size_t pos = tag.find(needle);
  if (pos == std::string::npos) throw IoError(path + ": architecture tag lacks " + key);
  return std::atoi(tag.c_str() + pos + needle.size());
}

}  // namespace

void save_net(const std::string& path, SismikNet& net) {
  std::ostringstream tag;
  tag << "sismik;n=" << net.n() << ";w=" << net.window_h();
  save_params(path, tag.str(), net.params());
}

void save_net(const std::string& path, DetectorNet& net) {
  std::ostringstream tag;
  tag << "detector;n=" << net.n();
  save_params(path, tag.str(), net.params());
}

SismikNet load_sismik(const std::string& path) {
  NetFile f = read_params(path);
  if (f.tag.rfind("sismik;", 0) != 0)
    throw IoError(path + ": architecture \"" + f.tag + "\" is not a sismik net");
  SismikNet net = SismikNet::make(tag_int(f.tag, "n", path), tag_int(f.tag, "w", path), 0);
  fill_params(f, path, net.params());
  return net;
}

DetectorNet load_detector(const std::string& path) {
  NetFile f = read_params(path);
  if (f.tag.rfind("detector;", 0) != 0)
    throw IoError(path + ": architecture \"" + f.tag + "\" is not a detector net");
  DetectorNet net = DetectorNet::make(tag_int(f.tag, "n", path), 0);
  fill_params(f, path, net.params());
  return net;
}

std::string net_arch(const std::string& path) {
  auto bytes = slurp(path);
  Cursor c{path, bytes};
  c.magic("KMNP");
  c.version(kNetVersion);
  return c.str("architecture tag");
}

}  // namespace kmoc
