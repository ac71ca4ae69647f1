// Command-line front end: simulation, detection, estimation, correction,
// evaluation, and plotting around the kmoc library.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kmoc/coils.hpp"
#include "kmoc/corpus.hpp"
#include "kmoc/detect.hpp"
#include "kmoc/fft.hpp"
#include "kmoc/io.hpp"
#include "kmoc/metrics.hpp"
#include "kmoc/motion.hpp"
#include "kmoc/phantom.hpp"
#include "kmoc/plot.hpp"
#include "kmoc/quasinorm.hpp"
#include "kmoc/recon.hpp"
#include "kmoc/rng.hpp"
#include "kmoc/train.hpp"
#include "kmoc/types.hpp"

using namespace kmoc;
using nlohmann::json;

namespace {

struct Global {
  uint64_t seed = 1;
  int threads = 0;
  bool deterministic = false;
  std::string config;
};

CImage complex_image(const RImage& img) {
  CImage out(img.n);
  for (size_t i = 0; i < img.size(); ++i) out.v[i] = img.v[i];
  return out;
}

SidecarEvent parse_event(const std::string& s) {
  SidecarEvent e;
  std::istringstream in(s);
  std::string tok;
  std::vector<double> f;
  while (std::getline(in, tok, ':')) f.push_back(std::stod(tok));
  if (f.size() < 2 || f.size() > 4)
    throw std::invalid_argument("event must be line:theta[:taux[:tauy]], got \"" + s + "\"");
  e.line = static_cast<int>(f[0]);
  e.theta_deg = f[1];
  e.tau_x = f.size() > 2 ? f[2] : 0.0;
  e.tau_y = f.size() > 3 ? f[3] : 0.0;
  return e;
}

void write_trajectory_json(const std::string& path, const MotionTrajectory& traj) {
  json th = json::array(), tx = json::array(), ty = json::array();
  for (const RigidMotion& m : traj.line) {
    th.push_back(m.theta_deg);
    tx.push_back(m.tx);
    ty.push_back(m.ty);
  }
  json j = {{"theta_deg", th}, {"tx", tx}, {"ty", ty}};
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << j.dump(2) << "\n";
  if (!f.good()) throw IoError(path + ": write failed");
}

MotionTrajectory read_trajectory_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": not valid JSON");
  try {
    const json &th = j.at("theta_deg"), &tx = j.at("tx"), &ty = j.at("ty");
    if (th.size() != tx.size() || th.size() != ty.size())
      throw IoError(path + ": trajectory arrays differ in length");
    MotionTrajectory traj;
    traj.line.resize(th.size());
    for (size_t i = 0; i < th.size(); ++i) {
      traj.line[i].theta_deg = th[i].get<double>();
      traj.line[i].tx = tx[i].get<double>();
      traj.line[i].ty = ty[i].get<double>();
    }
    return traj;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << j.dump(2) << "\n";
  if (!f.good()) throw IoError(path + ": write failed");
}

// Applies --config JSON: keys under "global" and under each subcommand name
// override option defaults; explicit command-line values win.
void apply_config(CLI::App& app, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  json cfg = json::parse(f, nullptr, false);
  if (cfg.is_discarded()) throw IoError(path + ": not valid JSON");

  auto apply = [](CLI::App* cmd, const json& section) {
    for (auto it = section.begin(); it != section.end(); ++it) {
      CLI::Option* opt = cmd->get_option_no_throw("--" + it.key());
      if (opt == nullptr)
        throw std::invalid_argument("config key \"" + it.key() + "\" matches no option of " +
                                    cmd->get_name());
      if (opt->count() > 0) continue;
      std::vector<std::string> vals;
      if (it.value().is_array()) {
        for (const json& v : it.value())
          vals.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (it.value().is_string()) {
        vals.push_back(it.value().get<std::string>());
      } else if (it.value().is_boolean()) {
        vals.push_back(it.value().get<bool>() ? "true" : "false");
      } else {
        vals.push_back(it.value().dump());
      }
      opt->add_result(vals);
      opt->run_callback();
    }
  };

  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "global") {
      apply(&app, it.value());
      continue;
    }
    CLI::App* sub = app.get_subcommand_no_throw(it.key());
    if (sub == nullptr) throw std::invalid_argument("config section \"" + it.key() + "\" matches no subcommand");
    apply(sub, it.value());
  }
}

void history_outputs(const std::string& prefix, const TrainResult& res) {
  PlotSpec spec;
  spec.title = "training history";
  spec.xlabel = "epoch";
  spec.ylabel = "loss";
  Series tr{"train_loss", {}, {}, false}, va{"val_loss", {}, {}, false};
  for (const EpochStats& e : res.history) {
    tr.x.push_back(e.epoch);
    tr.y.push_back(e.train_loss);
    va.x.push_back(e.epoch);
    va.y.push_back(e.val_loss);
  }
  spec.series = {tr, va};
  write_csv(prefix + ".csv", spec);
  write_svg(prefix + ".svg", spec);
}

struct DetectorData {
  std::vector<std::vector<double>> X;
  std::vector<int> onsets;
  std::vector<double> theta;
  std::vector<int> pid;
  std::vector<uint8_t> mask;
};

DetectorData prep_volumes(const std::vector<DetectorVolume>& vols, bool use_p_two, int band) {
  DetectorData d;
  for (const DetectorVolume& v : vols) {
    const std::vector<double>& s = use_p_two ? v.s_two : v.s_half;
    std::vector<uint8_t> m;
    d.X.push_back(prep_signal(s, band, &m));
    d.mask = m;
    d.onsets.push_back(v.onset);
    d.theta.push_back(v.theta);
    d.pid.push_back(v.pid);
  }
  return d;
}

// ---- subcommand actions ----

struct PhantomArgs {
  int n = 128;
  std::string kind = "random";
  uint64_t pseed = 0;  // 0 = master seed
  double margin = 0.95, smooth = 0.0;
  std::string out, sidecar;
};

void run_phantom(const Global& g, const PhantomArgs& a) {
  PhantomSpec ps{a.kind, a.pseed ? a.pseed : g.seed, a.n, a.margin, a.smooth};
  RImage img = build_phantom(ps);
  write_kraw(a.out, to_kraw(complex_image(img)));
  MetaSidecar sc;
  sc.master_seed = g.seed;
  sc.n = a.n;
  sc.phantom = ps;
  sc.coils = CoilSpec{1, g.seed, 0.45, 0.05};
  sc.trajectory = MotionTrajectory::identity(a.n);
  write_sidecar(a.sidecar.empty() ? a.out + ".json" : a.sidecar, sc);
}

struct SimulateArgs {
  int n = 128;
  std::string kind = "random";
  uint64_t pseed = 0, cseed = 0;
  double margin = 0.95, smooth = 0.0;
  int coils = 4;
  double sigma_frac = 0.45, floor = 0.05;
  std::vector<std::string> events;
  std::string speed = "instant";
  std::string out, sidecar, per_coil, from_sidecar;
};

void run_simulate(const Global& g, const SimulateArgs& a) {
  MetaSidecar sc;
  if (!a.from_sidecar.empty()) {
    sc = read_sidecar(a.from_sidecar);
  } else {
    sc.master_seed = g.seed;
    sc.n = a.n;
    sc.phantom = PhantomSpec{a.kind, a.pseed ? a.pseed : g.seed, a.n, a.margin, a.smooth};
    sc.coils = CoilSpec{a.coils, a.cseed ? a.cseed : g.seed + 1, a.sigma_frac, a.floor};
    sc.speed_mode = a.speed;
    for (const std::string& e : a.events) sc.events.push_back(parse_event(e));
    sc.trajectory = trajectory_from_events(a.n, sc.events, sc.speed_mode);
  }
  RImage img = build_phantom(sc.phantom);
  CoilSet coils = build_coils(sc.coils, sc.n);
  CoilImages per = corrupt(img, sc.trajectory, coils);
  CImage combined = combine(per, coils);
  if (!all_finite(combined)) throw NumericError("simulation produced non-finite k-space");
  write_kraw(a.out, to_kraw(combined));
  if (!a.per_coil.empty()) write_kraw(a.per_coil, to_kraw(per));
  write_sidecar(a.sidecar.empty() ? a.out + ".json" : a.sidecar, sc);
}

struct DatasetArgs {
  int n = 64, window = 9, line = 48, count = 1000, bank = 300, coils = 4;
  double smooth = 0.0;
  std::string out_prefix;
};

void run_dataset(const Global& g, const DatasetArgs& a) {
  PhantomBank bank = PhantomBank::make(a.n, a.bank, g.seed, a.coils, a.smooth);
  NormStats stats = norm_stats(bank, a.line, a.window);
  WindowDataset ds = gen_windows(bank, a.line, a.count, g.seed, a.window, &stats);

  write_norm_stats(a.out_prefix + ".norm.json", stats);

  KRaw raw;
  raw.dims = {static_cast<uint32_t>(ds.count()), static_cast<uint32_t>(a.window),
              static_cast<uint32_t>(a.n)};
  raw.data.resize(raw.count());
  size_t plane = static_cast<size_t>(a.window) * a.n;
  for (int i = 0; i < ds.count(); ++i) {
    const float* re = ds.X.data() + static_cast<size_t>(i) * 2 * plane;
    const float* im = re + plane;
    for (size_t k = 0; k < plane; ++k) raw.data[i * plane + k] = {re[k], im[k]};
  }
  write_kraw(a.out_prefix + ".windows.kraw", raw);

  json th = json::array(), tx = json::array(), ty = json::array(), pid = json::array(),
       val = json::array();
  for (int i = 0; i < ds.count(); ++i) {
    th.push_back(ds.Y[i][0]);
    tx.push_back(ds.Y[i][1]);
    ty.push_back(ds.Y[i][2]);
    pid.push_back(ds.phantom_id[i]);
    val.push_back(static_cast<bool>(ds.is_val[i]));
  }
  write_json_file(a.out_prefix + ".labels.json",
                  json{{"n", a.n},
                       {"w", a.window},
                       {"line", a.line},
                       {"theta_deg", th},
                       {"tx", tx},
                       {"ty", ty},
                       {"phantom_id", pid},
                       {"is_val", val}});
  std::cout << "dataset: " << ds.count() << " windows at line " << a.line << "\n";
}

struct TrainEstArgs {
  int n = 64, window = 9, line = 48, samples = 30000, bank = 300, coils = 4;
  int epochs = 100, batch = 128;
  double lr = 1e-6, weight_decay = 1e-6, dropout = 0.25, raw_std = 8e-3;
  std::string out, norm_out, history;
};

void run_train_estimator(const Global& g, const TrainEstArgs& a) {
  PhantomBank bank = PhantomBank::make(a.n, a.bank, g.seed, a.coils);
  NormStats stats = norm_stats(bank, a.line, a.window);
  WindowDataset ds = gen_windows(bank, a.line, a.samples, g.seed, a.window, &stats);

  SismikNet net = SismikNet::make_scaled(a.n, a.window, g.seed, a.raw_std);
  TrainConfig cfg;
  cfg.lr_init = a.lr;
  cfg.batch = a.batch;
  cfg.weight_decay = a.weight_decay;
  cfg.dropout = a.dropout;
  cfg.max_epochs = a.epochs;
  cfg.seed = g.seed;
  cfg.progress = &std::cout;
  TrainResult res = train_sismik(net, ds, cfg);

  save_net(a.out, net);
  if (!a.norm_out.empty()) write_norm_stats(a.norm_out, stats);
  if (!a.history.empty()) history_outputs(a.history, res);
  const EpochStats& last = res.history.back();
  std::cout << "train-estimator: line " << a.line << " best_val " << res.best_val << " at epoch "
            << res.best_epoch << "; final rmse_theta " << last.rmse_theta << " pearson_theta "
            << last.pearson_theta << "\n";
}

struct TrainDetArgs {
  int n = 64, volumes = 2800, slices = 8, bank = 16, coils = 4, band = 8;
  int epochs = 120, batch = 64;
  double lr = 2e-3;
  std::string out, history;
};

void run_train_detector(const Global& g, const TrainDetArgs& a) {
  PhantomBank bank = PhantomBank::make(a.n, a.bank, g.seed, a.coils);
  auto vols = gen_detector_volumes(bank, a.volumes, g.seed, a.slices, false, a.band);
  DetectorData d = prep_volumes(vols, false, a.band);

  int hold_from = static_cast<int>(std::ceil(0.8 * a.bank));
  std::vector<std::vector<double>> Xtr;
  std::vector<int> otr;
  for (size_t i = 0; i < d.X.size(); ++i)
    if (d.pid[i] < hold_from) {
      Xtr.push_back(d.X[i]);
      otr.push_back(d.onsets[i]);
    }

  DetectorNet net = DetectorNet::make(a.n, g.seed);
  DetectorTrainConfig cfg;
  cfg.lr = a.lr;
  cfg.batch = a.batch;
  cfg.epochs = a.epochs;
  cfg.seed = g.seed;
  train_detector(net, Xtr, otr, d.mask, cfg);
  save_net(a.out, net);

  int hits = 0, total = 0;
  for (size_t i = 0; i < d.X.size(); ++i) {
    if (d.pid[i] < hold_from || std::abs(d.theta[i]) < 0.5) continue;
    auto logits = net.forward(d.X[i]);
    int best = -1;
    for (size_t j = 0; j < logits.size(); ++j)
      if (d.mask[j] && (best < 0 || logits[j] > logits[best])) best = static_cast<int>(j);
    ++total;
    if (std::abs(best - d.onsets[i]) <= 2) ++hits;
  }
  std::cout << "train-detector: " << Xtr.size() << " train volumes; held-out top-1 within 2 lines "
            << hits << "/" << total << "\n";
}

struct DetectArgs {
  std::vector<std::string> inputs;
  std::string net, out;
  int band = 8;
};

void run_detect(const Global&, const DetectArgs& a) {
  std::vector<CImage> slices;
  for (const std::string& p : a.inputs) slices.push_back(image_from_kraw(read_kraw(p)));
  RImage mag = slice_averaged_magnitude(slices);
  QuasinormSignal sig = quasinorm_signal(mag, 0.5, a.band);
  DetectorNet net = load_detector(a.net);
  Detection det = detect_onset(net, sig.values, a.band);
  json j = {{"onset_line", det.line},
            {"confidence", det.confidence},
            {"degradation_score", det.score},
            {"quasinorm_p", sig.p},
            {"band_half", sig.band_half},
            {"quasinorm", sig.values}};
  if (!a.out.empty()) write_json_file(a.out, j);
  std::cout << j.dump(2) << "\n";
}

struct EstimateArgs {
  std::string in, out;
  std::vector<std::string> nets;  // line:net.kmnp:stats.json
  int reach = 5;
  double theta_floor = 0.3, trans_floor = 0.2;
};

void run_estimate(const Global&, const EstimateArgs& a) {
  LineEstimators est;
  est.reach = a.reach;
  for (const std::string& spec : a.nets) {
    size_t c1 = spec.find(':');
    size_t c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("net spec must be line:net.kmnp:stats.json, got \"" + spec + "\"");
    int line = std::stoi(spec.substr(0, c1));
    est.nets[line] = load_sismik(spec.substr(c1 + 1, c2 - c1 - 1));
    est.stats[line] = read_norm_stats(spec.substr(c2 + 1));
    est.w = est.nets[line].window_h();
  }
  CImage k = image_from_kraw(read_kraw(a.in));
  MotionTrajectory traj = estimate_trajectory(est, k, a.theta_floor, a.trans_floor);
  write_trajectory_json(a.out, traj);
  std::cout << "estimate: wrote per-line trajectory for " << traj.n() << " lines\n";
}

struct CorrectArgs {
  std::string in, per_coil, sidecar, trajectory, out;
  int iters = 12;
};

void run_correct(const Global&, const CorrectArgs& a) {
  if (a.sidecar.empty() && a.trajectory.empty())
    throw std::invalid_argument("correct needs --sidecar or --trajectory for the motion to cancel");
  MetaSidecar sc;
  if (!a.sidecar.empty()) sc = read_sidecar(a.sidecar);
  MotionTrajectory traj =
      !a.trajectory.empty() ? read_trajectory_json(a.trajectory) : sc.trajectory;

  CImage restored;
  if (!a.per_coil.empty()) {
    if (a.sidecar.empty())
      throw std::invalid_argument("per-coil correction needs --sidecar for the coil profiles");
    CoilImages per = coils_from_kraw(read_kraw(a.per_coil));
    CoilSet coils = build_coils(sc.coils, per[0].n);
    restored = correct_coils(per, traj, coils, a.iters);
  } else {
    CImage k = image_from_kraw(read_kraw(a.in));
    restored = correct_kspace(k, traj, a.iters);
  }
  write_kraw(a.out, to_kraw(restored));
  std::cout << "correct: wrote restored image (" << a.iters << " iterations)\n";
}

struct EvaluateArgs {
  std::string ref, test, corrupted, out_json, out_csv;
  bool ref_k = false, test_k = false, corrupted_k = false;
};

void run_evaluate(const Global&, const EvaluateArgs& a) {
  auto load = [](const std::string& path, bool kspace) {
    CImage img = image_from_kraw(read_kraw(path));
    return kspace ? ifft2c(img) : img;
  };
  CImage ref = load(a.ref, a.ref_k);
  CImage test = load(a.test, a.test_k);
  json j = {{"psnr_db", psnr(ref, test)},
            {"ssim", ssim(ref, test)},
            {"entropy_ref", entropy(ref)},
            {"entropy_test", entropy(test)}};
  if (!a.corrupted.empty()) {
    CImage cor = load(a.corrupted, a.corrupted_k);
    j["info_gain"] = info_gain(cor, test);
    j["psnr_corrupted_db"] = psnr(ref, cor);
    j["ssim_corrupted"] = ssim(ref, cor);
  }
  if (!a.out_json.empty()) write_json_file(a.out_json, j);
  if (!a.out_csv.empty()) {
    std::ofstream f(a.out_csv, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(a.out_csv + ": cannot open for writing");
    std::string head, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      head += (head.empty() ? "" : ",") + it.key();
      row += (row.empty() ? "" : ",") + it.value().dump();
    }
    f << head << "\n" << row << "\n";
    if (!f.good()) throw IoError(a.out_csv + ": write failed");
  }
  std::cout << j.dump(2) << "\n";
}

struct RocArgs {
  int n = 64, bank = 16, coils = 4, volumes = 2800, slices = 8, band = 8;
  int epochs = 120, batch = 64;
  double lr = 2e-3, pos_theta = 0.3;
  std::string out_csv, out_svg;
};

void run_roc(const Global& g, const RocArgs& a) {
  PhantomBank bank = PhantomBank::make(a.n, a.bank, g.seed, a.coils);
  auto train_vols = gen_detector_volumes(bank, a.volumes, g.seed, a.slices, false, a.band);
  auto grid_vols = gen_detector_volumes(bank, 0, g.seed + 1, a.slices, true, a.band);

  PlotSpec spec;
  spec.title = "calibration-grid ROC";
  spec.xlabel = "false positive rate";
  spec.ylabel = "true positive rate";
  int hold_from = static_cast<int>(std::ceil(0.8 * a.bank));

  for (bool use_two : {false, true}) {
    DetectorData tr = prep_volumes(train_vols, use_two, a.band);
    DetectorData gr = prep_volumes(grid_vols, use_two, a.band);

    std::vector<std::vector<double>> Xtr;
    std::vector<int> otr;
    for (size_t i = 0; i < tr.X.size(); ++i)
      if (tr.pid[i] < hold_from) {
        Xtr.push_back(tr.X[i]);
        otr.push_back(tr.onsets[i]);
      }
    DetectorNet net = DetectorNet::make(a.n, g.seed);
    DetectorTrainConfig cfg;
    cfg.lr = a.lr;
    cfg.batch = a.batch;
    cfg.epochs = a.epochs;
    cfg.seed = g.seed;
    train_detector(net, Xtr, otr, tr.mask, cfg);

    std::vector<double> pos, neg;
    for (size_t i = 0; i < gr.X.size(); ++i) {
      Detection det = detect_onset(net, use_two ? grid_vols[i].s_two : grid_vols[i].s_half, a.band);
      (std::abs(gr.theta[i]) >= a.pos_theta ? pos : neg).push_back(det.score);
    }
    RocCurve curve = roc_curve(pos, neg);
    Series s{use_two ? "p=2" : "p=1/2", {}, {}, false};
    for (const RocPoint& pt : curve.points) {
      s.x.push_back(pt.fpr);
      s.y.push_back(pt.tpr);
    }
    spec.series.push_back(s);
    std::cout << "AUC " << (use_two ? "p=2" : "p=1/2") << ": " << curve.auc << " (" << pos.size()
              << " pos, " << neg.size() << " neg)\n";
  }
  if (!a.out_csv.empty()) write_csv(a.out_csv, spec);
  if (!a.out_svg.empty()) write_svg(a.out_svg, spec);
}

struct PlotArgs {
  std::string in, out, title, xlabel, ylabel;
  bool scatter = false;
};

void run_plot(const Global&, const PlotArgs& a) {
  std::ifstream f(a.in, std::ios::binary);
  if (!f) throw IoError(a.in + ": cannot open for reading");
  PlotSpec spec;
  spec.title = a.title;
  spec.xlabel = a.xlabel;
  spec.ylabel = a.ylabel;
  std::string line;
  if (!std::getline(f, line)) throw IoError(a.in + ": empty CSV");
  size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    size_t c1 = line.find(','), c2 = line.rfind(',');
    if (c1 == std::string::npos || c2 == c1)
      throw IoError(a.in + ": row " + std::to_string(row) + " is not series,x,y");
    std::string name = line.substr(0, c1);
    double x = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    double y = std::stod(line.substr(c2 + 1));
    if (spec.series.empty() || spec.series.back().label != name) {
      bool seen = false;
      for (Series& s : spec.series)
        if (s.label == name) {
          s.x.push_back(x);
          s.y.push_back(y);
          seen = true;
          break;
        }
      if (seen) continue;
      spec.series.push_back(Series{name, {}, {}, a.scatter});
    }
    spec.series.back().x.push_back(x);
    spec.series.back().y.push_back(y);
  }
  write_svg(a.out, spec);
  std::cout << "plot: " << spec.series.size() << " series -> " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-space motion simulation, detection, and correction toolkit"};
  app.require_subcommand(0, 1);

  Global g;
  app.add_option("--seed", g.seed, "master seed for all derived randomness");
  app.add_option("--threads", g.threads, "worker threads, 0 = auto (execution is sequential)");
  app.add_flag("--deterministic", g.deterministic, "force fixed reduction order");
  app.add_option("--config", g.config, "JSON file overriding option defaults");

  PhantomArgs pa;
  CLI::App* cp = app.add_subcommand("phantom", "generate a phantom image + sidecar");
  cp->add_option("--n", pa.n, "grid size");
  cp->add_option("--kind", pa.kind, "random | head");
  cp->add_option("--phantom-seed", pa.pseed, "phantom seed (default: master seed)");
  cp->add_option("--margin", pa.margin, "outer-skull margin fraction");
  cp->add_option("--smooth", pa.smooth, "Gaussian blur sigma in pixels");
  cp->add_option("--out", pa.out, "output KRaw path")->required();
  cp->add_option("--sidecar", pa.sidecar, "sidecar path (default: <out>.json)");

  SimulateArgs sa;
  CLI::App* cs = app.add_subcommand("simulate", "corrupt a phantom with rigid motion");
  cs->add_option("--n", sa.n, "grid size");
  cs->add_option("--kind", sa.kind, "phantom kind");
  cs->add_option("--phantom-seed", sa.pseed, "phantom seed (default: master seed)");
  cs->add_option("--margin", sa.margin, "outer-skull margin fraction");
  cs->add_option("--smooth", sa.smooth, "phantom blur sigma in pixels");
  cs->add_option("--coils", sa.coils, "coil count");
  cs->add_option("--coil-seed", sa.cseed, "coil seed (default: master seed + 1)");
  cs->add_option("--sigma-frac", sa.sigma_frac, "coil bump width fraction");
  cs->add_option("--floor", sa.floor, "coil sensitivity floor");
  cs->add_option("--event", sa.events, "motion event line:theta[:taux[:tauy]] (repeatable)");
  cs->add_option("--speed", sa.speed, "instant | smooth3");
  cs->add_option("--from-sidecar", sa.from_sidecar, "re-simulate from an existing sidecar");
  cs->add_option("--out", sa.out, "combined k-space KRaw path")->required();
  cs->add_option("--per-coil", sa.per_coil, "also write per-coil KRaw stack");
  cs->add_option("--sidecar", sa.sidecar, "sidecar path (default: <out>.json)");

  DatasetArgs da;
  CLI::App* cd = app.add_subcommand("dataset", "labeled window corpus + normalization stats");
  cd->add_option("--n", da.n, "grid size");
  cd->add_option("--window", da.window, "window height in PE lines");
  cd->add_option("--line", da.line, "trained PE line");
  cd->add_option("--count", da.count, "number of windows");
  cd->add_option("--bank", da.bank, "phantom bank size");
  cd->add_option("--coils", da.coils, "coil count");
  cd->add_option("--smooth", da.smooth, "phantom blur sigma in pixels");
  cd->add_option("--out-prefix", da.out_prefix, "output path prefix")->required();

  TrainEstArgs ta;
  CLI::App* ct = app.add_subcommand("train-estimator", "train a per-line motion regressor");
  ct->add_option("--n", ta.n, "grid size");
  ct->add_option("--window", ta.window, "window height");
  ct->add_option("--line", ta.line, "trained PE line");
  ct->add_option("--samples", ta.samples, "corpus size");
  ct->add_option("--bank", ta.bank, "phantom bank size");
  ct->add_option("--coils", ta.coils, "coil count");
  ct->add_option("--epochs", ta.epochs, "max epochs");
  ct->add_option("--batch", ta.batch, "batch size");
  ct->add_option("--lr", ta.lr, "initial learning rate");
  ct->add_option("--weight-decay", ta.weight_decay, "L2 coefficient");
  ct->add_option("--dropout", ta.dropout, "dropout probability");
  ct->add_option("--raw-std", ta.raw_std, "raw std of the scaled parameterization");
  ct->add_option("--out", ta.out, "output net path")->required();
  ct->add_option("--norm-out", ta.norm_out, "normalization stats path");
  ct->add_option("--history", ta.history, "training history path prefix (.csv/.svg)");

  TrainDetArgs tda;
  CLI::App* ctd = app.add_subcommand("train-detector", "train the onset-line detector");
  ctd->add_option("--n", tda.n, "grid size");
  ctd->add_option("--volumes", tda.volumes, "training volumes");
  ctd->add_option("--slices", tda.slices, "slices averaged per volume");
  ctd->add_option("--bank", tda.bank, "phantom bank size");
  ctd->add_option("--coils", tda.coils, "coil count");
  ctd->add_option("--band", tda.band, "excluded half-width around DC");
  ctd->add_option("--epochs", tda.epochs, "epochs");
  ctd->add_option("--batch", tda.batch, "batch size");
  ctd->add_option("--lr", tda.lr, "learning rate");
  ctd->add_option("--out", tda.out, "output net path")->required();
  ctd->add_option("--history", tda.history, "training history path prefix");

  DetectArgs dta;
  CLI::App* cdet = app.add_subcommand("detect", "score motion onset from k-space slices");
  cdet->add_option("--in", dta.inputs, "combined k-space KRaw (repeat for slice averaging)")
      ->required();
  cdet->add_option("--net", dta.net, "detector net path")->required();
  cdet->add_option("--band", dta.band, "excluded half-width around DC");
  cdet->add_option("--out", dta.out, "detection JSON path");

  EstimateArgs ea;
  CLI::App* ce = app.add_subcommand("estimate", "per-line motion trajectory from window nets");
  ce->add_option("--in", ea.in, "combined k-space KRaw")->required();
  ce->add_option("--net", ea.nets, "line:net.kmnp:stats.json (repeatable)")->required();
  ce->add_option("--reach", ea.reach, "max distance to a trained line");
  ce->add_option("--theta-floor", ea.theta_floor, "rotation floor in degrees");
  ce->add_option("--trans-floor", ea.trans_floor, "translation floor in pixels");
  ce->add_option("--out", ea.out, "trajectory JSON path")->required();

  CorrectArgs ca;
  CLI::App* cc = app.add_subcommand("correct", "phase-cancel + least-squares restoration");
  cc->add_option("--in", ca.in, "combined k-space KRaw");
  cc->add_option("--per-coil", ca.per_coil, "per-coil KRaw stack (needs --sidecar)");
  cc->add_option("--sidecar", ca.sidecar, "sidecar holding trajectory and coil spec");
  cc->add_option("--trajectory", ca.trajectory, "trajectory JSON (overrides sidecar trajectory)");
  cc->add_option("--iters", ca.iters, "least-squares iterations");
  cc->add_option("--out", ca.out, "restored image KRaw path")->required();

  EvaluateArgs ev;
  CLI::App* cev = app.add_subcommand("evaluate", "image quality report");
  cev->add_option("--ref", ev.ref, "reference image KRaw")->required();
  cev->add_option("--test", ev.test, "test image KRaw")->required();
  cev->add_option("--corrupted", ev.corrupted, "corrupted image KRaw (adds info gain)");
  cev->add_flag("--ref-kspace", ev.ref_k, "reference file holds k-space; transform first");
  cev->add_flag("--test-kspace", ev.test_k, "test file holds k-space; transform first");
  cev->add_flag("--corrupted-kspace", ev.corrupted_k, "corrupted file holds k-space; transform first");
  cev->add_option("--out-json", ev.out_json, "report JSON path");
  cev->add_option("--out-csv", ev.out_csv, "report CSV path");

  RocArgs ra;
  CLI::App* cr = app.add_subcommand("roc", "calibration-grid ROC of the degradation score");
  cr->add_option("--n", ra.n, "grid size");
  cr->add_option("--bank", ra.bank, "phantom bank size");
  cr->add_option("--coils", ra.coils, "coil count");
  cr->add_option("--volumes", ra.volumes, "training volumes");
  cr->add_option("--slices", ra.slices, "slices averaged per volume");
  cr->add_option("--band", ra.band, "excluded half-width around DC");
  cr->add_option("--epochs", ra.epochs, "detector epochs");
  cr->add_option("--batch", ra.batch, "batch size");
  cr->add_option("--lr", ra.lr, "learning rate");
  cr->add_option("--pos-theta", ra.pos_theta, "positive-class |theta| threshold in degrees");
  cr->add_option("--out-csv", ra.out_csv, "ROC CSV path");
  cr->add_option("--out-svg", ra.out_svg, "ROC SVG path");

  PlotArgs pl;
  CLI::App* cpl = app.add_subcommand("plot", "render a series,x,y CSV as SVG");
  cpl->add_option("--in", pl.in, "input CSV")->required();
  cpl->add_option("--out", pl.out, "output SVG")->required();
  cpl->add_option("--title", pl.title, "plot title");
  cpl->add_option("--xlabel", pl.xlabel, "x axis label");
  cpl->add_option("--ylabel", pl.ylabel, "y axis label");
  cpl->add_flag("--scatter", pl.scatter, "draw points instead of lines");

  app.allow_extras(false);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << e.what() << "\n\n" << app.help() << std::flush;
      return 2;
    }
    if (!g.config.empty()) apply_config(app, g.config);
    if (app.get_subcommands().empty()) {
      std::cerr << "missing subcommand\n\n" << app.help() << std::flush;
      return 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "phantom") run_phantom(g, pa);
    else if (name == "simulate") run_simulate(g, sa);
    else if (name == "dataset") run_dataset(g, da);
    else if (name == "train-estimator") run_train_estimator(g, ta);
    else if (name == "train-detector") run_train_detector(g, tda);
    else if (name == "detect") run_detect(g, dta);
    else if (name == "estimate") run_estimate(g, ea);
    else if (name == "correct") run_correct(g, ca);
    else if (name == "evaluate") run_evaluate(g, ev);
    else if (name == "roc") run_roc(g, ra);
    else if (name == "plot") run_plot(g, pl);
    return 0;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
