// Copyright 2026 The BeamsNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamsnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "beamsnet/data_io.hpp"
#include "beamsnet/dvl.hpp"
#include "beamsnet/metrics.hpp"
#include "beamsnet/net.hpp"
#include "beamsnet/sim.hpp"

namespace bn::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

fs::path default_out(const std::string& command) {
  const char* root = std::getenv("BEAMSNET_OUT_ROOT");
  return fs::path(root ? root : "out") / command;
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_config(const fs::path& out_dir, const json& cfg) {
  write_text(out_dir / "config.json", cfg.dump(2) + "\n");
}

/// A mission set is either a single mission directory (contains imu.csv)
/// or a directory of mission directories, loaded in name order.
std::vector<MissionFile> load_mission_set(const fs::path& path) {
  std::vector<MissionFile> out;
  if (fs::exists(path / "imu.csv")) {
    out.push_back(load_mission(path));
    return out;
  }
  std::vector<fs::path> subdirs;
  if (fs::is_directory(path))
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_directory() && fs::exists(entry.path() / "imu.csv"))
        subdirs.push_back(entry.path());
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) out.push_back(load_mission(d));
  if (out.empty())
    throw std::invalid_argument("no missions found under " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Plot files. Hand-rolled static SVG so runs stay dependency-free and
// byte-deterministic; the CSV next to each plot is the authoritative data.

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd"};

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel,
                          const std::vector<Series>& series) {
  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x); xmax = std::max(xmax, x);
      ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">" << title << "</text>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
      << "</text>\n"
      << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
         "18 " << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n"
      << "<text x=\"" << ml << "\" y=\"" << h - mb + 16
      << "\" font-size=\"11\">" << fmt_g(xmin) << "</text>\n"
      << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g(xmax)
      << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g(ymin)
      << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g(ymax)
      << "</text>\n";
  int idx = 0;
  for (const auto& s : series) {
    const char* color = kPalette[idx % 4];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.pts) svg << fmt_g(px(x)) << ',' << fmt_g(py(y)) << ' ';
    svg << "\"/>\n"
        << "<text x=\"" << w - mr - 4 << "\" y=\"" << mt + 16 + 16 * idx
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
        << s.name << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_bar_plot(const std::string& title, const std::string& ylabel,
                         const std::vector<std::pair<std::string, double>>&
                             bars) {
  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double ymax = 0.0;
  for (const auto& [name, v] : bars) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"16\">" << title << "</text>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
      << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 "
         "18 " << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g(ymax)
      << "</text>\n";
  const double slot = (w - ml - mr) / static_cast<double>(bars.size());
  int idx = 0;
  for (const auto& [name, v] : bars) {
    const double bw = slot * 0.6;
    const double x = ml + slot * idx + slot * 0.2;
    const double bh = (h - mt - mb) * v / ymax;
    svg << "<rect x=\"" << fmt_g(x) << "\" y=\"" << fmt_g(h - mb - bh)
        << "\" width=\"" << fmt_g(bw) << "\" height=\"" << fmt_g(bh)
        << "\" fill=\"" << kPalette[idx % 4] << "\"/>\n"
        << "<text x=\"" << fmt_g(x + bw / 2) << "\" y=\"" << h - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"12\">" << name
        << "</text>\n"
        << "<text x=\"" << fmt_g(x + bw / 2) << "\" y=\""
        << fmt_g(h - mb - bh - 6) << "\" text-anchor=\"middle\" "
           "font-size=\"11\">" << fmt_g(v) << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// Shared evaluation: LS baseline and model reports over the test split.

/// Like metrics::EvalReport, but r2/vaf stay empty on a constant ground
/// truth (their spec behavior is "undefined"); a constant-speed synthetic
/// mission is exactly that case.
struct MethodReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;
  std::optional<double> vaf;
  std::size_t n = 0;
  std::optional<double> improvement_vs_baseline;
};

MethodReport make_method_report(std::span<const double> truth,
                                std::span<const double> pred,
                                std::optional<double> baseline_rmse) {
  MethodReport r;
  r.rmse = metrics::rmse(truth, pred);
  r.mae = metrics::mae(truth, pred);
  r.n = truth.size();
  try {
    r.r2 = metrics::r2(truth, pred);
    r.vaf = metrics::vaf(truth, pred);
  } catch (const std::domain_error&) {
    // constant truth: leave r2/vaf unset
  }
  if (baseline_rmse)
    r.improvement_vs_baseline = metrics::improvement(*baseline_rmse, r.rmse);
  return r;
}

struct SplitEval {
  MethodReport ls;
  MethodReport model;
};

SplitEval evaluate_split(const Model& m, Variant variant, const Dataset& ds,
                         const BeamGeometry& geom) {
  std::vector<Vec3> truth, ls_pred;
  truth.reserve(ds.test_count());
  ls_pred.reserve(ds.test_count());
  for (std::size_t i = ds.split_index; i < ds.windows.size(); ++i) {
    truth.push_back(ds.windows[i].gt_velocity);
    ls_pred.push_back(ls_estimate(geom, ds.windows[i].current_beams));
  }
  const std::vector<Vec3> nn_pred =
      predict_range(m, variant, ds, ds.split_index, ds.windows.size());

  const auto truth_n = metrics::norm_series(truth);
  const auto ls_n = metrics::norm_series(ls_pred);
  const auto nn_n = metrics::norm_series(nn_pred);
  SplitEval ev;
  ev.ls = make_method_report(truth_n, ls_n, std::nullopt);
  ev.model = make_method_report(truth_n, nn_n, ev.ls.rmse);
  return ev;
}

json report_to_json(const MethodReport& r) {
  json j;
  j["rmse"] = r.rmse;
  j["mae"] = r.mae;
  j["r2"] = r.r2 ? json(*r.r2) : json();
  j["vaf"] = r.vaf ? json(*r.vaf) : json();
  j["n"] = r.n;
  if (r.improvement_vs_baseline)
    j["improvement_pct"] = *r.improvement_vs_baseline;
  return j;
}

json eval_to_json(const SplitEval& ev) {
  json j;
  j["ls"] = report_to_json(ev.ls);
  j["model"] = report_to_json(ev.model);
  return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::vector<double> speeds = {1.0, 2.0, 3.0};
  double duration_s = 7200.0;
  double heading = 0.0;
  double pitch_deg = 20.0;
  double beam_scale = 0.007;
  double beam_bias = 0.0001;
  double beam_noise_std = 0.042;
  double accel_noise_std = 0.01;
  double gyro_noise_std = 0.001;
  std::uint64_t seed = 0;
  std::string out;
};

json simulate_config_json(const SimulateArgs& a) {
  json j;
  j["command"] = "simulate";
  j["speeds"] = a.speeds;
  j["duration_s"] = a.duration_s;
  j["heading_rad"] = a.heading;
  j["pitch_deg"] = a.pitch_deg;
  j["beam_scale"] = a.beam_scale;
  j["beam_bias"] = a.beam_bias;
  j["beam_noise_std"] = a.beam_noise_std;
  j["accel_noise_std"] = a.accel_noise_std;
  j["gyro_noise_std"] = a.gyro_noise_std;
  j["seed"] = a.seed;
  j["out"] = a.out;
  return j;
}

int cmd_simulate(const SimulateArgs& a) {
  if (a.speeds.empty())
    throw std::invalid_argument("simulate: at least one --speed required");
  const fs::path out_dir = a.out;
  const BeamGeometry geom =
      build_geometry(a.pitch_deg * std::numbers::pi / 180.0);

  for (std::size_t i = 0; i < a.speeds.size(); ++i) {
    TrajectorySpec spec;
    spec.speed = a.speeds[i];
    spec.duration_s = a.duration_s;
    spec.heading = a.heading;
    validate(spec);

    ImuErrorParams imu_p;
    imu_p.accel_noise_std = a.accel_noise_std;
    imu_p.gyro_noise_std = a.gyro_noise_std;
    BeamErrorParams beam_p;
    beam_p.scale.fill(a.beam_scale);
    beam_p.bias.fill(a.beam_bias);
    beam_p.noise_std = a.beam_noise_std;

    RngStream imu_rng(RngStream::derive(a.seed, "imu", i));
    RngStream dvl_rng(RngStream::derive(a.seed, "dvl", i));
    const auto velocities = generate_trajectory(spec);
    const ImuStream imu = synthesize_imu(spec, imu_p, imu_rng);
    const BeamStreams beams = synthesize_dvl(geom, velocities, beam_p,
                                             dvl_rng);

    MissionFile mission;
    mission.meta.id = "speed_" + fmt_g(spec.speed);
    mission.meta.imu_rate_hz = spec.imu_rate;
    mission.meta.dvl_rate_hz = spec.dvl_rate;
    mission.meta.notes = "synthetic straight-line mission";
    mission.imu.reserve(imu.accel.size());
    for (std::size_t j = 0; j < imu.accel.size(); ++j)
      mission.imu.push_back({static_cast<double>(j) / spec.imu_rate,
                             imu.accel[j], imu.gyro[j]});
    mission.dvl.reserve(velocities.size());
    for (std::size_t k = 0; k < velocities.size(); ++k)
      mission.dvl.push_back({static_cast<double>(k) / spec.dvl_rate,
                             beams.measured[k], velocities[k]});

    const fs::path dir = out_dir / mission.meta.id;
    save_mission(mission, dir);
    std::cout << "wrote " << dir.string() << ": " << mission.imu.size()
              << " imu samples, " << mission.dvl.size() << " dvl rows\n";
  }
  write_config(out_dir, simulate_config_json(a));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string variant = "v1";
  std::string dataset;
  double lr = -1.0;   // -1 = variant default
  int epochs = -1;    // -1 = variant default
  int batch = 4;
  int n_past = 3;     // v2 only
  double pitch_deg = 20.0;
  std::uint64_t seed = 0;
  std::string out;
};

json train_config_json(const TrainArgs& a, const TrainConfig& tc,
                       int n_past) {
  json j;
  j["command"] = "train";
  j["variant"] = a.variant;
  j["dataset"] = a.dataset;
  j["learning_rate"] = tc.learning_rate;
  j["decay_factor"] = tc.decay_factor;
  j["decay_every_epochs"] = tc.decay_every_epochs;
  j["batch_size"] = tc.batch_size;
  j["epochs"] = tc.epochs;
  j["n_past"] = n_past;
  j["pitch_deg"] = a.pitch_deg;
  j["seed"] = a.seed;
  j["out"] = a.out;
  return j;
}

std::string loss_csv(const TrainLog& log) {
  std::string csv = "epoch,train_loss,test_loss,lr\n";
  for (const EpochLog& e : log.epochs)
    csv += std::to_string(e.epoch) + ',' + fmt17(e.train_loss) + ',' +
           fmt17(e.test_loss) + ',' + fmt17(e.lr) + '\n';
  return csv;
}

void write_loss_plot(const fs::path& path, const TrainLog& log) {
  Series train_s{"train", {}}, test_s{"test", {}};
  for (const EpochLog& e : log.epochs) {
    train_s.pts.emplace_back(e.epoch, e.train_loss);
    test_s.pts.emplace_back(e.epoch, e.test_loss);
  }
  write_text(path, svg_line_plot("Training loss", "epoch", "MSE loss",
                                 {train_s, test_s}));
}

int cmd_train(const TrainArgs& a) {
  const Variant variant = variant_from_name(a.variant);
  const bool is_v1 = variant == Variant::v1;
  TrainConfig tc;
  tc.learning_rate = a.lr >= 0.0 ? a.lr : (is_v1 ? 0.01 : 0.001);
  tc.epochs = a.epochs >= 0 ? a.epochs : (is_v1 ? 30 : 50);
  tc.batch_size = a.batch;
  tc.seed = RngStream::derive(a.seed, "train", 0);
  if (tc.batch_size <= 0 || tc.epochs <= 0 || !(tc.learning_rate > 0.0))
    throw std::invalid_argument("train: lr, epochs and batch must be "
                                "positive");
  const int n_past = is_v1 ? 0 : a.n_past;

  const auto missions = load_mission_set(a.dataset);
  const Dataset ds = dataset_from_missions(missions, n_past);
  const BeamGeometry geom =
      build_geometry(a.pitch_deg * std::numbers::pi / 180.0);

  RngStream init_rng(RngStream::derive(a.seed, "init", 0));
  V1Config v1cfg;
  V2Config v2cfg;
  v2cfg.n_past = n_past;
  Model m = is_v1 ? build_v1(v1cfg, init_rng) : build_v2(v2cfg, init_rng);

  const TrainLog log = train(m, variant, ds, tc);
  const SplitEval ev = evaluate_split(m, variant, ds, geom);

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  write_config(out_dir, train_config_json(a, tc, n_past));
  write_text(out_dir / "loss.csv", loss_csv(log));
  write_loss_plot(out_dir / "loss.svg", log);

  json header;
  header["config"] = train_config_json(a, tc, n_past);
  // The destination is not part of the training configuration; without
  // this, checkpoint bytes would depend on where they were written.
  header["config"].erase("out");
  header["dataset_fingerprint"] = hex64(dataset_fingerprint(ds));
  header["metrics"] = eval_to_json(ev);
  if (is_v1) {
    header["model"] = {{"conv_filters", v1cfg.conv_filters},
                       {"conv_kernel", v1cfg.conv_kernel},
                       {"dropout_p", v1cfg.dropout_p},
                       {"fc_sizes", v1cfg.fc_sizes},
                       {"post_merge_fc", v1cfg.post_merge_fc},
                       {"imu_block_len", v1cfg.imu_block_len}};
  } else {
    header["model"] = {{"n_past", v2cfg.n_past},
                       {"conv_filters", v2cfg.conv_filters},
                       {"conv_kernel", v2cfg.conv_kernel},
                       {"fc_sizes", v2cfg.fc_sizes}};
  }
  std::vector<std::pair<std::string, const Tensor*>> params;
  for (const auto& [name, t] : std::as_const(m).named_params())
    params.emplace_back(name, t);
  save_checkpoint(out_dir / "checkpoint.bnck", a.variant, header, params);

  std::cout << "trained " << a.variant << " for " << tc.epochs
            << " epochs; test rmse " << fmt_g(ev.model.rmse)
            << " m/s vs ls " << fmt_g(ev.ls.rmse) << " m/s ("
            << fmt_g(*ev.model.improvement_vs_baseline)
            << "% improvement)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string out;
  bool force = false;
};

std::string report_txt(const SplitEval& ev) {
  std::ostringstream out;
  out << "method   rmse [m/s]   mae [m/s]    r2          vaf [%]\n";
  auto row = [&](const char* name, const MethodReport& r) {
    char buf[160];
    if (r.r2 && r.vaf)
      std::snprintf(buf, sizeof(buf), "%-8s %-12.6f %-12.6f %-11.6f %.4f\n",
                    name, r.rmse, r.mae, *r.r2, *r.vaf);
    else
      std::snprintf(buf, sizeof(buf),
                    "%-8s %-12.6f %-12.6f %-11s %s\n", name, r.rmse, r.mae,
                    "n/a", "n/a");
    out << buf;
  };
  row("ls", ev.ls);
  row("model", ev.model);
  out << "improvement over ls: "
      << fmt_g(*ev.model.improvement_vs_baseline) << "%\n";
  return out.str();
}

int cmd_eval(const EvalArgs& a) {
  const LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
  const Variant variant = variant_from_name(ck.variant);
  const json header = json::parse(ck.header_json);

  RngStream init_rng(0);
  Model m = [&] {
    if (variant == Variant::v1) {
      V1Config cfg;
      const json& mj = header.at("model");
      cfg.conv_filters = mj.at("conv_filters");
      cfg.conv_kernel = mj.at("conv_kernel");
      cfg.dropout_p = mj.at("dropout_p");
      cfg.fc_sizes = mj.at("fc_sizes").get<std::vector<int>>();
      cfg.post_merge_fc = mj.at("post_merge_fc").get<std::vector<int>>();
      cfg.imu_block_len = mj.at("imu_block_len");
      return build_v1(cfg, init_rng);
    }
    V2Config cfg;
    const json& mj = header.at("model");
    cfg.n_past = mj.at("n_past");
    cfg.conv_filters = mj.at("conv_filters");
    cfg.conv_kernel = mj.at("conv_kernel");
    cfg.fc_sizes = mj.at("fc_sizes").get<std::vector<int>>();
    return build_v2(cfg, init_rng);
  }();
  restore_params(m, ck.tensors);

  const int n_past = header.at("config").at("n_past");
  const double pitch_deg = header.at("config").value("pitch_deg", 20.0);
  const auto missions = load_mission_set(a.dataset);
  const Dataset ds = dataset_from_missions(missions, n_past);
  const std::string fp = hex64(dataset_fingerprint(ds));
  const std::string ck_fp = header.value("dataset_fingerprint", "");
  if (fp != ck_fp) {
    std::cerr << "warning: dataset fingerprint " << fp
              << " does not match checkpoint fingerprint " << ck_fp << "\n";
    if (!a.force) {
      std::cerr << "refusing to evaluate; pass --force to override\n";
      return kExitRuntime;
    }
  }

  const BeamGeometry geom =
      build_geometry(pitch_deg * std::numbers::pi / 180.0);
  const SplitEval ev = evaluate_split(m, variant, ds, geom);

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  json cfg;
  cfg["command"] = "eval";
  cfg["checkpoint"] = a.checkpoint;
  cfg["dataset"] = a.dataset;
  cfg["force"] = a.force;
  cfg["out"] = a.out;
  write_config(out_dir, cfg);

  json rep = eval_to_json(ev);
  rep["dataset_fingerprint"] = fp;
  write_text(out_dir / "report.json", rep.dump(2) + "\n");
  write_text(out_dir / "report.txt", report_txt(ev));

  std::string bars_csv = "metric,ls,model\n";
  bars_csv += "rmse," + fmt17(ev.ls.rmse) + ',' + fmt17(ev.model.rmse) + '\n';
  bars_csv += "mae," + fmt17(ev.ls.mae) + ',' + fmt17(ev.model.mae) + '\n';
  write_text(out_dir / "bars.csv", bars_csv);
  write_text(out_dir / "bars.svg",
             svg_bar_plot("Velocity norm error on the test split",
                          "error [m/s]",
                          {{"ls rmse", ev.ls.rmse},
                           {"model rmse", ev.model.rmse},
                           {"ls mae", ev.ls.mae},
                           {"model mae", ev.model.mae}}));

  std::cout << report_txt(ev);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep-past

struct SweepArgs {
  std::string dataset;
  int min_n = 2;
  int max_n = 7;
  double lr = 0.001;
  int epochs = 50;
  int batch = 4;
  double pitch_deg = 20.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sweep_past(const SweepArgs& a) {
  if (a.min_n > a.max_n)
    throw std::invalid_argument("sweep-past: empty range (min-n > max-n)");
  if (a.min_n < 2)
    throw std::invalid_argument("sweep-past: min-n must be >= 2 (the conv "
                                "kernel needs two past vectors)");
  const auto missions = load_mission_set(a.dataset);
  const BeamGeometry geom =
      build_geometry(a.pitch_deg * std::numbers::pi / 180.0);

  std::string csv = "n_past,model_rmse,ls_rmse\n";
  Series model_s{"model", {}}, ls_s{"ls", {}};
  for (int n = a.min_n; n <= a.max_n; ++n) {
    const Dataset ds = dataset_from_missions(missions, n);
    V2Config cfg;
    cfg.n_past = n;
    RngStream init_rng(
        RngStream::derive(a.seed, "init", static_cast<std::uint64_t>(n)));
    Model m = build_v2(cfg, init_rng);
    TrainConfig tc;
    tc.learning_rate = a.lr;
    tc.epochs = a.epochs;
    tc.batch_size = a.batch;
    tc.seed =
        RngStream::derive(a.seed, "train", static_cast<std::uint64_t>(n));
    train(m, Variant::v2, ds, tc);
    const SplitEval ev = evaluate_split(m, Variant::v2, ds, geom);
    csv += std::to_string(n) + ',' + fmt17(ev.model.rmse) + ',' +
           fmt17(ev.ls.rmse) + '\n';
    model_s.pts.emplace_back(n, ev.model.rmse);
    ls_s.pts.emplace_back(n, ev.ls.rmse);
    std::cout << "n=" << n << ": model rmse " << fmt_g(ev.model.rmse)
              << " m/s, ls rmse " << fmt_g(ev.ls.rmse) << " m/s\n";
  }

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  json cfg;
  cfg["command"] = "sweep-past";
  cfg["dataset"] = a.dataset;
  cfg["min_n"] = a.min_n;
  cfg["max_n"] = a.max_n;
  cfg["learning_rate"] = a.lr;
  cfg["epochs"] = a.epochs;
  cfg["batch_size"] = a.batch;
  cfg["pitch_deg"] = a.pitch_deg;
  cfg["seed"] = a.seed;
  cfg["out"] = a.out;
  write_config(out_dir, cfg);
  write_text(out_dir / "sweep.csv", csv);
  write_text(out_dir / "sweep.svg",
             svg_line_plot("Test RMSE vs past beam count",
                           "n past beam vectors", "rmse [m/s]",
                           {model_s, ls_s}));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"BeamsNet: DVL velocity estimation with learned beam "
               "regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Write synthetic straight-line missions");
  sim_cmd->add_option("--speed", sim.speeds,
                      "AUV speed(s) in m/s, one mission each");
  sim_cmd->add_option("--duration", sim.duration_s, "Mission length in "
                      "seconds")->capture_default_str();
  sim_cmd->add_option("--heading", sim.heading, "Heading in radians")
      ->capture_default_str();
  sim_cmd->add_option("--pitch-deg", sim.pitch_deg, "Transducer pitch angle")
      ->capture_default_str();
  sim_cmd->add_option("--beam-scale", sim.beam_scale, "Per-beam scale "
                      "factor error")->capture_default_str();
  sim_cmd->add_option("--beam-bias", sim.beam_bias, "Per-beam bias in m/s")
      ->capture_default_str();
  sim_cmd->add_option("--beam-noise-std", sim.beam_noise_std,
                      "Beam noise std in m/s")->capture_default_str();
  sim_cmd->add_option("--accel-noise-std", sim.accel_noise_std,
                      "Accelerometer noise std in m/s^2")
      ->capture_default_str();
  sim_cmd->add_option("--gyro-noise-std", sim.gyro_noise_std,
                      "Gyro noise std in rad/s")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Global seed")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output directory (default "
                      "$BEAMSNET_OUT_ROOT/simulate)");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train a variant on a mission "
                                    "set and write a checkpoint");
  tr_cmd->add_option("--variant", tr.variant, "v1 or v2")
      ->check(CLI::IsMember({"v1", "v2"}))->capture_default_str();
  tr_cmd->add_option("--dataset", tr.dataset, "Mission directory or "
                     "directory of missions")->required();
  tr_cmd->add_option("--lr", tr.lr, "Learning rate (default 0.01 for v1, "
                     "0.001 for v2)");
  tr_cmd->add_option("--epochs", tr.epochs, "Epoch count (default 30 for "
                     "v1, 50 for v2)");
  tr_cmd->add_option("--batch", tr.batch, "Mini-batch size")
      ->capture_default_str();
  tr_cmd->add_option("--n-past", tr.n_past, "Past beam vectors per window "
                     "(v2 only)")->capture_default_str();
  tr_cmd->add_option("--pitch-deg", tr.pitch_deg, "Transducer pitch angle")
      ->capture_default_str();
  tr_cmd->add_option("--seed", tr.seed, "Global seed")
      ->capture_default_str();
  tr_cmd->add_option("--out", tr.out, "Output directory (default "
                     "$BEAMSNET_OUT_ROOT/train)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against "
                                    "the LS baseline on the test split");
  ev_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")
      ->required();
  ev_cmd->add_option("--dataset", ev.dataset, "Mission directory or "
                     "directory of missions")->required();
  ev_cmd->add_option("--out", ev.out, "Output directory (default "
                     "$BEAMSNET_OUT_ROOT/eval)");
  ev_cmd->add_flag("--force", ev.force, "Evaluate even when the dataset "
                   "fingerprint disagrees with the checkpoint");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep-past", "Train v2 across a range "
                                    "of past-beam counts");
  sw_cmd->add_option("--dataset", sw.dataset, "Mission directory or "
                     "directory of missions")->required();
  sw_cmd->add_option("--min-n", sw.min_n, "Smallest past-beam count")
      ->capture_default_str();
  sw_cmd->add_option("--max-n", sw.max_n, "Largest past-beam count")
      ->capture_default_str();
  sw_cmd->add_option("--lr", sw.lr, "Learning rate")->capture_default_str();
  sw_cmd->add_option("--epochs", sw.epochs, "Epoch count")
      ->capture_default_str();
  sw_cmd->add_option("--batch", sw.batch, "Mini-batch size")
      ->capture_default_str();
  sw_cmd->add_option("--pitch-deg", sw.pitch_deg, "Transducer pitch angle")
      ->capture_default_str();
  sw_cmd->add_option("--seed", sw.seed, "Global seed")
      ->capture_default_str();
  sw_cmd->add_option("--out", sw.out, "Output directory (default "
                     "$BEAMSNET_OUT_ROOT/sweep-past)");

  std::vector<const char*> argv;
  argv.push_back("beamsnet");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim_cmd->parsed()) {
      if (sim.out.empty()) sim.out = default_out("simulate").string();
      return cmd_simulate(sim);
    }
    if (tr_cmd->parsed()) {
      if (tr.out.empty()) tr.out = default_out("train").string();
      return cmd_train(tr);
    }
    if (ev_cmd->parsed()) {
      if (ev.out.empty()) ev.out = default_out("eval").string();
      return cmd_eval(ev);
    }
    if (sw.out.empty()) sw.out = default_out("sweep-past").string();
    return cmd_sweep_past(sw);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace bn::cli
