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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "beamsnet/data_io.hpp"
#include "beamsnet/net.hpp"

using namespace bn;
namespace fs = std::filesystem;

namespace {

constexpr double kAlpha20 = 20.0 * std::numbers::pi / 180.0;

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("bn_data_io_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// In-memory mission: `epochs` DVL rows at 1 Hz, 100x IMU rows, velocity
/// norm varying slowly around `speed` so r2/vaf stay defined.
MissionFile make_fixture(const std::string& id, int epochs, double speed,
                         bool with_beams) {
  MissionFile m;
  m.meta.id = id;
  m.meta.imu_rate_hz = 100.0;
  m.meta.dvl_rate_hz = 1.0;
  const BeamGeometry g = build_geometry(kAlpha20);
  for (int j = 0; j < epochs * 100; ++j)
    m.imu.push_back({j / 100.0,
                     {0.001 * std::sin(0.01 * j), 0.0, -9.81},
                     {0.0, 0.0, 1e-4 * std::cos(0.01 * j)}});
  for (int k = 0; k < epochs; ++k) {
    DvlRow r;
    r.t = static_cast<double>(k);
    const double s = speed * (1.0 + 0.1 * std::sin(0.05 * k));
    r.v = {s, 0.1 * std::cos(0.05 * k), 0.0};
    if (with_beams) r.beams = beams_from_velocity(g, r.v);
    m.dvl.push_back(r);
  }
  return m;
}

}  // namespace

TEST_CASE("mission round trips through save/load without precision loss") {
  const fs::path dir = temp_dir("roundtrip");
  MissionFile m = make_fixture("rt", 60, 1.0, true);
  // Awkward values that expose lossy formatting immediately.
  m.imu[0].f = {0.1, 1.0 / 3.0, -1.0e-17};
  m.imu[1].w = {2.2250738585072014e-308, -0.0, 9.81};
  m.dvl[0].v = {0.30000000000000004, 1e300, -1e-300};
  save_mission(m, dir / "rt");
  const MissionFile r = load_mission(dir / "rt");

  CHECK(r.meta.id == "rt");
  CHECK(r.meta.imu_rate_hz == 100.0);
  CHECK(r.meta.dvl_rate_hz == 1.0);
  REQUIRE(r.imu.size() == m.imu.size());
  REQUIRE(r.dvl.size() == m.dvl.size());
  for (std::size_t i = 0; i < m.imu.size(); ++i) {
    CHECK(r.imu[i].t == m.imu[i].t);
    CHECK(r.imu[i].f == m.imu[i].f);
    CHECK(r.imu[i].w == m.imu[i].w);
  }
  for (std::size_t i = 0; i < m.dvl.size(); ++i) {
    CHECK(r.dvl[i].t == m.dvl[i].t);
    CHECK(r.dvl[i].v == m.dvl[i].v);
    REQUIRE(r.dvl[i].beams.has_value());
    CHECK(*r.dvl[i].beams == *m.dvl[i].beams);
  }
  CHECK(r.warnings.empty());
}

TEST_CASE("a 60 s fixture has 6000 imu rows and 60 dvl rows") {
  const fs::path dir = temp_dir("counts");
  save_mission(make_fixture("c", 60, 1.0, true), dir / "c");
  const MissionFile r = load_mission(dir / "c");
  CHECK(r.imu.size() == 6000);
  CHECK(r.dvl.size() == 60);
}

TEST_CASE("distinct load errors: unreadable, missing column, time, value") {
  const fs::path dir = temp_dir("errors");

  // Unreadable: directory without files.
  fs::create_directories(dir / "empty");
  try {
    (void)load_mission(dir / "empty");
    FAIL("expected MissionError");
  } catch (const MissionError& e) {
    CHECK(e.kind == MissionError::Kind::unreadable);
  }

  // Missing column.
  save_mission(make_fixture("m", 5, 1.0, true), dir / "m");
  {
    std::ofstream imu(dir / "m" / "imu.csv");
    imu << "t,fx,fy,gx,gy,gz\n0,0,0,0,0,0\n";
  }
  try {
    (void)load_mission(dir / "m");
    FAIL("expected MissionError");
  } catch (const MissionError& e) {
    CHECK(e.kind == MissionError::Kind::missing_column);
  }

  // Duplicated timestamp.
  MissionFile dup = make_fixture("d", 5, 1.0, true);
  dup.dvl[2].t = dup.dvl[1].t;
  save_mission(dup, dir / "d");
  try {
    (void)load_mission(dir / "d");
    FAIL("expected MissionError");
  } catch (const MissionError& e) {
    CHECK(e.kind == MissionError::Kind::non_monotone_time);
  }

  // Unparseable number.
  save_mission(make_fixture("b", 5, 1.0, true), dir / "b");
  {
    std::ofstream dvl(dir / "b" / "dvl.csv");
    dvl << "t,vx,vy,vz\n0,one,0,0\n";
  }
  try {
    (void)load_mission(dir / "b");
    FAIL("expected MissionError");
  } catch (const MissionError& e) {
    CHECK(e.kind == MissionError::Kind::bad_value);
  }
}

TEST_CASE("rate deviation beyond 1% is flagged as a warning") {
  const fs::path dir = temp_dir("rate");
  MissionFile m = make_fixture("w", 30, 1.0, true);
  m.meta.dvl_rate_hz = 1.05;  // actual table is 1 Hz: ~4.8% off
  save_mission(m, dir / "w");
  const MissionFile r = load_mission(dir / "w");
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("dvl.csv") != std::string::npos);
}

TEST_CASE("windows never span a mission boundary") {
  std::vector<MissionFile> missions;
  for (int i = 0; i < 3; ++i) {
    MissionFile m = make_fixture("m" + std::to_string(i), 60, 1.0, true);
    // Give each mission an unmistakable beam signature.
    for (auto& row : m.dvl)
      for (double& b : *row.beams) b += 100.0 * (i + 1);
    missions.push_back(std::move(m));
  }
  const Dataset ds = dataset_from_missions(missions, 2);
  CHECK(ds.windows.size() == 3 * (60 - 2));
  for (const SampleWindow& w : ds.windows) {
    // All beam vectors in one window share the mission signature.
    const double sig = std::floor(w.current_beams[0] / 100.0);
    CHECK(sig >= 1.0);
    for (const Vec4& p : w.past_beams)
      CHECK(std::floor(p[0] / 100.0) == sig);
  }
}

TEST_CASE("dataset_from_missions requires beam columns") {
  std::vector<MissionFile> missions{make_fixture("nb", 10, 1.0, false)};
  CHECK_THROWS_AS((void)dataset_from_missions(missions, 0), MissionError);
}

TEST_CASE("zero-error recorruption lets LS recover recorded velocities") {
  const BeamGeometry g = build_geometry(kAlpha20);
  std::vector<MissionFile> missions{make_fixture("z", 30, 1.5, false)};
  BeamErrorParams p;  // all zero
  RngStream rng(1);
  const Dataset ds = recorrupt_recorded(missions, g, p, 0, rng);
  CHECK(ds.windows.size() == 29);
  for (const SampleWindow& w : ds.windows) {
    const Vec3 v = ls_estimate(g, w.current_beams);
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(v[a] - w.gt_velocity[a]) < 1e-10);
  }
}

TEST_CASE("recorrupted LS error matches the analytic composition") {
  const BeamGeometry g = build_geometry(kAlpha20);
  const int epochs = 2000;
  MissionFile m = make_fixture("a", epochs, 1.0, false);
  for (auto& row : m.dvl) row.v = {1.5, 0.0, 0.0};  // ||v|| = 1.5 exactly
  std::vector<MissionFile> missions{std::move(m)};
  BeamErrorParams p;
  p.scale.fill(0.007);
  p.bias.fill(0.0001);
  p.noise_std = 0.042;
  RngStream rng(77);
  const Dataset ds = recorrupt_recorded(missions, g, p, 0, rng);

  double se = 0.0;
  for (const SampleWindow& w : ds.windows) {
    const Vec3 v = ls_estimate(g, w.current_beams);
    for (int a = 0; a < 3; ++a)
      se += (v[a] - w.gt_velocity[a]) * (v[a] - w.gt_velocity[a]);
  }
  const double rms = std::sqrt(se / static_cast<double>(ds.windows.size()));

  // Deterministic part: H_pinv ((Hv) .* s + b); stochastic part:
  // sigma^2 tr((H^T H)^-1) = sigma^2 sum H_pinv^2.
  const Vec4 clean = beams_from_velocity(g, {1.5, 0.0, 0.0});
  Vec3 det{};
  double trace = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 4; ++i) {
      det[a] += g.H_pinv[a][i] * (clean[i] * 0.007 + 0.0001);
      trace += g.H_pinv[a][i] * g.H_pinv[a][i];
    }
  const double want = std::sqrt(det[0] * det[0] + det[1] * det[1] +
                                det[2] * det[2] + 0.042 * 0.042 * trace);
  CHECK(rms == doctest::Approx(want).epsilon(0.10));
}

TEST_CASE("recorruption is deterministic per seed; fingerprints differ "
          "across seeds") {
  const BeamGeometry g = build_geometry(kAlpha20);
  std::vector<MissionFile> missions{make_fixture("f", 40, 1.2, false)};
  BeamErrorParams p;
  p.noise_std = 0.042;
  RngStream r1(5), r2(5), r3(6);
  const auto d1 = recorrupt_recorded(missions, g, p, 2, r1);
  const auto d2 = recorrupt_recorded(missions, g, p, 2, r2);
  const auto d3 = recorrupt_recorded(missions, g, p, 2, r3);
  CHECK(dataset_fingerprint(d1) == dataset_fingerprint(d2));
  CHECK(dataset_fingerprint(d1) != dataset_fingerprint(d3));
}

TEST_CASE("prenoise recorruption differs from the default procedure") {
  const BeamGeometry g = build_geometry(kAlpha20);
  std::vector<MissionFile> missions{make_fixture("p", 20, 1.0, false)};
  BeamErrorParams p;
  RngStream r1(9), r2(9);
  const auto plain = recorrupt_recorded(missions, g, p, 0, r1);
  const auto noisy = recorrupt_recorded(missions, g, p, 0, r2, true, 1e-2);
  CHECK(dataset_fingerprint(plain) != dataset_fingerprint(noisy));
  // Ground truth stays the recorded velocity in both procedures.
  for (std::size_t i = 0; i < plain.windows.size(); ++i)
    CHECK(plain.windows[i].gt_velocity == noisy.windows[i].gt_velocity);
}

TEST_CASE("fingerprint depends on window payloads and split") {
  const BeamGeometry g = build_geometry(kAlpha20);
  std::vector<MissionFile> missions{make_fixture("h", 40, 1.2, false)};
  BeamErrorParams p;
  RngStream r1(5), r2(5);
  Dataset a = recorrupt_recorded(missions, g, p, 0, r1);
  Dataset b = recorrupt_recorded(missions, g, p, 0, r2);
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
  b.split_index -= 1;
  CHECK(dataset_fingerprint(a) != dataset_fingerprint(b));
  b.split_index += 1;
  b.windows[0].gt_velocity[1] += 1e-15;
  CHECK(dataset_fingerprint(a) != dataset_fingerprint(b));
}

TEST_CASE("checkpoint save/load round trips parameters bit-exactly") {
  const fs::path dir = temp_dir("ckpt");
  RngStream rng(3);
  V2Config cfg;
  cfg.n_past = 3;
  Model m = build_v2(cfg, rng);

  nlohmann::json header;
  header["note"] = "fixture";
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& [name, t] : std::as_const(m).named_params())
    tensors.emplace_back(name, t);
  save_checkpoint(dir / "m.bnck", "v2", header, tensors);

  const LoadedCheckpoint ck = load_checkpoint(dir / "m.bnck");
  CHECK(ck.variant == "v2");
  CHECK(nlohmann::json::parse(ck.header_json)["note"] == "fixture");

  RngStream rng2(99);  // different init; restore must overwrite it all
  Model m2 = build_v2(cfg, rng2);
  restore_params(m2, ck.tensors);
  const auto pa = m.named_params();
  const auto pb = m2.named_params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK(pa[i].second->data == pb[i].second->data);

  // Restored model predicts bit-identically.
  const Dataset ds = [&] {
    const BeamGeometry g = build_geometry(kAlpha20);
    std::vector<MissionFile> ms{make_fixture("pr", 20, 1.0, false)};
    BeamErrorParams p;
    p.noise_std = 0.042;
    RngStream r(4);
    return recorrupt_recorded(ms, g, p, 3, r);
  }();
  CHECK(predict(m, Variant::v2, ds.windows[0]) ==
        predict(m2, Variant::v2, ds.windows[0]));
}

TEST_CASE("truncated checkpoint raises an error, not a crash") {
  const fs::path dir = temp_dir("trunc");
  RngStream rng(3);
  V2Config cfg;
  cfg.n_past = 2;
  Model m = build_v2(cfg, rng);
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& [name, t] : std::as_const(m).named_params())
    tensors.emplace_back(name, t);
  save_checkpoint(dir / "full.bnck", "v2", nlohmann::json::object(), tensors);

  const auto size = fs::file_size(dir / "full.bnck");
  fs::copy_file(dir / "full.bnck", dir / "cut.bnck");
  fs::resize_file(dir / "cut.bnck", size / 2);
  CHECK_THROWS_AS((void)load_checkpoint(dir / "cut.bnck"),
                  std::runtime_error);
  fs::resize_file(dir / "cut.bnck", 4);
  CHECK_THROWS_AS((void)load_checkpoint(dir / "cut.bnck"),
                  std::runtime_error);
}

TEST_CASE("unknown container version is rejected explicitly") {
  const fs::path dir = temp_dir("version");
  RngStream rng(3);
  V2Config cfg;
  cfg.n_past = 2;
  Model m = build_v2(cfg, rng);
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& [name, t] : std::as_const(m).named_params())
    tensors.emplace_back(name, t);
  save_checkpoint(dir / "v.bnck", "v2", nlohmann::json::object(), tensors);

  std::fstream f(dir / "v.bnck",
                 std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(6);
  f.write("99", 2);  // bump the version digits inside the magic
  f.close();
  CHECK_THROWS_WITH_AS((void)load_checkpoint(dir / "v.bnck"),
                       doctest::Contains("version"), std::runtime_error);
}

TEST_CASE("restoring a v1 checkpoint into a v2 model fails loudly") {
  const fs::path dir = temp_dir("mismatch");
  RngStream rng(3);
  Model v1 = build_v1(V1Config{}, rng);
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& [name, t] : std::as_const(v1).named_params())
    tensors.emplace_back(name, t);
  save_checkpoint(dir / "v1.bnck", "v1", nlohmann::json::object(), tensors);

  const LoadedCheckpoint ck = load_checkpoint(dir / "v1.bnck");
  CHECK(ck.variant == "v1");
  V2Config cfg;
  cfg.n_past = 3;
  RngStream rng2(4);
  Model v2 = build_v2(cfg, rng2);
  CHECK_THROWS_AS(restore_params(v2, ck.tensors), std::runtime_error);
}
