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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "beamsnet/nn.hpp"
#include "beamsnet/sim.hpp"

// Mission file ingestion and persistence, dataset fingerprinting,
// checkpoint serialization, and the ground-truth re-corruption procedure
// for recorded data.
//
// A mission is a directory with three entries (see docs/mission_format.md):
//   imu.csv   t,fx,fy,fz,gx,gy,gz        nominal 100 Hz
//   dvl.csv   t[,b1,b2,b3,b4],vx,vy,vz   nominal 1 Hz
//   meta.json mission id, rates, notes
// Floats are written with 17 significant digits so every value survives a
// round trip exactly.

namespace bn {

struct MissionError : std::runtime_error {
  enum class Kind { unreadable, missing_column, non_monotone_time, bad_value };
  MissionError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

struct MissionMeta {
  std::string id;
  double imu_rate_hz = 100.0;
  double dvl_rate_hz = 1.0;
  std::string notes;
};

struct ImuRow {
  double t;
  Vec3 f;  // specific force, m/s^2
  Vec3 w;  // angular rate, rad/s
};

struct DvlRow {
  double t;
  std::optional<Vec4> beams;  // m/s, absent in velocity-only recordings
  Vec3 v;                      // recorded DVL velocity, m/s
};

struct MissionFile {
  MissionMeta meta;
  std::vector<ImuRow> imu;
  std::vector<DvlRow> dvl;
  std::vector<std::string> warnings;  // e.g. rate deviation beyond 1%
  bool has_beams() const { return !dvl.empty() && dvl.front().beams.has_value(); }
};

MissionFile load_mission(const std::filesystem::path& dir);
void save_mission(const MissionFile& mission,
                  const std::filesystem::path& dir);

/// Windows from missions whose dvl.csv already carries beam columns
/// (e.g. synthetic missions; gt = recorded velocity). Windows never span
/// a mission boundary.
Dataset dataset_from_missions(std::span<const MissionFile> missions,
                              int n_past);

/// The recorded-data procedure: recorded DVL velocity becomes ground
/// truth; beams are synthesized through H and pushed through the beam
/// error model. With prenoise set, white noise of prenoise_std is added
/// to the recorded velocity first (the non-default alternative).
Dataset recorrupt_recorded(std::span<const MissionFile> missions,
                           const BeamGeometry& geom,
                           const BeamErrorParams& params, int n_past,
                           RngStream& rng, bool prenoise = false,
                           double prenoise_std = 1e-4);

/// Content hash over window payloads and the split; stable across
/// platforms for the same logical content (bytes are hashed in little-
/// endian IEEE-754 order).
std::uint64_t dataset_fingerprint(const Dataset& ds);

/// Versioned binary container; parameters round trip bit-exactly.
void save_checkpoint(const std::filesystem::path& path,
                     const std::string& variant,
                     const nlohmann::json& header,
                     const std::vector<std::pair<std::string, const Tensor*>>&
                         tensors);

struct LoadedCheckpoint {
  std::string variant;
  std::string header_json;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

/// Throws on corrupt/truncated containers and unknown format versions;
/// no silent migration.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Copy named tensors into a freshly built model. Throws when a name or
/// shape does not match the model's parameters.
void restore_params(Model& m,
                    const std::vector<std::pair<std::string, Tensor>>& tensors);

}  // namespace bn
