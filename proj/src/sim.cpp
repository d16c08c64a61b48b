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

#include "beamsnet/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace bn {

void validate(const TrajectorySpec& spec) {
  if (spec.speed < 0.0)
    throw std::invalid_argument("trajectory: speed must be >= 0");
  if (!(spec.duration_s > 0.0))
    throw std::invalid_argument("trajectory: duration must be > 0");
  if (spec.imu_rate <= 0 || spec.dvl_rate <= 0 ||
      spec.imu_rate % spec.dvl_rate != 0)
    throw std::invalid_argument(
        "trajectory: imu_rate must be a positive integer multiple of "
        "dvl_rate");
}

std::vector<Vec3> generate_trajectory(const TrajectorySpec& spec) {
  validate(spec);
  const auto n = static_cast<std::size_t>(
      std::llround(spec.duration_s * spec.dvl_rate));
  const Vec3 v{spec.speed * std::cos(spec.heading),
               spec.speed * std::sin(spec.heading), 0.0};
  return std::vector<Vec3>(n, v);
}

ImuStream synthesize_imu(const TrajectorySpec& spec, const ImuErrorParams& p,
                         RngStream& rng) {
  validate(spec);
  if (p.accel_noise_std < 0.0 || p.gyro_noise_std < 0.0)
    throw std::invalid_argument("imu params: noise std must be >= 0");
  const auto n = static_cast<std::size_t>(
      std::llround(spec.duration_s * spec.imu_rate));
  ImuStream s;
  s.accel.resize(n);
  s.gyro.resize(n);
  const Vec3 clean_f{0.0, 0.0, -spec.gravity};
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a)
      s.accel[i][a] =
          clean_f[a] + p.accel_bias[a] + p.accel_noise_std * rng.normal();
    for (int a = 0; a < 3; ++a)
      s.gyro[i][a] = p.gyro_bias[a] + p.gyro_noise_std * rng.normal();
  }
  return s;
}

BeamStreams synthesize_dvl(const BeamGeometry& geom,
                           const std::vector<Vec3>& velocities,
                           const BeamErrorParams& p, RngStream& rng) {
  BeamStreams out;
  out.clean.reserve(velocities.size());
  out.measured.reserve(velocities.size());
  for (const Vec3& v : velocities) {
    out.clean.push_back(beams_from_velocity(geom, v));
    out.measured.push_back(corrupt_beams(geom, v, p, rng));
  }
  return out;
}

void append_mission_windows(Dataset& ds, const ImuStream& imu,
                            const std::vector<Vec4>& measured_beams,
                            const std::vector<Vec3>& gt_velocities,
                            int imu_per_dvl, int n_past, double t0,
                            double dvl_dt) {
  if (measured_beams.size() != gt_velocities.size())
    throw std::invalid_argument("windows: beam/velocity stream length "
                                "mismatch");
  if (imu.accel.size() != imu.gyro.size())
    throw std::invalid_argument("windows: accel/gyro stream length mismatch");
  if (imu_per_dvl <= 0 || n_past < 0)
    throw std::invalid_argument("windows: bad imu_per_dvl or n_past");

  const std::size_t epochs = measured_beams.size();
  const auto r = static_cast<std::size_t>(imu_per_dvl);
  const std::size_t first =
      std::max<std::size_t>(static_cast<std::size_t>(n_past), 1);
  for (std::size_t k = first; k < epochs; ++k) {
    // IMU block [(k-1)*R+1 .. k*R]: the R samples strictly after the
    // previous epoch, ending at the current one.
    const std::size_t lo = (k - 1) * r + 1;
    if (lo + r - 1 >= imu.accel.size())
      throw std::invalid_argument("windows: IMU stream too short for DVL "
                                  "epoch count");
    SampleWindow w;
    w.accel = Tensor({r, 3});
    w.gyro = Tensor({r, 3});
    for (std::size_t j = 0; j < r; ++j)
      for (int a = 0; a < 3; ++a) {
        w.accel.data[j * 3 + a] = imu.accel[lo + j][a];
        w.gyro.data[j * 3 + a] = imu.gyro[lo + j][a];
      }
    w.current_beams = measured_beams[k];
    w.past_beams.reserve(static_cast<std::size_t>(n_past));
    for (std::size_t q = k - static_cast<std::size_t>(n_past); q < k; ++q)
      w.past_beams.push_back(measured_beams[q]);
    w.gt_velocity = gt_velocities[k];
    w.t = t0 + static_cast<double>(k) * dvl_dt;
    ds.windows.push_back(std::move(w));
  }
  ds.n_past = n_past;
}

void apply_chronological_split(Dataset& ds, double train_fraction) {
  ds.split_index = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(ds.windows.size())));
}

Dataset build_dataset(const ImuStream& imu,
                      const std::vector<Vec4>& measured_beams,
                      const std::vector<Vec3>& gt_velocities, int imu_per_dvl,
                      int n_past, double dvl_dt) {
  Dataset ds;
  append_mission_windows(ds, imu, measured_beams, gt_velocities, imu_per_dvl,
                         n_past, /*t0=*/0.0, dvl_dt);
  apply_chronological_split(ds);
  return ds;
}

}  // namespace bn
