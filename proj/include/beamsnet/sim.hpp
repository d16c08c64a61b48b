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
#include <vector>

#include "beamsnet/dvl.hpp"
#include "beamsnet/rng.hpp"
#include "beamsnet/tensor.hpp"

// Straight-line constant-speed trajectories with synchronized synthetic
// IMU (100 Hz) and DVL (1 Hz) streams, and the windowing that pairs each
// DVL epoch with the inertial block strictly preceding it.

namespace bn {

struct TrajectorySpec {
  double speed = 1.0;      // m/s
  double duration_s = 0.0;
  double heading = 0.0;    // rad; rotates the body velocity in the x-y plane
  int imu_rate = 100;      // Hz
  int dvl_rate = 1;        // Hz
  double gravity = 9.81;   // m/s^2
};

/// Throws std::invalid_argument on non-positive duration, negative speed
/// or imu_rate not an integer multiple of dvl_rate.
void validate(const TrajectorySpec& spec);

struct ImuErrorParams {
  Vec3 accel_bias{};
  Vec3 gyro_bias{};
  double accel_noise_std = 0.01;   // m/s^2
  double gyro_noise_std = 0.001;   // rad/s
  std::uint64_t seed = 0;
};

/// Body-frame velocity per DVL epoch; count = duration_s * dvl_rate.
std::vector<Vec3> generate_trajectory(const TrajectorySpec& spec);

struct ImuStream {
  std::vector<Vec3> accel;  // specific force, z down-positive body frame:
                            // level constant-velocity flight reads [0,0,-g]
  std::vector<Vec3> gyro;
};

/// Clean specific force [0,0,-gravity] and zero angular rate, plus bias
/// and Gaussian noise. Draw order per sample: 3 accel, then 3 gyro.
ImuStream synthesize_imu(const TrajectorySpec& spec, const ImuErrorParams& p,
                         RngStream& rng);

struct BeamStreams {
  std::vector<Vec4> clean;     // H * v, kept for ground-truth checks
  std::vector<Vec4> measured;  // after the beam error model
};

BeamStreams synthesize_dvl(const BeamGeometry& geom,
                           const std::vector<Vec3>& velocities,
                           const BeamErrorParams& p, RngStream& rng);

/// One training example: the inertial block ending at a DVL epoch, the
/// epoch's measured beams, optionally n past measured beam vectors
/// (newest last), and the clean body velocity as ground truth.
struct SampleWindow {
  Tensor accel;                 // [imu_block, 3]
  Tensor gyro;                  // [imu_block, 3]
  Vec4 current_beams{};
  std::vector<Vec4> past_beams; // n_past rows, oldest first
  Vec3 gt_velocity{};
  double t = 0.0;               // s, epoch time
};

struct Dataset {
  std::vector<SampleWindow> windows;  // time-ordered
  std::size_t split_index = 0;        // first test window
  int n_past = 0;

  std::size_t train_count() const { return split_index; }
  std::size_t test_count() const { return windows.size() - split_index; }
};

/// Append windows for one contiguous mission. Epoch k (k >= 1, k >= n_past)
/// pairs with IMU samples [(k-1)*R+1, k*R] where R = imu samples per DVL
/// interval; earlier epochs are warm-up and dropped, never zero-padded.
/// IMU sample j is taken at t0 + j/imu_rate, DVL epoch k at t0 + k/dvl_rate.
/// Throws std::invalid_argument when the streams are misaligned/too short.
void append_mission_windows(Dataset& ds, const ImuStream& imu,
                            const std::vector<Vec4>& measured_beams,
                            const std::vector<Vec3>& gt_velocities,
                            int imu_per_dvl, int n_past, double t0,
                            double dvl_dt);

/// Chronological 75/25 split: split_index = floor(0.75 * windows).
void apply_chronological_split(Dataset& ds, double train_fraction = 0.75);

/// Single-mission convenience wrapper used by the simulation pipeline.
Dataset build_dataset(const ImuStream& imu,
                      const std::vector<Vec4>& measured_beams,
                      const std::vector<Vec3>& gt_velocities, int imu_per_dvl,
                      int n_past, double dvl_dt = 1.0);

}  // namespace bn
