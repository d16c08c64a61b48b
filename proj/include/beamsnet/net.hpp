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
#include <stdexcept>
#include <string>
#include <vector>

#include "beamsnet/nn.hpp"
#include "beamsnet/sim.hpp"

// The two beam-regression architectures and their training loop.
//
// V1 is three-headed: a conv head per inertial sensor block, features
// flattened, concatenated and pushed through a dense stack; the current
// 4-beam vector merges just before the output layer. V2 is two-headed:
// a conv head over n past beam vectors, a dense stack, the current beams
// merged before the output layer. Both regress the 3-vector body
// velocity.

namespace bn {

enum class Variant { v1, v2 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

struct V1Config {
  int conv_filters = 6;
  int conv_kernel = 2;
  double dropout_p = 0.2;
  std::vector<int> fc_sizes = {512, 64};
  std::vector<int> post_merge_fc = {16};
  int imu_block_len = 100;
};

struct V2Config {
  int n_past = 3;
  int conv_filters = 6;
  int conv_kernel = 2;
  std::vector<int> fc_sizes = {32, 16};
};

/// Inputs: accel [B,100,3], gyro [B,100,3], current beams [B,4].
Model build_v1(const V1Config& cfg, RngStream& rng);

/// Inputs: past beams [B,n,4] (oldest first), current beams [B,4].
/// Throws std::invalid_argument when n_past < conv_kernel.
Model build_v2(const V2Config& cfg, RngStream& rng);

struct TrainConfig {
  double learning_rate = 0.01;
  double decay_factor = 0.1;
  int decay_every_epochs = 15;
  int batch_size = 4;
  int epochs = 30;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // epoch average of mini-batch losses
  double test_loss = 0.0;   // eval-mode forward over the test split
  double lr = 0.0;
  double wall_s = 0.0;      // diagnostic only; never persisted
};

struct TrainLog {
  std::vector<EpochLog> epochs;
};

/// Raised when the loss stops being finite; carries the failing position.
struct TrainingDiverged : std::runtime_error {
  TrainingDiverged(int epoch, std::size_t batch)
      : std::runtime_error("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch)),
        epoch(epoch), batch(batch) {}
  int epoch;
  std::size_t batch;
};

/// Mini-batch RMSprop over the chronological train split, batches taken
/// in order, final short batch kept. Test loss uses eval-mode dropout.
TrainLog train(Model& m, Variant variant, const Dataset& ds,
               const TrainConfig& tc);

/// Deterministic eval-mode prediction for one window.
Vec3 predict(const Model& m, Variant variant, const SampleWindow& w);

/// Batched predictions over a window range [begin, end).
std::vector<Vec3> predict_range(const Model& m, Variant variant,
                                const Dataset& ds, std::size_t begin,
                                std::size_t end);

/// Pack windows into graph input tensors for the given variant. Throws
/// when a window lacks the inertial block (v1) or past beams (v2).
std::vector<Tensor> pack_inputs(Variant variant,
                                const SampleWindow* const* windows,
                                std::size_t count);

}  // namespace bn
