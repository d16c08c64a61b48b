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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beamsnet/rng.hpp"
#include "beamsnet/tensor.hpp"

// Minimal from-scratch neural-network engine: a fixed feed-forward graph
// of layer nodes, a recorded forward pass (tape) replayed in reverse for
// exact gradients, MSE loss, RMSprop with epoch step decay, Kaiming
// uniform initialization and a finite-difference gradient checker.
// Everything is 64-bit; the networks are tiny and gradient-check
// fidelity matters more than speed.

namespace bn {

enum class LayerKind {
  input,   // copies graph input slot `input_slot`
  dense,   // W [out,in], b [out]
  conv1d,  // W [F,k,C], b [F]; valid cross-correlation, stride 1
  relu,
  tanh_act,
  dropout,  // inverted: survivors scaled by 1/(1-p) at train time
  flatten,  // [B, ...] -> [B, rest]
  concat,   // rank-2 inputs concatenated along the feature axis
};

struct LayerNode {
  LayerKind kind = LayerKind::input;
  std::string name;
  std::vector<int> inputs;  // upstream node ids (topological order holds)
  int input_slot = -1;      // for LayerKind::input

  Tensor W, b;
  int filters = 0, kernel = 0, in_channels = 0;  // conv1d
  double dropout_p = 0.0;
};

struct Model {
  std::vector<LayerNode> nodes;  // topologically ordered; back() is output
  int num_inputs = 0;

  std::vector<std::pair<std::string, Tensor*>> named_params();
  std::vector<std::pair<std::string, const Tensor*>> named_params() const;
  std::size_t param_count() const;
};

enum class Mode { train, eval };

/// Recorded forward pass; per-node outputs plus dropout multipliers.
struct Tape {
  std::vector<Tensor> out;
  std::vector<Tensor> mask;
  Mode mode = Mode::eval;
  bool recorded = false;
};

/// Every graph input carries a leading batch dimension. Dropout in train
/// mode draws one uniform per element from rng (required then, unused in
/// eval mode). Throws std::invalid_argument on shape mismatches.
void forward(const Model& m, std::span<const Tensor> inputs, Mode mode,
             RngStream* rng, Tape& tape);

struct Gradients {
  std::vector<Tensor> dW, db;   // aligned with model nodes
  std::vector<Tensor> dinputs;  // aligned with graph input slots
};

/// Exact reverse-mode gradients for the recorded pass. Requires a tape
/// from forward() on the same inputs; dropout masks are replayed.
Gradients backward(const Model& m, const Tape& tape,
                   std::span<const Tensor> inputs, const Tensor& dout);

/// (1/n)||pred - target||^2 over all elements plus d/dpred = (2/n)(pred-t).
std::pair<double, Tensor> mse_loss(const Tensor& pred, const Tensor& target);

/// i.i.d. uniform on [-sqrt(6/fan_in), sqrt(6/fan_in)].
Tensor kaiming_uniform_init(std::vector<std::size_t> shape, std::size_t fan_in,
                            RngStream& rng);

struct RmsProp {
  double learning_rate = 0.01;
  double decay_factor = 0.1;
  int decay_every_epochs = 15;
  double rho = 0.9;
  double epsilon = 1e-8;

  double lr_at(int epoch) const;
  /// s <- rho*s + (1-rho)*g^2 ; theta <- theta - lr_epoch * g/(sqrt(s)+eps).
  /// Accumulators are created zeroed on the first step.
  void step(Model& m, const Gradients& g, int epoch);

  std::vector<Tensor> acc_w, acc_b;  // per-node squared-gradient averages
};

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> per_param;
  double worst = 0.0;
  bool pass(double threshold) const { return worst < threshold; }
};

/// Central-difference check of backward() against (L(+h)-L(-h))/2h under
/// the MSE loss, dropout frozen (eval mode). max_entries_per_tensor == 0
/// checks every entry; otherwise a deterministic subsample per tensor.
/// Throws std::invalid_argument for h <= 0.
GradCheckReport grad_check(Model& m, std::span<const Tensor> inputs,
                           const Tensor& target, double h,
                           std::size_t max_entries_per_tensor = 0);

// Graph-building helpers shared by the network definitions.
int add_input(Model& m, int slot, std::string name);
int add_dense(Model& m, int from, int in_features, int out_features,
              std::string name, RngStream& rng);
int add_conv1d(Model& m, int from, int filters, int kernel, int in_channels,
               std::string name, RngStream& rng);
int add_relu(Model& m, int from, std::string name);
int add_tanh(Model& m, int from, std::string name);
int add_dropout(Model& m, int from, double p, std::string name);
int add_flatten(Model& m, int from, std::string name);
int add_concat(Model& m, std::vector<int> from, std::string name);

}  // namespace bn
