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

#include "beamsnet/net.hpp"

#include <chrono>
#include <cmath>

namespace bn {

std::string variant_name(Variant v) {
  return v == Variant::v1 ? "v1" : "v2";
}

Variant variant_from_name(const std::string& s) {
  if (s == "v1") return Variant::v1;
  if (s == "v2") return Variant::v2;
  throw std::invalid_argument("unknown network variant: " + s);
}

Model build_v1(const V1Config& cfg, RngStream& rng) {
  if (cfg.conv_kernel < 1 || cfg.conv_kernel > cfg.imu_block_len)
    throw std::invalid_argument("v1: conv kernel inconsistent with the "
                                "inertial block length");
  if (cfg.dropout_p < 0.0 || cfg.dropout_p >= 1.0)
    throw std::invalid_argument("v1: dropout p must be in [0,1)");
  if (cfg.fc_sizes.empty())
    throw std::invalid_argument("v1: fc_sizes must not be empty");

  Model m;
  const int lout = cfg.imu_block_len - cfg.conv_kernel + 1;
  const int head_feats = lout * cfg.conv_filters;

  int accel_in = add_input(m, 0, "accel_in");
  int gyro_in = add_input(m, 1, "gyro_in");
  int beams_in = add_input(m, 2, "beams_in");

  int ca = add_conv1d(m, accel_in, cfg.conv_filters, cfg.conv_kernel, 3,
                      "conv_accel", rng);
  ca = add_relu(m, ca, "conv_accel_relu");
  ca = add_flatten(m, ca, "accel_flat");
  int cg = add_conv1d(m, gyro_in, cfg.conv_filters, cfg.conv_kernel, 3,
                      "conv_gyro", rng);
  cg = add_relu(m, cg, "conv_gyro_relu");
  cg = add_flatten(m, cg, "gyro_flat");

  int merged = add_concat(m, {ca, cg}, "imu_features");
  merged = add_dropout(m, merged, cfg.dropout_p, "dropout");

  int feats = 2 * head_feats;
  int cur = merged;
  for (std::size_t i = 0; i < cfg.fc_sizes.size(); ++i) {
    const int out = cfg.fc_sizes[i];
    cur = add_dense(m, cur, feats, out, "fc" + std::to_string(i + 1), rng);
    // Tanh bounds the features entering the beam merge; ReLU elsewhere.
    if (i + 1 == cfg.fc_sizes.size())
      cur = add_tanh(m, cur, "fc" + std::to_string(i + 1) + "_tanh");
    else
      cur = add_relu(m, cur, "fc" + std::to_string(i + 1) + "_relu");
    feats = out;
  }

  cur = add_concat(m, {cur, beams_in}, "beam_merge");
  feats += 4;
  for (std::size_t i = 0; i < cfg.post_merge_fc.size(); ++i) {
    const int out = cfg.post_merge_fc[i];
    cur = add_dense(m, cur, feats, out, "post" + std::to_string(i + 1), rng);
    cur = add_relu(m, cur, "post" + std::to_string(i + 1) + "_relu");
    feats = out;
  }
  add_dense(m, cur, feats, 3, "out", rng);
  return m;
}

Model build_v2(const V2Config& cfg, RngStream& rng) {
  if (cfg.n_past < cfg.conv_kernel)
    throw std::invalid_argument("v2: n_past must be >= conv_kernel");
  if (cfg.fc_sizes.empty())
    throw std::invalid_argument("v2: fc_sizes must not be empty");

  Model m;
  const int lout = cfg.n_past - cfg.conv_kernel + 1;

  int past_in = add_input(m, 0, "past_in");
  int beams_in = add_input(m, 1, "beams_in");

  int c = add_conv1d(m, past_in, cfg.conv_filters, cfg.conv_kernel, 4,
                     "conv_past", rng);
  c = add_relu(m, c, "conv_past_relu");
  c = add_flatten(m, c, "past_flat");

  int feats = lout * cfg.conv_filters;
  int cur = c;
  for (std::size_t i = 0; i < cfg.fc_sizes.size(); ++i) {
    const int out = cfg.fc_sizes[i];
    cur = add_dense(m, cur, feats, out, "fc" + std::to_string(i + 1), rng);
    if (i + 1 == cfg.fc_sizes.size())
      cur = add_tanh(m, cur, "fc" + std::to_string(i + 1) + "_tanh");
    else
      cur = add_relu(m, cur, "fc" + std::to_string(i + 1) + "_relu");
    feats = out;
  }

  cur = add_concat(m, {cur, beams_in}, "beam_merge");
  add_dense(m, cur, feats + 4, 3, "out", rng);
  return m;
}

std::vector<Tensor> pack_inputs(Variant variant,
                                const SampleWindow* const* windows,
                                std::size_t count) {
  if (count == 0) throw std::invalid_argument("pack_inputs: empty batch");
  if (variant == Variant::v1) {
    const SampleWindow& first = *windows[0];
    if (first.accel.size() == 0 || first.gyro.size() == 0)
      throw std::invalid_argument("v1 window is missing its inertial block");
    const std::size_t r = first.accel.shape[0];
    Tensor accel({count, r, 3}), gyro({count, r, 3}), beams({count, 4});
    for (std::size_t i = 0; i < count; ++i) {
      const SampleWindow& w = *windows[i];
      if (w.accel.shape != first.accel.shape)
        throw std::invalid_argument("v1 batch has mixed IMU block shapes");
      std::copy(w.accel.data.begin(), w.accel.data.end(),
                accel.data.begin() + i * r * 3);
      std::copy(w.gyro.data.begin(), w.gyro.data.end(),
                gyro.data.begin() + i * r * 3);
      for (int bidx = 0; bidx < 4; ++bidx)
        beams.data[i * 4 + bidx] = w.current_beams[bidx];
    }
    return {std::move(accel), std::move(gyro), std::move(beams)};
  }
  const std::size_t n = windows[0]->past_beams.size();
  if (n == 0)
    throw std::invalid_argument("v2 window has no past beam measurements");
  Tensor past({count, n, 4}), beams({count, 4});
  for (std::size_t i = 0; i < count; ++i) {
    const SampleWindow& w = *windows[i];
    if (w.past_beams.size() != n)
      throw std::invalid_argument("v2 batch has mixed past-beam counts");
    for (std::size_t p = 0; p < n; ++p)
      for (int bidx = 0; bidx < 4; ++bidx)
        past.data[(i * n + p) * 4 + bidx] = w.past_beams[p][bidx];
    for (int bidx = 0; bidx < 4; ++bidx)
      beams.data[i * 4 + bidx] = w.current_beams[bidx];
  }
  return {std::move(past), std::move(beams)};
}

namespace {

Tensor pack_targets(const SampleWindow* const* windows, std::size_t count) {
  Tensor t({count, 3});
  for (std::size_t i = 0; i < count; ++i)
    for (int a = 0; a < 3; ++a)
      t.data[i * 3 + a] = windows[i]->gt_velocity[a];
  return t;
}

double eval_split_loss(const Model& m, Variant variant, const Dataset& ds,
                       std::size_t begin, std::size_t end) {
  constexpr std::size_t kEvalBatch = 64;
  double acc = 0.0;
  std::size_t total = 0;
  std::vector<const SampleWindow*> ptrs;
  for (std::size_t i = begin; i < end; i += kEvalBatch) {
    const std::size_t b = std::min(kEvalBatch, end - i);
    ptrs.clear();
    for (std::size_t j = 0; j < b; ++j) ptrs.push_back(&ds.windows[i + j]);
    auto inputs = pack_inputs(variant, ptrs.data(), b);
    Tape tape;
    forward(m, inputs, Mode::eval, nullptr, tape);
    Tensor targets = pack_targets(ptrs.data(), b);
    acc += mse_loss(tape.out.back(), targets).first *
           static_cast<double>(b * 3);
    total += b * 3;
  }
  return total == 0 ? 0.0 : acc / static_cast<double>(total);
}

}  // namespace

TrainLog train(Model& m, Variant variant, const Dataset& ds,
               const TrainConfig& tc) {
  if (tc.batch_size < 1 || tc.epochs < 1)
    throw std::invalid_argument("train: batch_size and epochs must be >= 1");
  if (ds.train_count() == 0)
    throw std::invalid_argument("train: dataset has an empty train split");

  RngStream dropout_rng(RngStream::derive(tc.seed, "train-dropout", 0));
  RmsProp opt;
  opt.learning_rate = tc.learning_rate;
  opt.decay_factor = tc.decay_factor;
  opt.decay_every_epochs = tc.decay_every_epochs;

  TrainLog log;
  std::vector<const SampleWindow*> ptrs;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double train_acc = 0.0;
    std::size_t train_elems = 0;
    const auto bs = static_cast<std::size_t>(tc.batch_size);
    std::size_t batch_index = 0;
    for (std::size_t i = 0; i < ds.train_count(); i += bs, ++batch_index) {
      const std::size_t b = std::min(bs, ds.train_count() - i);
      ptrs.clear();
      for (std::size_t j = 0; j < b; ++j) ptrs.push_back(&ds.windows[i + j]);
      auto inputs = pack_inputs(variant, ptrs.data(), b);
      Tensor targets = pack_targets(ptrs.data(), b);

      Tape tape;
      forward(m, inputs, Mode::train, &dropout_rng, tape);
      auto [loss, dpred] = mse_loss(tape.out.back(), targets);
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch, batch_index);
      Gradients grads = backward(m, tape, inputs, dpred);
      opt.step(m, grads, epoch);

      train_acc += loss * static_cast<double>(b * 3);
      train_elems += b * 3;
    }

    EpochLog e;
    e.epoch = epoch;
    e.train_loss = train_acc / static_cast<double>(train_elems);
    e.test_loss = eval_split_loss(m, variant, ds, ds.split_index,
                                  ds.windows.size());
    e.lr = opt.lr_at(epoch);
    e.wall_s = std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(e);
  }
  return log;
}

Vec3 predict(const Model& m, Variant variant, const SampleWindow& w) {
  const SampleWindow* ptr = &w;
  auto inputs = pack_inputs(variant, &ptr, 1);
  Tape tape;
  forward(m, inputs, Mode::eval, nullptr, tape);
  const Tensor& out = tape.out.back();
  return {out.data[0], out.data[1], out.data[2]};
}

std::vector<Vec3> predict_range(const Model& m, Variant variant,
                                const Dataset& ds, std::size_t begin,
                                std::size_t end) {
  constexpr std::size_t kBatch = 64;
  std::vector<Vec3> out;
  out.reserve(end - begin);
  std::vector<const SampleWindow*> ptrs;
  for (std::size_t i = begin; i < end; i += kBatch) {
    const std::size_t b = std::min(kBatch, end - i);
    ptrs.clear();
    for (std::size_t j = 0; j < b; ++j) ptrs.push_back(&ds.windows[i + j]);
    auto inputs = pack_inputs(variant, ptrs.data(), b);
    Tape tape;
    forward(m, inputs, Mode::eval, nullptr, tape);
    const Tensor& pred = tape.out.back();
    for (std::size_t j = 0; j < b; ++j)
      out.push_back({pred.data[j * 3], pred.data[j * 3 + 1],
                     pred.data[j * 3 + 2]});
  }
  return out;
}

}  // namespace bn
