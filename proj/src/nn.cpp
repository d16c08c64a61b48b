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

#include "beamsnet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamsnet/kernels.hpp"

namespace bn {

namespace {

std::size_t batch_of(const Tensor& t) {
  if (t.shape.empty()) throw std::invalid_argument("nn: rank-0 tensor");
  return t.shape[0];
}

std::size_t features_of(const Tensor& t) {
  if (t.shape.size() != 2)
    throw std::invalid_argument("nn: expected a rank-2 [batch, features] "
                                "tensor");
  return t.shape[1];
}

void check_finite_params(const Tensor&) {
  // Finiteness is enforced at the loss (NaN aborts training); per-op
  // scanning would double the cost of every forward pass.
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> Model::named_params() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (auto& n : nodes) {
    if (n.W.size() > 0) out.emplace_back(n.name + ".W", &n.W);
    if (n.b.size() > 0) out.emplace_back(n.name + ".b", &n.b);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::named_params()
    const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& n : nodes) {
    if (n.W.size() > 0) out.emplace_back(n.name + ".W", &n.W);
    if (n.b.size() > 0) out.emplace_back(n.name + ".b", &n.b);
  }
  return out;
}

std::size_t Model::param_count() const {
  std::size_t c = 0;
  for (auto& [name, t] : named_params()) c += t->size();
  return c;
}

void forward(const Model& m, std::span<const Tensor> inputs, Mode mode,
             RngStream* rng, Tape& tape) {
  if (static_cast<int>(inputs.size()) != m.num_inputs)
    throw std::invalid_argument("forward: wrong number of graph inputs");
  if (mode == Mode::train && rng == nullptr)
    throw std::invalid_argument("forward: train mode needs an rng stream");

  tape.out.assign(m.nodes.size(), Tensor{});
  tape.mask.assign(m.nodes.size(), Tensor{});
  tape.mode = mode;

  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const LayerNode& node = m.nodes[i];
    switch (node.kind) {
      case LayerKind::input: {
        tape.out[i] = inputs[static_cast<std::size_t>(node.input_slot)];
        break;
      }
      case LayerKind::dense: {
        const Tensor& in = tape.out[node.inputs[0]];
        const std::size_t b = batch_of(in);
        const std::size_t nin = features_of(in);
        const std::size_t nout = node.W.shape[0];
        if (nin != node.W.shape[1])
          throw std::invalid_argument("dense " + node.name +
                                      ": input feature mismatch");
        Tensor out({b, nout});
        kern::gemm_nt(in.ptr(), node.W.ptr(), out.ptr(), b, nin, nout);
        for (std::size_t r = 0; r < b; ++r)
          for (std::size_t j = 0; j < nout; ++j)
            out.data[r * nout + j] += node.b.data[j];
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::conv1d: {
        const Tensor& in = tape.out[node.inputs[0]];
        if (in.shape.size() != 3)
          throw std::invalid_argument("conv1d " + node.name +
                                      ": expected [batch, length, channels]");
        const std::size_t b = in.shape[0];
        const std::size_t len = in.shape[1];
        const std::size_t ch = in.shape[2];
        const auto k = static_cast<std::size_t>(node.kernel);
        const auto f = static_cast<std::size_t>(node.filters);
        if (ch != static_cast<std::size_t>(node.in_channels))
          throw std::invalid_argument("conv1d " + node.name +
                                      ": channel mismatch");
        if (len < k)
          throw std::invalid_argument("conv1d " + node.name +
                                      ": input shorter than kernel");
        const std::size_t lout = len - k + 1;
        Tensor out({b, lout, f});
        const std::size_t kc = k * ch;
        for (std::size_t bi = 0; bi < b; ++bi) {
          const double* base = in.ptr() + bi * len * ch;
          double* orow = out.ptr() + bi * lout * f;
          for (std::size_t t = 0; t < lout; ++t)
            for (std::size_t fi = 0; fi < f; ++fi)
              orow[t * f + fi] = kern::dot(base + t * ch,
                                           node.W.ptr() + fi * kc, kc) +
                                 node.b.data[fi];
        }
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::relu: {
        const Tensor& in = tape.out[node.inputs[0]];
        Tensor out(in.shape);
        kern::relu(in.ptr(), out.ptr(), in.size());
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::tanh_act: {
        const Tensor& in = tape.out[node.inputs[0]];
        Tensor out(in.shape);
        kern::tanh_forward(in.ptr(), out.ptr(), in.size());
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::dropout: {
        const Tensor& in = tape.out[node.inputs[0]];
        if (mode == Mode::eval) {
          tape.out[i] = in;  // identity in eval mode
          break;
        }
        const double p = node.dropout_p;
        const double inv_keep = 1.0 / (1.0 - p);
        Tensor mask(in.shape);
        Tensor out(in.shape);
        for (std::size_t e = 0; e < in.size(); ++e) {
          mask.data[e] = (rng->uniform() >= p) ? inv_keep : 0.0;
          out.data[e] = in.data[e] * mask.data[e];
        }
        tape.mask[i] = std::move(mask);
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::flatten: {
        const Tensor& in = tape.out[node.inputs[0]];
        Tensor out = in;
        out.reshape({batch_of(in), in.size() / batch_of(in)});
        tape.out[i] = std::move(out);
        break;
      }
      case LayerKind::concat: {
        std::size_t b = batch_of(tape.out[node.inputs[0]]);
        std::size_t total = 0;
        for (int j : node.inputs) {
          const Tensor& in = tape.out[j];
          if (batch_of(in) != b)
            throw std::invalid_argument("concat " + node.name +
                                        ": batch mismatch");
          total += features_of(in);
        }
        Tensor out({b, total});
        std::size_t off = 0;
        for (int j : node.inputs) {
          const Tensor& in = tape.out[j];
          const std::size_t nf = in.shape[1];
          for (std::size_t r = 0; r < b; ++r)
            std::copy_n(in.ptr() + r * nf, nf,
                        out.ptr() + r * total + off);
          off += nf;
        }
        tape.out[i] = std::move(out);
        break;
      }
    }
    check_finite_params(tape.out[i]);
  }
  tape.recorded = true;
}

Gradients backward(const Model& m, const Tape& tape,
                   std::span<const Tensor> inputs, const Tensor& dout_in) {
  if (!tape.recorded)
    throw std::logic_error("backward: no recorded forward pass");
  if (!dout_in.same_shape(tape.out.back()))
    throw std::invalid_argument("backward: loss gradient shape mismatch");

  Gradients g;
  g.dW.resize(m.nodes.size());
  g.db.resize(m.nodes.size());
  g.dinputs.resize(static_cast<std::size_t>(m.num_inputs));

  std::vector<Tensor> douts(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    douts[i] = Tensor(tape.out[i].shape);
  douts.back() = dout_in;

  for (std::size_t ri = m.nodes.size(); ri-- > 0;) {
    const LayerNode& node = m.nodes[ri];
    const Tensor& dout = douts[ri];
    switch (node.kind) {
      case LayerKind::input: {
        const int slot = node.input_slot;
        Tensor& di = g.dinputs[static_cast<std::size_t>(slot)];
        if (di.size() == 0) di = Tensor(dout.shape);
        kern::axpy(1.0, dout.ptr(), di.ptr(), dout.size());
        break;
      }
      case LayerKind::dense: {
        const Tensor& in = tape.out[node.inputs[0]];
        const std::size_t b = in.shape[0];
        const std::size_t nin = in.shape[1];
        const std::size_t nout = node.W.shape[0];
        // dIn += dOut * W
        kern::gemm_nn(dout.ptr(), node.W.ptr(),
                      douts[node.inputs[0]].ptr(), b, nout, nin);
        // dW += dOut^T * in  (both [batch, ...])
        g.dW[ri] = Tensor(node.W.shape);
        kern::gemm_tn(dout.ptr(), in.ptr(), g.dW[ri].ptr(), nout, b, nin);
        g.db[ri] = Tensor(node.b.shape);
        for (std::size_t r = 0; r < b; ++r)
          for (std::size_t j = 0; j < nout; ++j)
            g.db[ri].data[j] += dout.data[r * nout + j];
        break;
      }
      case LayerKind::conv1d: {
        const Tensor& in = tape.out[node.inputs[0]];
        Tensor& din = douts[node.inputs[0]];
        const std::size_t b = in.shape[0];
        const std::size_t len = in.shape[1];
        const std::size_t ch = in.shape[2];
        const auto k = static_cast<std::size_t>(node.kernel);
        const auto f = static_cast<std::size_t>(node.filters);
        const std::size_t lout = len - k + 1;
        const std::size_t kc = k * ch;
        g.dW[ri] = Tensor(node.W.shape);
        g.db[ri] = Tensor(node.b.shape);
        for (std::size_t bi = 0; bi < b; ++bi) {
          const double* ibase = in.ptr() + bi * len * ch;
          double* dibase = din.ptr() + bi * len * ch;
          const double* dobase = dout.ptr() + bi * lout * f;
          for (std::size_t t = 0; t < lout; ++t)
            for (std::size_t fi = 0; fi < f; ++fi) {
              const double go = dobase[t * f + fi];
              if (go == 0.0) continue;
              kern::axpy(go, ibase + t * ch, g.dW[ri].ptr() + fi * kc, kc);
              kern::axpy(go, node.W.ptr() + fi * kc, dibase + t * ch, kc);
              g.db[ri].data[fi] += go;
            }
        }
        break;
      }
      case LayerKind::relu: {
        const Tensor& in = tape.out[node.inputs[0]];
        Tensor& din = douts[node.inputs[0]];
        for (std::size_t e = 0; e < in.size(); ++e)
          if (in.data[e] > 0.0) din.data[e] += dout.data[e];
        break;
      }
      case LayerKind::tanh_act: {
        const Tensor& y = tape.out[ri];
        Tensor& din = douts[node.inputs[0]];
        for (std::size_t e = 0; e < y.size(); ++e)
          din.data[e] += dout.data[e] * (1.0 - y.data[e] * y.data[e]);
        break;
      }
      case LayerKind::dropout: {
        Tensor& din = douts[node.inputs[0]];
        if (tape.mode == Mode::eval || tape.mask[ri].size() == 0) {
          kern::axpy(1.0, dout.ptr(), din.ptr(), dout.size());
        } else {
          const Tensor& mask = tape.mask[ri];
          for (std::size_t e = 0; e < dout.size(); ++e)
            din.data[e] += dout.data[e] * mask.data[e];
        }
        break;
      }
      case LayerKind::flatten: {
        Tensor& din = douts[node.inputs[0]];
        kern::axpy(1.0, dout.ptr(), din.ptr(), dout.size());
        break;
      }
      case LayerKind::concat: {
        const std::size_t b = dout.shape[0];
        const std::size_t total = dout.shape[1];
        std::size_t off = 0;
        for (int j : node.inputs) {
          Tensor& din = douts[j];
          const std::size_t nf = din.shape[1];
          for (std::size_t r = 0; r < b; ++r)
            kern::axpy(1.0, dout.ptr() + r * total + off,
                       din.ptr() + r * nf, nf);
          off += nf;
        }
        break;
      }
    }
  }
  (void)inputs;
  return g;
}

std::pair<double, Tensor> mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target))
    throw std::invalid_argument("mse_loss: shape mismatch");
  const std::size_t n = pred.size();
  double acc = 0.0;
  Tensor grad(pred.shape);
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred.data[i] - target.data[i];
    acc += d * d;
    grad.data[i] = scale * d;
  }
  return {acc / static_cast<double>(n), std::move(grad)};
}

Tensor kaiming_uniform_init(std::vector<std::size_t> shape,
                            std::size_t fan_in, RngStream& rng) {
  if (fan_in == 0)
    throw std::invalid_argument("kaiming init: fan_in must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

double RmsProp::lr_at(int epoch) const {
  return learning_rate *
         std::pow(decay_factor, std::floor(static_cast<double>(epoch) /
                                           decay_every_epochs));
}

void RmsProp::step(Model& m, const Gradients& g, int epoch) {
  if (acc_w.empty()) {
    acc_w.resize(m.nodes.size());
    acc_b.resize(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      if (m.nodes[i].W.size() > 0) acc_w[i] = Tensor(m.nodes[i].W.shape);
      if (m.nodes[i].b.size() > 0) acc_b[i] = Tensor(m.nodes[i].b.shape);
    }
  }
  const double lr = lr_at(epoch);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    LayerNode& node = m.nodes[i];
    if (node.W.size() > 0 && g.dW[i].size() > 0)
      kern::rmsprop_update(node.W.ptr(), acc_w[i].ptr(), g.dW[i].ptr(),
                           node.W.size(), lr, rho, epsilon);
    if (node.b.size() > 0 && g.db[i].size() > 0)
      kern::rmsprop_update(node.b.ptr(), acc_b[i].ptr(), g.db[i].ptr(),
                           node.b.size(), lr, rho, epsilon);
  }
}

GradCheckReport grad_check(Model& m, std::span<const Tensor> inputs,
                           const Tensor& target, double h,
                           std::size_t max_entries_per_tensor) {
  if (!(h > 0.0))
    throw std::invalid_argument("grad_check: step h must be positive");

  Tape tape;
  forward(m, inputs, Mode::eval, nullptr, tape);
  auto [loss0, dpred] = mse_loss(tape.out.back(), target);
  (void)loss0;
  Gradients analytic = backward(m, tape, inputs, dpred);

  auto loss_at = [&]() {
    Tape t2;
    forward(m, inputs, Mode::eval, nullptr, t2);
    return mse_loss(t2.out.back(), target).first;
  };

  GradCheckReport report;
  RngStream pick(0x67726164u);  // deterministic subsampling
  for (std::size_t ni = 0; ni < m.nodes.size(); ++ni) {
    LayerNode& node = m.nodes[ni];
    struct Slot { Tensor* param; const Tensor* grad; const char* tag; };
    Slot slots[2] = {{&node.W, &analytic.dW[ni], ".W"},
                     {&node.b, &analytic.db[ni], ".b"}};
    for (auto& s : slots) {
      if (s.param->size() == 0) continue;
      std::vector<std::size_t> idx;
      const std::size_t n = s.param->size();
      if (max_entries_per_tensor == 0 || n <= max_entries_per_tensor) {
        idx.resize(n);
        for (std::size_t e = 0; e < n; ++e) idx[e] = e;
      } else {
        idx.reserve(max_entries_per_tensor);
        for (std::size_t e = 0; e < max_entries_per_tensor; ++e)
          idx.push_back(pick.next_u64() % n);
      }
      double worst = 0.0;
      for (std::size_t e : idx) {
        double& theta = s.param->data[e];
        const double saved = theta;
        theta = saved + h;
        const double lp = loss_at();
        theta = saved - h;
        const double lm = loss_at();
        theta = saved;
        const double gn = (lp - lm) / (2.0 * h);
        const double ga = s.grad->size() > 0 ? s.grad->data[e] : 0.0;
        const double diff = std::abs(ga - gn);
        // The 1e-6 floor keeps the central-difference noise floor
        // (~1e-11 * |loss|) from dominating near-zero gradients.
        const double rel =
            diff / std::max({std::abs(ga), std::abs(gn), 1e-6});
        worst = std::max(worst, rel);
      }
      report.per_param.push_back({node.name + s.tag, worst});
      report.worst = std::max(report.worst, worst);
    }
  }
  return report;
}

int add_input(Model& m, int slot, std::string name) {
  LayerNode n;
  n.kind = LayerKind::input;
  n.input_slot = slot;
  n.name = std::move(name);
  m.num_inputs = std::max(m.num_inputs, slot + 1);
  m.nodes.push_back(std::move(n));
  return static_cast<int>(m.nodes.size()) - 1;
}

int add_dense(Model& m, int from, int in_features, int out_features,
              std::string name, RngStream& rng) {
  if (in_features <= 0 || out_features <= 0)
    throw std::invalid_argument("dense " + name + ": bad feature counts");
  LayerNode n;
  n.kind = LayerKind::dense;
  n.inputs = {from};
  n.name = std::move(name);
  n.W = kaiming_uniform_init({static_cast<std::size_t>(out_features),
                              static_cast<std::size_t>(in_features)},
                             static_cast<std::size_t>(in_features), rng);
  n.b = Tensor({static_cast<std::size_t>(out_features)});  // zeros
  m.nodes.push_back(std::move(n));
  return static_cast<int>(m.nodes.size()) - 1;
}

int add_conv1d(Model& m, int from, int filters, int kernel, int in_channels,
               std::string name, RngStream& rng) {
  if (filters <= 0 || kernel < 1 || in_channels <= 0)
    throw std::invalid_argument("conv1d " + name + ": bad config");
  LayerNode n;
  n.kind = LayerKind::conv1d;
  n.inputs = {from};
  n.name = std::move(name);
  n.filters = filters;
  n.kernel = kernel;
  n.in_channels = in_channels;
  const auto fan_in =
      static_cast<std::size_t>(kernel) * static_cast<std::size_t>(in_channels);
  n.W = kaiming_uniform_init({static_cast<std::size_t>(filters),
                              static_cast<std::size_t>(kernel),
                              static_cast<std::size_t>(in_channels)},
                             fan_in, rng);
  n.b = Tensor({static_cast<std::size_t>(filters)});
  m.nodes.push_back(std::move(n));
  return static_cast<int>(m.nodes.size()) - 1;
}

namespace {
int add_simple(Model& m, LayerKind kind, int from, std::string name) {
  LayerNode n;
  n.kind = kind;
  n.inputs = {from};
  n.name = std::move(name);
  m.nodes.push_back(std::move(n));
  return static_cast<int>(m.nodes.size()) - 1;
}
}  // namespace

int add_relu(Model& m, int from, std::string name) {
  return add_simple(m, LayerKind::relu, from, std::move(name));
}
int add_tanh(Model& m, int from, std::string name) {
  return add_simple(m, LayerKind::tanh_act, from, std::move(name));
}
int add_dropout(Model& m, int from, double p, std::string name) {
  if (p < 0.0 || p >= 1.0)
    throw std::invalid_argument("dropout " + name + ": p must be in [0,1)");
  int id = add_simple(m, LayerKind::dropout, from, std::move(name));
  m.nodes[static_cast<std::size_t>(id)].dropout_p = p;
  return id;
}
int add_flatten(Model& m, int from, std::string name) {
  return add_simple(m, LayerKind::flatten, from, std::move(name));
}
int add_concat(Model& m, std::vector<int> from, std::string name) {
  LayerNode n;
  n.kind = LayerKind::concat;
  n.inputs = std::move(from);
  n.name = std::move(name);
  m.nodes.push_back(std::move(n));
  return static_cast<int>(m.nodes.size()) - 1;
}

}  // namespace bn
