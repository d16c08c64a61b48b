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

#include "beamsnet/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace bn::metrics {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("metrics: series length mismatch");
  if (a.empty()) throw std::invalid_argument("metrics: empty series");
}

double mean(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double population_var(std::span<const double> x) {
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(x.size());
}

}  // namespace

double rmse(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

double mae(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    acc += std::abs(truth[i] - pred[i]);
  return acc / static_cast<double>(truth.size());
}

double r2(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  const double mu = mean(truth);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mu) * (truth[i] - mu);
  }
  if (ss_tot == 0.0)
    throw std::domain_error("r2: undefined for a constant ground truth");
  return 1.0 - ss_res / ss_tot;
}

double vaf(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  const double var_truth = population_var(truth);
  if (var_truth == 0.0)
    throw std::domain_error("vaf: undefined for zero-variance ground truth");
  std::vector<double> err(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) err[i] = truth[i] - pred[i];
  return (1.0 - population_var(err) / var_truth) * 100.0;
}

double improvement(double baseline_rmse, double method_rmse) {
  if (!(baseline_rmse > 0.0))
    throw std::domain_error("improvement: baseline rmse must be positive");
  return 100.0 * (baseline_rmse - method_rmse) / baseline_rmse;
}

std::vector<double> norm_series(std::span<const Vec3> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Vec3& x : v)
    out.push_back(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  return out;
}

EvalReport make_report(std::span<const double> truth_norms,
                       std::span<const double> pred_norms,
                       std::optional<double> baseline_rmse) {
  EvalReport r;
  r.n = truth_norms.size();
  r.rmse = rmse(truth_norms, pred_norms);
  r.mae = mae(truth_norms, pred_norms);
  r.r2 = r2(truth_norms, pred_norms);
  r.vaf = vaf(truth_norms, pred_norms);
  if (baseline_rmse) r.improvement_vs_baseline =
      improvement(*baseline_rmse, r.rmse);
  if (r.rmse < r.mae)
    throw std::logic_error("metrics: rmse < mae cannot hold for one series "
                           "pair");
  return r;
}

}  // namespace bn::metrics
