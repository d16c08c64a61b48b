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

#include <optional>
#include <span>
#include <vector>

#include "beamsnet/dvl.hpp"

// Scalar evaluation metrics over velocity-norm series. All pure
// functions; population (1/N) variance in the R^2 and VAF denominators.

namespace bn::metrics {

double rmse(std::span<const double> truth, std::span<const double> pred);
double mae(std::span<const double> truth, std::span<const double> pred);

/// 1 - SS_res / SS_tot. Throws std::domain_error for constant truth.
double r2(std::span<const double> truth, std::span<const double> pred);

/// 100 * (1 - var(truth - pred) / var(truth)). Throws std::domain_error
/// when var(truth) == 0.
double vaf(std::span<const double> truth, std::span<const double> pred);

/// 100 * (baseline - method) / baseline. Throws std::domain_error for a
/// non-positive baseline.
double improvement(double baseline_rmse, double method_rmse);

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  double vaf = 0.0;
  std::size_t n = 0;
  std::optional<double> improvement_vs_baseline;
};

/// Norms of a velocity series; the acceptance quantities are computed on
/// these, per-axis metrics stay diagnostic.
std::vector<double> norm_series(std::span<const Vec3> v);

EvalReport make_report(std::span<const double> truth_norms,
                       std::span<const double> pred_norms,
                       std::optional<double> baseline_rmse = std::nullopt);

}  // namespace bn::metrics
