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

#include <array>
#include <cstdint>

#include "beamsnet/rng.hpp"

// Janus-configuration beam geometry, the per-beam measurement error model
// and the least-squares body-velocity estimator. All types are immutable
// after construction and every function is pure (rng state is passed in),
// so everything here is safe to use concurrently.

namespace bn {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

/// Four-transducer "x" layout: common pitch, yaw_i = (i-1)*pi/2 + pi/4.
/// Row i of H is the direction cosine of beam i; H_pinv = (H^T H)^-1 H^T.
struct BeamGeometry {
  double pitch_alpha = 0.0;
  Vec4 yaw_psi{};
  double H[4][3]{};
  double H_pinv[3][4]{};
};

/// Throws std::domain_error unless 0 < pitch_alpha < pi/2 (H would lose
/// rank at the boundary values).
BeamGeometry build_geometry(double pitch_alpha);

/// Per-beam systematic errors plus white measurement noise.
struct BeamErrorParams {
  Vec4 bias{};        // m/s, additive per beam
  Vec4 scale{};       // unitless fraction, multiplicative per beam
  double noise_std = 0.0;  // m/s
  std::uint64_t seed = 0;
};

/// Clean beam projection: H * v.
Vec4 beams_from_velocity(const BeamGeometry& geom, const Vec3& v);

/// y_i = (Hv)_i * (1 + scale_i) + bias_i + n_i, n_i ~ N(0, noise_std^2).
/// Consumes exactly four normal draws from rng, noise_std == 0 included,
/// so the stream position never depends on parameter values.
Vec4 corrupt_beams(const BeamGeometry& geom, const Vec3& v,
                   const BeamErrorParams& p, RngStream& rng);

/// Least-squares estimate (H^T H)^-1 H^T y; minimizes ||y - Hv||^2.
Vec3 ls_estimate(const BeamGeometry& geom, const Vec4& y);

/// Beam velocity from Doppler frequency shift: (c / 2 f_t) * delta_f.
/// Throws std::domain_error for non-positive f_t or c.
Vec4 beam_velocity_from_freq_shift(const Vec4& delta_f, double f_t, double c);

/// Inverse of the above: delta_f = 2 f_t v_beam / c.
Vec4 freq_shift_from_beam(const Vec4& v_beam, double f_t, double c);

}  // namespace bn
