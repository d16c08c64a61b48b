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

#include "beamsnet/dvl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bn {

namespace {

// 3x3 inverse by cofactors; H^T H is tiny and well conditioned for any
// valid pitch, so no decomposition machinery is warranted.
void invert3(const double a[3][3], double inv[3][3]) {
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (std::abs(det) < 1e-15)
    throw std::domain_error("beam geometry: H^T H is singular");
  const double d = 1.0 / det;
  inv[0][0] = c00 * d;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * d;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * d;
  inv[1][0] = c01 * d;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * d;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * d;
  inv[2][0] = c02 * d;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * d;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * d;
}

}  // namespace

BeamGeometry build_geometry(double pitch_alpha) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(pitch_alpha > 0.0) || !(pitch_alpha < half_pi))
    throw std::domain_error(
        "beam geometry: pitch must lie in (0, pi/2), got a rank-deficient "
        "configuration otherwise");

  BeamGeometry g;
  g.pitch_alpha = pitch_alpha;
  const double sa = std::sin(pitch_alpha);
  const double ca = std::cos(pitch_alpha);
  for (int i = 0; i < 4; ++i) {
    g.yaw_psi[i] = i * half_pi + std::numbers::pi / 4.0;
    g.H[i][0] = std::cos(g.yaw_psi[i]) * sa;
    g.H[i][1] = std::sin(g.yaw_psi[i]) * sa;
    g.H[i][2] = ca;
  }

  double hth[3][3]{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 4; ++i) hth[r][c] += g.H[i][r] * g.H[i][c];

  double inv[3][3];
  invert3(hth, inv);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int c = 0; c < 3; ++c) acc += inv[r][c] * g.H[i][c];
      g.H_pinv[r][i] = acc;
    }
  return g;
}

Vec4 beams_from_velocity(const BeamGeometry& geom, const Vec3& v) {
  Vec4 out{};
  for (int i = 0; i < 4; ++i)
    out[i] = geom.H[i][0] * v[0] + geom.H[i][1] * v[1] + geom.H[i][2] * v[2];
  return out;
}

Vec4 corrupt_beams(const BeamGeometry& geom, const Vec3& v,
                   const BeamErrorParams& p, RngStream& rng) {
  Vec4 clean = beams_from_velocity(geom, v);
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    const double n = rng.normal();
    out[i] = clean[i] * (1.0 + p.scale[i]) + p.bias[i] + p.noise_std * n;
  }
  return out;
}

Vec3 ls_estimate(const BeamGeometry& geom, const Vec4& y) {
  Vec3 v{};
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 4; ++i) v[r] += geom.H_pinv[r][i] * y[i];
  return v;
}

Vec4 beam_velocity_from_freq_shift(const Vec4& delta_f, double f_t, double c) {
  if (!(f_t > 0.0) || !(c > 0.0))
    throw std::domain_error("beam velocity: f_t and c must be positive");
  const double k = c / (2.0 * f_t);
  return {k * delta_f[0], k * delta_f[1], k * delta_f[2], k * delta_f[3]};
}

Vec4 freq_shift_from_beam(const Vec4& v_beam, double f_t, double c) {
  if (!(f_t > 0.0) || !(c > 0.0))
    throw std::domain_error("freq shift: f_t and c must be positive");
  const double k = 2.0 * f_t / c;
  return {k * v_beam[0], k * v_beam[1], k * v_beam[2], k * v_beam[3]};
}

}  // namespace bn
