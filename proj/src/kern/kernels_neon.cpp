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

#include <arm_neon.h>

#include <cmath>

#include "beamsnet/kernels.hpp"

namespace bn::kern::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu(const double* x, double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vmaxq_f64(zero, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t mask = vcgtq_f64(vld1q_f64(x + i), zero);
    float64x2_t vdy = vld1q_f64(dy + i);
    vst1q_f64(dx + i,
              vreinterpretq_f64_u64(
                  vandq_u64(mask, vreinterpretq_u64_f64(vdy))));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i0 = 0; i0 < m; i0 += 4) {
    const std::size_t mb = (m - i0) < 4 ? (m - i0) : 4;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      float64x2_t acc[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0),
                            vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
      std::size_t p = 0;
      for (; p + 2 <= k; p += 2) {
        float64x2_t vb = vld1q_f64(brow + p);
        for (std::size_t t = 0; t < mb; ++t)
          acc[t] = vfmaq_f64(acc[t], vld1q_f64(a + (i0 + t) * k + p), vb);
      }
      for (std::size_t t = 0; t < mb; ++t) {
        double s = vaddvq_f64(acc[t]);
        for (std::size_t q = p; q < k; ++q)
          s += a[(i0 + t) * k + q] * brow[q];
        c[(i0 + t) * n + j] += s;
      }
    }
  }
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i0 = 0; i0 < m; i0 += 4) {
    const std::size_t mb = (m - i0) < 4 ? (m - i0) : 4;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      float64x2_t va[4];
      for (std::size_t t = 0; t < mb; ++t)
        va[t] = vdupq_n_f64(a[(i0 + t) * k + p]);
      std::size_t j = 0;
      for (; j + 2 <= n; j += 2) {
        float64x2_t vb = vld1q_f64(brow + j);
        for (std::size_t t = 0; t < mb; ++t) {
          double* crow = c + (i0 + t) * n + j;
          vst1q_f64(crow, vfmaq_f64(vld1q_f64(crow), va[t], vb));
        }
      }
      for (; j < n; ++j)
        for (std::size_t t = 0; t < mb; ++t)
          c[(i0 + t) * n + j] += a[(i0 + t) * k + p] * brow[j];
    }
  }
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p)
      axpy(a[p * m + i], b + p * n, c + i * n, n);
}

void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps) {
  const float64x2_t vrho = vdupq_n_f64(rho);
  const float64x2_t vone_m_rho = vdupq_n_f64(1.0 - rho);
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vg = vld1q_f64(g + i);
    float64x2_t vs = vld1q_f64(s + i);
    vs = vfmaq_f64(vmulq_f64(vrho, vs), vone_m_rho, vmulq_f64(vg, vg));
    vst1q_f64(s + i, vs);
    float64x2_t denom = vaddq_f64(vsqrtq_f64(vs), veps);
    float64x2_t step = vdivq_f64(vmulq_f64(vlr, vg), denom);
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    s[i] = rho * s[i] + (1.0 - rho) * g[i] * g[i];
    p[i] -= lr * g[i] / (std::sqrt(s[i]) + eps);
  }
}

}  // namespace bn::kern::neon
