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

#include <immintrin.h>

#include <cmath>

#include "beamsnet/kernels.hpp"

namespace bn::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu(const double* x, double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(dy + i)));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  // Row blocks of 4 so each B row is streamed once per block, not per row.
  for (std::size_t i0 = 0; i0 < m; i0 += 4) {
    const std::size_t mb = (m - i0) < 4 ? (m - i0) : 4;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      __m256d acc[4] = {_mm256_setzero_pd(), _mm256_setzero_pd(),
                        _mm256_setzero_pd(), _mm256_setzero_pd()};
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        __m256d vb = _mm256_loadu_pd(brow + p);
        for (std::size_t t = 0; t < mb; ++t)
          acc[t] = _mm256_fmadd_pd(_mm256_loadu_pd(a + (i0 + t) * k + p), vb,
                                   acc[t]);
      }
      for (std::size_t t = 0; t < mb; ++t) {
        double s = hsum(acc[t]);
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
      __m256d va[4];
      for (std::size_t t = 0; t < mb; ++t)
        va[t] = _mm256_set1_pd(a[(i0 + t) * k + p]);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        for (std::size_t t = 0; t < mb; ++t) {
          double* crow = c + (i0 + t) * n + j;
          _mm256_storeu_pd(crow,
                           _mm256_fmadd_pd(va[t], vb, _mm256_loadu_pd(crow)));
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
  const __m256d vrho = _mm256_set1_pd(rho);
  const __m256d vone_m_rho = _mm256_set1_pd(1.0 - rho);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vs = _mm256_loadu_pd(s + i);
    vs = _mm256_fmadd_pd(vone_m_rho, _mm256_mul_pd(vg, vg),
                         _mm256_mul_pd(vrho, vs));
    _mm256_storeu_pd(s + i, vs);
    __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vs), veps);
    __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, vg), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    s[i] = rho * s[i] + (1.0 - rho) * g[i] * g[i];
    p[i] -= lr * g[i] / (std::sqrt(s[i]) + eps);
  }
}

}  // namespace bn::kern::avx2
