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

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "beamsnet/kernels.hpp"

namespace bn::kern {

namespace {

Backend parse_override(const char* v) {
  if (std::strcmp(v, "scalar") == 0) return Backend::scalar;
#if BN_HAVE_AVX2
  if (std::strcmp(v, "avx2") == 0) return Backend::avx2;
#endif
#if BN_HAVE_NEON
  if (std::strcmp(v, "neon") == 0) return Backend::neon;
#endif
  throw std::runtime_error(std::string("BEAMSNET_KERNEL: unsupported "
                                       "backend \"") + v + "\"");
}

Backend initial_backend() {
  if (const char* env = std::getenv("BEAMSNET_KERNEL")) return parse_override(env);
  return detect_backend();
}

Backend g_backend = initial_backend();

}  // namespace

Backend detect_backend() {
#if BN_HAVE_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::avx2;
#endif
#if BN_HAVE_NEON
  return Backend::neon;
#endif
  return Backend::scalar;
}

Backend active_backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

#if BN_HAVE_AVX2
#define BN_DISPATCH(fn, ...)                              \
  do {                                                    \
    if (g_backend == Backend::avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                       \
  } while (0)
#elif BN_HAVE_NEON
#define BN_DISPATCH(fn, ...)                              \
  do {                                                    \
    if (g_backend == Backend::neon) return neon::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                       \
  } while (0)
#else
#define BN_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
  BN_DISPATCH(dot, a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  BN_DISPATCH(axpy, alpha, x, y, n);
}
void relu(const double* x, double* y, std::size_t n) {
  BN_DISPATCH(relu, x, y, n);
}
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  BN_DISPATCH(relu_backward, x, dy, dx, n);
}
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  BN_DISPATCH(gemm_nt, a, b, c, m, k, n);
}
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  BN_DISPATCH(gemm_nn, a, b, c, m, k, n);
}
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  BN_DISPATCH(gemm_tn, a, b, c, m, k, n);
}
void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps) {
  BN_DISPATCH(rmsprop_update, p, s, g, n, lr, rho, eps);
}

}  // namespace bn::kern
