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

#include <cstddef>
#include <string_view>

// Arithmetic inner loops of the training engine. Every kernel exists as a
// scalar reference and, where the target supports it, a SIMD variant
// (AVX2 on x86-64, NEON on aarch64). The active backend is selected once
// at startup and can be overridden with set_backend() or the
// BEAMSNET_KERNEL environment variable (values: "scalar", "avx2",
// "neon"). SIMD variants are equivalence-tested against the scalar
// reference in tests/kernels_test.cpp.

namespace bn::kern {

enum class Backend { scalar, avx2, neon };

Backend detect_backend();
Backend active_backend();
void set_backend(Backend b);
std::string_view backend_name(Backend b);

// Dispatched entry points. All matrices are row-major, gemm_* accumulate
// into C (callers zero-fill when overwrite semantics are wanted).

double dot(const double* a, const double* b, std::size_t n);

/// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// y = max(0, x)
void relu(const double* x, double* y, std::size_t n);

/// dx = (x > 0) ? dy : 0
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);

/// y = tanh(x). Kept scalar on every backend: libm bit patterns must not
/// depend on the selected kernel set.
void tanh_forward(const double* x, double* y, std::size_t n);

/// C[M,N] += A[M,K] * B[N,K]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);

/// C[M,N] += A[M,K] * B[K,N]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);

/// C[M,N] += A[K,M]^T * B[K,N]
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);

/// s = rho*s + (1-rho)*g^2 ; p -= lr * g / (sqrt(s) + eps)
void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps);

// Per-backend implementations, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void relu(const double* x, double* y, std::size_t n);
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps);
}  // namespace scalar

#if BN_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void relu(const double* x, double* y, std::size_t n);
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps);
}  // namespace avx2
#endif

#if BN_HAVE_NEON
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void relu(const double* x, double* y, std::size_t n);
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n);
void rmsprop_update(double* p, double* s, const double* g, std::size_t n,
                    double lr, double rho, double eps);
}  // namespace neon
#endif

}  // namespace bn::kern
