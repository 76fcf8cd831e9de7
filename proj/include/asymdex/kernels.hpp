#pragma once
// Dense arithmetic kernels used by the MLP forward/backward passes and the
// optimizer. Every kernel has a portable scalar reference implementation and
// an AVX2+FMA implementation; the active table is selected once at runtime.

#include <cstddef>
#include <string_view>

namespace asymdex::kernels {

/// C[i][j] = sum_p A[i][p] * B[j][p] (+ bias[j] when bias != nullptr).
/// A is m x k (row stride lda), B is n x k (row stride ldb), C is m x n.
using GemmNtFn = void (*)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                          const double* b, std::size_t ldb, const double* bias, double* c, std::size_t ldc);

/// C[i][j] += sum_p a(i, p) * B[p][j] with a(i, p) = a[i * a_rs + p * a_cs].
/// Covers both C += A B (a_rs = lda, a_cs = 1) and C += A^T B (a_rs = 1, a_cs = lda).
using GemmAccFn = void (*)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
                           std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc);

/// y = ELU(x) = x for x > 0, e^x - 1 otherwise.
using EluForwardFn = void (*)(std::size_t n, const double* x, double* y);

/// dx = dy * ELU'(x), using the forward output y: ELU'(x) = 1 for x > 0, y + 1 otherwise.
using EluBackwardFn = void (*)(std::size_t n, const double* x, const double* y, const double* dy, double* dx);

/// Bias-corrected Adam step. Implementations must agree bit-for-bit (no fused ops).
using AdamFn = void (*)(std::size_t n, double* param, const double* grad, double* m, double* v, double lr,
                        double beta1, double beta2, double eps, double bias1, double bias2);

/// sum_i x[i] * x[i]
using SumSquaresFn = double (*)(std::size_t n, const double* x);

struct KernelTable {
  std::string_view name;
  GemmNtFn gemm_nt;
  GemmAccFn gemm_acc;
  EluForwardFn elu_forward;
  EluBackwardFn elu_backward;
  AdamFn adam;
  SumSquaresFn sum_squares;
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the binary was built without it or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table chosen at first use: AVX2 when available, unless ASYMDEX_KERNELS=scalar.
const KernelTable& active();

/// Overrides the active table (tests and benchmarks).
void set_active(const KernelTable& table);

}  // namespace asymdex::kernels
