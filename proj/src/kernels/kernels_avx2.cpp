// AVX2 + FMA kernels. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless avx2_table() returned it.

#include <immintrin.h>

#include <cmath>

#include "asymdex/kernels.hpp"

namespace asymdex::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// R rows of A against C rows of B, k-vectorized dot products.
template <int R, int C>
inline void dot_block(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb,
                      double out[R][C]) {
  __m256d acc[R][C];
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) acc[r][c] = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    __m256d av[R];
    for (int r = 0; r < R; ++r) av[r] = _mm256_loadu_pd(a + r * lda + p);
    for (int c = 0; c < C; ++c) {
      const __m256d bv = _mm256_loadu_pd(b + c * ldb + p);
      for (int r = 0; r < R; ++r) acc[r][c] = _mm256_fmadd_pd(av[r], bv, acc[r][c]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) out[r][c] = hsum(acc[r][c]);
  for (; p < k; ++p)
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < C; ++c) out[r][c] += a[r * lda + p] * b[c * ldb + p];
}

template <int R, int C>
inline void nt_tile(std::size_t i, std::size_t j, std::size_t k, const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, const double* bias, double* c, std::size_t ldc) {
  double out[R][C];
  dot_block<R, C>(k, a + i * lda, lda, b + j * ldb, ldb, out);
  for (int r = 0; r < R; ++r)
    for (int cc = 0; cc < C; ++cc) c[(i + r) * ldc + j + cc] = bias ? out[r][cc] + bias[j + cc] : out[r][cc];
}

template <int R>
inline void nt_row_block(std::size_t i, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                         const double* b, std::size_t ldb, const double* bias, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) nt_tile<R, 4>(i, j, k, a, lda, b, ldb, bias, c, ldc);
  for (; j < n; ++j) nt_tile<R, 1>(i, j, k, a, lda, b, ldb, bias, c, ldc);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, const double* bias, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) nt_row_block<2>(i, n, k, a, lda, b, ldb, bias, c, ldc);
  for (; i < m; ++i) nt_row_block<1>(i, n, k, a, lda, b, ldb, bias, c, ldc);
}

// R rows of C, W-wide column strip (W a multiple of 4), accumulated over k.
template <int R, int W>
inline void acc_strip(std::size_t i, std::size_t j, std::size_t k, const double* a, std::size_t a_rs,
                      std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  constexpr int V = W / 4;
  __m256d acc[R][V];
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) acc[r][v] = _mm256_loadu_pd(c + (i + r) * ldc + j + 4 * v);
  for (std::size_t p = 0; p < k; ++p) {
    __m256d bv[V];
    for (int v = 0; v < V; ++v) bv[v] = _mm256_loadu_pd(b + p * ldb + j + 4 * v);
    for (int r = 0; r < R; ++r) {
      const __m256d s = _mm256_broadcast_sd(a + (i + r) * a_rs + p * a_cs);
      for (int v = 0; v < V; ++v) acc[r][v] = _mm256_fmadd_pd(s, bv[v], acc[r][v]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) _mm256_storeu_pd(c + (i + r) * ldc + j + 4 * v, acc[r][v]);
}

template <int R>
inline void acc_row_block(std::size_t i, std::size_t n, std::size_t k, const double* a, std::size_t a_rs,
                          std::size_t a_cs, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 16 <= n; j += 16) acc_strip<R, 16>(i, j, k, a, a_rs, a_cs, b, ldb, c, ldc);
  for (; j + 4 <= n; j += 4) acc_strip<R, 4>(i, j, k, a, a_rs, a_cs, b, ldb, c, ldc);
  for (; j < n; ++j) {
    for (int r = 0; r < R; ++r) {
      double acc = c[(i + r) * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc += a[(i + r) * a_rs + p * a_cs] * b[p * ldb + j];
      c[(i + r) * ldc + j] = acc;
    }
  }
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) acc_row_block<2>(i, n, k, a, a_rs, a_cs, b, ldb, c, ldc);
  for (; i < m; ++i) acc_row_block<1>(i, n, k, a, a_rs, a_cs, b, ldb, c, ldc);
}

// Cephes-style exp for x in [-700, 0]; relative error ~1e-16.
inline __m256d exp_neg(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  x = _mm256_max_pd(x, _mm256_set1_pd(-700.0));
  const __m256d fx = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(x, log2e), half));
  x = _mm256_sub_pd(x, _mm256_mul_pd(fx, c1));
  x = _mm256_sub_pd(x, _mm256_mul_pd(fx, c2));
  const __m256d xx = _mm256_mul_pd(x, x);

  __m256d px = _mm256_set1_pd(1.26177193074810590878e-4);
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(3.02994407707441961300e-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  px = _mm256_mul_pd(px, x);

  __m256d qx = _mm256_set1_pd(3.00198505138664455042e-6);
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.52448340349684104192e-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009e0));

  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(two, r, one);

  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  return _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
}

void elu_forward(std::size_t n, const double* x, double* y) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d neg = _mm256_sub_pd(exp_neg(_mm256_min_pd(xv, zero)), one);
    const __m256d pos_mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(y + i, _mm256_blendv_pd(neg, xv, pos_mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : std::exp(x[i]) - 1.0;
}

void elu_backward(std::size_t n, const double* x, const double* y, const double* dy, double* dx) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d dyv = _mm256_loadu_pd(dy + i);
    const __m256d neg = _mm256_mul_pd(dyv, _mm256_add_pd(_mm256_loadu_pd(y + i), one));
    const __m256d pos_mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_blendv_pd(neg, dyv, pos_mask));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : dy[i] * (y[i] + 1.0);
}

// Plain mul/add/div/sqrt only: IEEE-exact per lane, so this matches the scalar table bit-for-bit.
void adam(std::size_t n, double* param, const double* grad, double* m, double* v, double lr, double beta1,
          double beta2, double eps, double bias1, double bias2) {
  const double one_m_b1 = 1.0 - beta1;
  const double one_m_b2 = 1.0 - beta2;
  const __m256d b1 = _mm256_set1_pd(beta1), b2 = _mm256_set1_pd(beta2);
  const __m256d c1 = _mm256_set1_pd(one_m_b1), c2 = _mm256_set1_pd(one_m_b2);
  const __m256d lrv = _mm256_set1_pd(lr), epsv = _mm256_set1_pd(eps);
  const __m256d bc1 = _mm256_set1_pd(bias1), bc2 = _mm256_set1_pd(bias2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1, g));
    const __m256d gg = _mm256_mul_pd(g, g);
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)), _mm256_mul_pd(c2, gg));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vi, bc2)), epsv);
    const __m256d step = _mm256_mul_pd(lrv, _mm256_div_pd(mi, bc1));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), _mm256_div_pd(step, denom)));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    const double mi = beta1 * m[i] + one_m_b1 * g;
    const double gg = g * g;
    const double vi = beta2 * v[i] + one_m_b2 * gg;
    m[i] = mi;
    v[i] = vi;
    const double denom = std::sqrt(vi / bias2) + eps;
    const double step = lr * (mi / bias1);
    param[i] = param[i] - step / denom;
  }
}

double sum_squares(std::size_t n, const double* x) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(x + i);
    const __m256d x1 = _mm256_loadu_pd(x + i + 4);
    a0 = _mm256_fmadd_pd(x0, x0, a0);
    a1 = _mm256_fmadd_pd(x1, x1, a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", gemm_nt, gemm_acc, elu_forward, elu_backward, adam, sum_squares};
  return table;
}

}  // namespace asymdex::kernels
