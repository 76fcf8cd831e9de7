#include <cmath>

#include "asymdex/kernels.hpp"

namespace asymdex::kernels {
namespace {

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, const double* bias, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[j * ldb + p];
      c[i * ldc + j] = bias ? acc + bias[j] : acc;
    }
  }
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double s = a[i * a_rs + p * a_cs];
      for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] += s * b[p * ldb + j];
    }
  }
}

void elu_forward(std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : std::exp(x[i]) - 1.0;
}

void elu_backward(std::size_t n, const double* x, const double* y, const double* dy, double* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : dy[i] * (y[i] + 1.0);
}

void adam(std::size_t n, double* param, const double* grad, double* m, double* v, double lr, double beta1,
          double beta2, double eps, double bias1, double bias2) {
  const double one_m_b1 = 1.0 - beta1;
  const double one_m_b2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
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
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", gemm_nt, gemm_acc, elu_forward, elu_backward, adam, sum_squares};
  return table;
}

}  // namespace asymdex::kernels
