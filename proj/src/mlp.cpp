#include "asymdex/mlp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "asymdex/error.hpp"
#include "asymdex/kernels.hpp"

namespace asymdex::rl {

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ShapeError("mlp needs at least an input and an output size");
  for (int s : sizes_)
    if (s < 1) throw ShapeError("mlp layer sizes must be positive");
  std::size_t at = 0;
  for (int l = 0; l < num_layers(); ++l) {
    offsets_.push_back(at);
    at += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.assign(at, 0.0);
}

std::size_t Mlp::bias_offset(int layer) const {
  return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer];
}

void Mlp::init_orthogonal(std::mt19937_64& rng, double hidden_gain, double head_gain) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int l = 0; l < num_layers(); ++l) {
    const int rows = sizes_[l + 1];
    const int cols = sizes_[l];
    const int big = std::max(rows, cols);
    const int small = std::min(rows, cols);
    Eigen::MatrixXd a(big, small);
    for (int j = 0; j < small; ++j)
      for (int i = 0; i < big; ++i) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    // sign fix makes the distribution uniform over orthogonal matrices
    const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
    for (int j = 0; j < small; ++j)
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    const double gain = l + 1 == num_layers() ? head_gain : hidden_gain;
    double* w = params_.data() + offsets_[l];
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) w[static_cast<std::size_t>(i) * cols + j] = gain * (rows >= cols ? q(i, j) : q(j, i));
    std::fill_n(params_.data() + bias_offset(l), rows, 0.0);
  }
}

std::span<const double> Mlp::forward(std::span<const double> x, int batch, Workspace& ws) const {
  if (batch < 0 || x.size() != static_cast<std::size_t>(batch) * in_dim())
    throw ShapeError("mlp forward: input has " + std::to_string(x.size()) + " entries, expected batch x " +
                     std::to_string(in_dim()));
  const auto& k = kernels::active();
  const int layers = num_layers();
  ws.batch = batch;
  ws.pre.resize(layers);
  ws.post.resize(layers);
  const double* in = x.data();
  for (int l = 0; l < layers; ++l) {
    const std::size_t ni = sizes_[l];
    const std::size_t no = sizes_[l + 1];
    ws.pre[l].resize(batch * no);
    k.gemm_nt(batch, no, ni, in, ni, params_.data() + offsets_[l], ni, params_.data() + bias_offset(l),
              ws.pre[l].data(), no);
    if (l + 1 < layers) {
      ws.post[l].resize(batch * no);
      k.elu_forward(batch * no, ws.pre[l].data(), ws.post[l].data());
      in = ws.post[l].data();
    } else {
      ws.post[l].clear();
    }
  }
  return ws.pre.back();
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Workspace ws;
  const auto y = forward(x, 1, ws);
  return {y.begin(), y.end()};
}

void Mlp::backward(std::span<const double> x, Workspace& ws, std::span<const double> dy, std::span<double> grad,
                   std::span<double> dx) const {
  const auto& k = kernels::active();
  const int layers = num_layers();
  const std::size_t batch = ws.batch;
  if (dy.size() != batch * out_dim()) throw ShapeError("mlp backward: dy has the wrong size");
  if (grad.size() != params_.size()) throw ShapeError("mlp backward: gradient buffer has the wrong size");
  if (!dx.empty() && dx.size() != batch * in_dim()) throw ShapeError("mlp backward: dx has the wrong size");

  ws.dz.assign(dy.begin(), dy.end());
  for (int l = layers - 1; l >= 0; --l) {
    const std::size_t ni = sizes_[l];
    const std::size_t no = sizes_[l + 1];
    const double* in = l == 0 ? x.data() : ws.post[l - 1].data();
    double* gw = grad.data() + offsets_[l];
    double* gb = grad.data() + bias_offset(l);
    // dW += dZ^T X
    k.gemm_acc(no, ni, batch, ws.dz.data(), 1, no, in, ni, gw, ni);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t j = 0; j < no; ++j) gb[j] += ws.dz[r * no + j];
    if (l == 0 && dx.empty()) break;
    // dX = dZ W
    ws.dx.assign(batch * ni, 0.0);
    k.gemm_acc(batch, ni, no, ws.dz.data(), no, 1, params_.data() + offsets_[l], ni, ws.dx.data(), ni);
    if (l == 0) {
      std::copy(ws.dx.begin(), ws.dx.end(), dx.begin());
      break;
    }
    ws.dz.resize(batch * ni);
    k.elu_backward(batch * ni, ws.pre[l - 1].data(), ws.post[l - 1].data(), ws.dx.data(), ws.dz.data());
  }
}

}  // namespace asymdex::rl
