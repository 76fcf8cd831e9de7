#pragma once
// Fully connected network with ELU hidden activations and a linear head.
// Parameters live in one flat vector: for each layer, W (out x in, row-major)
// followed by b (out).

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace asymdex::rl {

double elu(double x);

class Mlp {
 public:
  /// Activations of the last forward pass, kept for backward.
  struct Workspace {
    int batch = 0;
    std::vector<std::vector<double>> pre;  // per layer, batch x out
    std::vector<std::vector<double>> post;  // per layer, batch x out (ELU for hidden, copy-free head)
    std::vector<double> dz;
    std::vector<double> dx;
  };

  Mlp() = default;
  /// sizes = {in, hidden..., out}; at least {in, out}.
  explicit Mlp(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  std::size_t num_params() const { return params_.size(); }
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// Orthogonal weights scaled by `hidden_gain` (hidden layers) and `head_gain`
  /// (last layer); zero biases.
  void init_orthogonal(std::mt19937_64& rng, double hidden_gain, double head_gain);

  /// x is batch x in_dim, row-major. Returns a view of the batch x out_dim output.
  std::span<const double> forward(std::span<const double> x, int batch, Workspace& ws) const;
  std::vector<double> forward(std::span<const double> x) const;

  /// Accumulates dL/dparams into `grad` (num_params) for the last forward pass
  /// on `x`. `dy` is batch x out_dim. When `dx` is non-empty it receives dL/dx.
  void backward(std::span<const double> x, Workspace& ws, std::span<const double> dy, std::span<double> grad,
                std::span<double> dx = {}) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace asymdex::rl
