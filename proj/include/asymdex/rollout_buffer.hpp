#pragma once
// Time-major storage of M steps x N environments. Entry (t, e) lives at row t * N + e.

#include <span>
#include <vector>

namespace asymdex::rl {

struct RolloutBuffer {
  int steps = 0;  // M
  int envs = 0;   // N
  int obs_dim = 0;
  int act_dim = 0;

  std::vector<double> obs;       // M*N x obs_dim (normalized, as seen by the networks)
  std::vector<double> actions;   // M*N x act_dim (pre-squash Gaussian samples)
  std::vector<double> log_probs;  // M*N
  std::vector<double> rewards;   // M*N
  std::vector<double> values;    // (M+1)*N, last row is the bootstrap value
  std::vector<double> dones;     // M*N, 1 when the episode ended at this step
  std::vector<double> advantages;  // M*N
  std::vector<double> returns;     // M*N

  RolloutBuffer() = default;
  RolloutBuffer(int steps, int envs, int obs_dim, int act_dim);
  int size() const { return steps * envs; }
};

/// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t,
/// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}, returns = A + V.
/// Arrays are time-major with `envs` columns; `values` has one extra row.
void gae(std::span<const double> rewards, std::span<const double> values, std::span<const double> dones, int envs,
         double gamma, double lambda, std::span<double> advantages, std::span<double> returns);

void compute_gae(RolloutBuffer& buf, double gamma, double lambda);

/// Shifts and scales to zero mean and unit (population) variance.
void normalize_advantages(std::span<double> adv, double eps = 1e-8);

}  // namespace asymdex::rl
