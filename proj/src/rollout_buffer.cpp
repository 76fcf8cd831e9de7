#include "asymdex/rollout_buffer.hpp"

#include <cmath>

#include "asymdex/error.hpp"

namespace asymdex::rl {

RolloutBuffer::RolloutBuffer(int m, int n, int od, int ad) : steps(m), envs(n), obs_dim(od), act_dim(ad) {
  if (m < 1 || n < 1) throw ShapeError("rollout buffer needs at least one step and one env");
  const std::size_t rows = static_cast<std::size_t>(m) * n;
  obs.assign(rows * od, 0.0);
  actions.assign(rows * ad, 0.0);
  log_probs.assign(rows, 0.0);
  rewards.assign(rows, 0.0);
  values.assign(rows + n, 0.0);
  dones.assign(rows, 0.0);
  advantages.assign(rows, 0.0);
  returns.assign(rows, 0.0);
}

void gae(std::span<const double> rewards, std::span<const double> values, std::span<const double> dones, int envs,
         double gamma, double lambda, std::span<double> advantages, std::span<double> returns) {
  const std::size_t n = envs;
  if (n == 0 || rewards.size() % n != 0) throw ShapeError("gae: rewards are not a whole number of rows");
  const std::size_t m = rewards.size() / n;
  if (values.size() != (m + 1) * n || dones.size() != m * n || advantages.size() != m * n ||
      returns.size() != m * n)
    throw ShapeError("gae: array sizes disagree");
  for (std::size_t e = 0; e < n; ++e) {
    double next_adv = 0.0;
    for (std::size_t t = m; t-- > 0;) {
      const std::size_t i = t * n + e;
      const double live = 1.0 - dones[i];
      const double delta = rewards[i] + gamma * values[i + n] * live - values[i];
      next_adv = delta + gamma * lambda * live * next_adv;
      advantages[i] = next_adv;
      returns[i] = next_adv + values[i];
    }
  }
}

void compute_gae(RolloutBuffer& b, double gamma, double lambda) {
  gae(b.rewards, b.values, b.dones, b.envs, gamma, lambda, b.advantages, b.returns);
}

void normalize_advantages(std::span<double> adv, double eps) {
  if (adv.empty()) return;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double inv = 1.0 / (std::sqrt(var) + eps);
  for (double& a : adv) a = (a - mean) * inv;
}

}  // namespace asymdex::rl
