#pragma once
// Diagonal Gaussian policy with a state-independent log standard deviation,
// an MLP value function and a running observation normalizer.

#include <random>
#include <span>
#include <vector>

#include "asymdex/mlp.hpp"

namespace asymdex::rl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Running mean and variance over observation batches; normalized values are clipped.
struct ObsNormalizer {
  std::vector<double> mean;
  std::vector<double> var;
  double count = 0.0;
  double clip = 5.0;
  double eps = 1e-8;

  ObsNormalizer() = default;
  explicit ObsNormalizer(int dim) : mean(dim, 0.0), var(dim, 1.0) {}
  int dim() const { return static_cast<int>(mean.size()); }
  void update(std::span<const double> batch, int rows);
  void apply(std::span<double> batch) const;
};

struct NetworkShape {
  std::vector<int> policy_hidden{256, 256, 128};
  std::vector<int> value_hidden{512, 512, 512};
  double init_log_std = -0.5;
};

struct ActorCritic {
  Mlp policy;
  Mlp value;
  std::vector<double> log_std;
  ObsNormalizer normalizer;

  ActorCritic() = default;
  ActorCritic(int obs_dim, int act_dim, const NetworkShape& shape);
  int obs_dim() const { return policy.in_dim(); }
  int act_dim() const { return policy.out_dim(); }
  /// Orthogonal init (gains sqrt(2) hidden, 0.01 policy head, 1 value head), every log_std set to `init_log_std`.
  void init(std::mt19937_64& rng, double init_log_std = 0.0);
  void clamp_log_std();
};

/// Exact log density of `action` under N(mean, diag(exp(log_std))^2).
double log_prob(std::span<const double> mean, std::span<const double> log_std, std::span<const double> action);

/// action = mean + exp(log_std) * eps with eps ~ N(0, I); returns the log density.
double sample_action(std::span<const double> mean, std::span<const double> log_std, std::mt19937_64& rng,
                     std::span<double> action);

/// Differential entropy of the diagonal Gaussian.
double entropy(std::span<const double> log_std);

}  // namespace asymdex::rl
