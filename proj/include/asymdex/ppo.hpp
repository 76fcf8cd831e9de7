#pragma once

#include <random>
#include <span>
#include <vector>

#include "asymdex/gaussian_policy.hpp"
#include "asymdex/rollout_buffer.hpp"

namespace asymdex::rl {

struct PpoConfig {
  double gamma = 0.98;
  double lambda = 0.95;
  double clip = 0.2;
  int minibatch = 512;
  double kl_threshold = 0.016;
  int epochs = 5;
  double entropy_coef = 0.0;
  double value_coef = 2.0;
  double learning_rate = 3e-4;
  bool adaptive_lr = true;
  double max_grad_norm = 1.0;  // per network; <= 0 disables clipping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Full-scale settings: minibatch 8092.
PpoConfig full_scale_ppo_config();

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
  void step(std::span<double> params, std::span<const double> grad, double lr, const PpoConfig& cfg);
};

struct Optimizer {
  AdamState policy;
  AdamState value;
  AdamState log_std;

  Optimizer() = default;
  explicit Optimizer(const ActorCritic& ac)
      : policy(ac.policy.num_params()), value(ac.value.num_params()), log_std(ac.log_std.size()) {}
};

struct Minibatch {
  std::span<const double> obs;
  std::span<const double> actions;
  std::span<const double> old_log_probs;
  std::span<const double> advantages;
  std::span<const double> returns;
  int rows = 0;
};

/// Selects loss terms for evaluation and differentiation.
enum LossTerm : unsigned { kSurrogate = 1u, kValue = 2u, kEntropy = 4u, kAllTerms = 7u };

struct LossValues {
  double surrogate = 0.0;  // -E[min(rho A, clip(rho) A)]
  double value = 0.0;      // E[(V - R)^2]
  double entropy = 0.0;
  double total = 0.0;      // selected: surrogate + c_v value - c_e entropy
  double approx_kl = 0.0;  // E[(rho - 1) - log rho]
  double clip_fraction = 0.0;
};

struct Gradients {
  std::vector<double> policy;
  std::vector<double> value;
  std::vector<double> log_std;

  explicit Gradients(const ActorCritic& ac)
      : policy(ac.policy.num_params(), 0.0), value(ac.value.num_params(), 0.0), log_std(ac.log_std.size(), 0.0) {}
  void zero();
};

/// Evaluates the selected loss terms on a minibatch; when `grads` is given it
/// receives their exact gradient (overwritten).
LossValues ppo_loss(const ActorCritic& ac, const Minibatch& mb, const PpoConfig& cfg, Gradients* grads,
                    unsigned terms = kAllTerms);

struct UpdateStats {
  double approx_kl = 0.0;
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double lr = 0.0;  // learning rate after adaptation
  int minibatches = 0;
  bool fault = false;
};

/// Normalizes the buffer's advantages, then runs `epochs` passes of shuffled
/// minibatch Adam steps. On a non-finite loss the parameters are restored and
/// `fault` is set. Adapts `lr` once per update when enabled.
UpdateStats ppo_update(ActorCritic& ac, Optimizer& opt, RolloutBuffer& buf, const PpoConfig& cfg, double& lr,
                       std::mt19937_64& rng);

/// KL above 2 threshold divides lr by 1.5, KL below threshold / 2 multiplies it
/// by 1.5; the result is clamped to [1e-6, 1e-2].
double adaptive_lr(double lr, double approx_kl, double threshold);

}  // namespace asymdex::rl
