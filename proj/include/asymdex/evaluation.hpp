#pragma once
// Deterministic evaluation (policy mean, squashed) and the two-phase rollout:
// grasp policy with scripted lift, then the interaction policy.

#include <array>
#include <cstdint>

#include "asymdex/gaussian_policy.hpp"
#include "asymdex/vec_env.hpp"

namespace asymdex::train {

struct EvalReport {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;  // successes / episodes
  double mean_length = 0.0;
  double mean_return = 0.0;
  // per-step means of the weighted reward components
  double hand = 0.0;
  double progress = 0.0;
  double action = 0.0;
  double success_bonus = 0.0;
  std::array<double, 4> task_terms{};
};

/// Tanh of the policy mean for a raw observation (normalized internally).
std::vector<double> deterministic_action(const rl::ActorCritic& ac, std::span<const double> raw_obs);

/// E episodes; episode i starts from the state sampled by slot_rng(seed, i, 2).
/// The model is not modified.
EvalReport evaluate(const rl::ActorCritic& ac, const sim::TaskSpec& task, spaces::PolicyVariant variant, int episodes,
                    std::uint64_t seed, sim::StartPhase start = sim::StartPhase::Interaction);

/// Runs one episode from an explicit initial state.
bool run_episode(const rl::ActorCritic& ac, const sim::TaskSpec& task, spaces::PolicyVariant variant,
                 sim::EnvState state, std::mt19937_64& rng, EvalReport* accumulate = nullptr);

struct TwoPhaseOutcome {
  bool grasped = false;
  bool success = false;
  int grasp_steps = 0;
  int interaction_steps = 0;
};

/// Acquisition with the grasp policy (every hand that must grasp), then, when
/// all required objects are held at the end of the lift, the interaction
/// policy from the lifted state.
TwoPhaseOutcome two_phase_rollout(const rl::ActorCritic& grasp_policy, const rl::ActorCritic& interaction_policy,
                                  const sim::TaskSpec& task, spaces::PolicyVariant variant, sim::EnvState state,
                                  std::mt19937_64& rng);

struct TwoPhaseReport {
  int episodes = 0;
  double grasp_rate = 0.0;
  double success_rate = 0.0;
};

TwoPhaseReport evaluate_two_phase(const rl::ActorCritic& grasp_policy, const rl::ActorCritic& interaction_policy,
                                  const sim::TaskSpec& task, spaces::PolicyVariant variant, int episodes,
                                  std::uint64_t seed);

}  // namespace asymdex::train
