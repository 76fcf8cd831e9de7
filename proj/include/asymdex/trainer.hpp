#pragma once
// Rollout collection and the PPO training loop for interaction, grasp,
// two-phase (grasp then interaction) and monolithic runs.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "asymdex/gaussian_policy.hpp"
#include "asymdex/metrics.hpp"
#include "asymdex/ppo.hpp"
#include "asymdex/rollout_buffer.hpp"
#include "asymdex/vec_env.hpp"

namespace asymdex::train {

enum class PhaseMode { Interaction, Grasp, Combined, Monolithic };

std::string_view to_string(PhaseMode m);
std::optional<PhaseMode> phase_from_string(std::string_view name);

struct TrainRunConfig {
  sim::TaskId task = sim::TaskId::Switch;
  spaces::PolicyVariant variant = spaces::PolicyVariant::AsymDex;
  PhaseMode phase = PhaseMode::Interaction;
  int num_envs = 64;           // N
  int steps_per_rollout = 32;  // M
  long long budget = 2'000'000;
  std::uint64_t seed = 0;
  std::optional<bool> randomize;       // overrides the task default when set
  double grasp_budget_fraction = 0.2;  // share of the budget spent on grasping in combined runs
  int threads = 1;
  int checkpoint_every = 0;  // updates between checkpoints; 0 writes only the final one
  rl::PpoConfig ppo;
  rl::NetworkShape net;

  /// Throws ConfigError when N, M or the budget are inconsistent.
  void validate() const;
};

/// Applies run-level overrides to a task (randomization toggle; monolithic
/// horizon covering acquisition and interaction).
sim::TaskSpec effective_task(const sim::TaskSpec& task, const TrainRunConfig& cfg);

struct RolloutStats {
  std::vector<EpisodeStats> finished;
};

/// Fills `buf` with exactly N x M transitions. The normalizer is updated with
/// each step's raw observations when `update_normalizer` is set.
void collect_rollouts(rl::ActorCritic& ac, BatchEnv& env, rl::RolloutBuffer& buf, bool update_normalizer,
                      RolloutStats& stats);

struct Hooks {
  /// Called after every update; return false to stop training early.
  std::function<bool(const MetricsRow&, const rl::ActorCritic&)> on_update;
  /// Called every `checkpoint_every` updates and after the last one.
  std::function<void(const rl::ActorCritic&, double lr, long long env_steps, int update)> on_checkpoint;
};

struct TrainOutput {
  rl::ActorCritic model;
  std::vector<MetricsRow> rows;
  long long env_steps = 0;
  double lr = 0.0;
  int updates = 0;
};

/// Alternates collect_rollouts and ppo_update until `budget` env steps are
/// spent (floor(budget / (N M)) updates). Throws NumericFault on a faulted
/// update or non-finite metrics, after invoking on_checkpoint with the state
/// before the failure.
TrainOutput train_policy(BatchEnv& env, const TrainRunConfig& cfg, long long budget, int stream, const Hooks& hooks);

TrainOutput train_interaction(const TrainRunConfig& cfg, const sim::TaskSpec& task, long long budget,
                              const Hooks& hooks = {});
TrainOutput train_grasp(const TrainRunConfig& cfg, const sim::TaskSpec& task, long long budget,
                        const Hooks& hooks = {});

/// Budget split of a combined run; the two parts add up to cfg.budget.
std::pair<long long, long long> split_budget(const TrainRunConfig& cfg);

}  // namespace asymdex::train
