#pragma once
// Batched environments behind one interface so that rollout collection and
// PPO do not care whether they train an interaction or a grasp policy.
// Every slot owns its random engine; stepping slots on several threads gives
// the same results as stepping them in order.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "asymdex/controller.hpp"
#include "asymdex/envsim.hpp"
#include "asymdex/rewards.hpp"
#include "asymdex/spaces.hpp"

namespace asymdex::train {

struct EpisodeStats {
  double ret = 0.0;
  int length = 0;
  bool success = false;
};

class BatchEnv {
 public:
  virtual ~BatchEnv() = default;
  virtual int size() const = 0;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  /// Current raw observations, size() x obs_dim().
  virtual std::span<const double> observations() const = 0;
  /// Applies actions in [-1, 1] (size() x act_dim()), fills per-slot rewards and
  /// done flags, appends finished episodes and resets their slots.
  virtual void step(std::span<const double> actions, std::span<double> rewards, std::span<double> dones,
                    std::vector<EpisodeStats>& finished) = 0;
  virtual std::mt19937_64& rng(int slot) = 0;
  long long env_steps() const { return env_steps_; }

 protected:
  long long env_steps_ = 0;
};

/// Per-slot engine seeded from (seed, slot, stream).
std::mt19937_64 slot_rng(std::uint64_t seed, int slot, int stream);

/// Runs fn(i) for i in [0, n) on up to `threads` threads.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct InteractionEnvConfig {
  spaces::PolicyVariant variant = spaces::PolicyVariant::AsymDex;
  sim::StartPhase start = sim::StartPhase::Interaction;
  control::ControllerConfig controller;
  int threads = 1;
};

/// Interaction-phase task (or a monolithic run from the acquisition start).
class InteractionEnv final : public BatchEnv {
 public:
  InteractionEnv(const sim::TaskSpec& task, const InteractionEnvConfig& cfg, int n, std::uint64_t seed);

  int size() const override { return static_cast<int>(slots_.size()); }
  int obs_dim() const override { return obs_layout_.dim; }
  int act_dim() const override { return act_layout_.dim; }
  std::span<const double> observations() const override { return obs_; }
  void step(std::span<const double> actions, std::span<double> rewards, std::span<double> dones,
            std::vector<EpisodeStats>& finished) override;
  std::mt19937_64& rng(int slot) override { return slots_[slot].rng; }

  const spaces::ObsLayout& obs_layout() const { return obs_layout_; }
  const spaces::ActionLayout& action_layout() const { return act_layout_; }
  const sim::TaskSpec& task() const { return task_; }
  sim::EnvState& state(int slot) { return slots_[slot].state; }
  /// Replaces a slot's state (tests); recomputes its observation.
  void set_state(int slot, const sim::EnvState& s);
  /// Reward breakdown of the last step per slot.
  const rewards::RewardBreakdown& last_reward(int slot) const { return slots_[slot].last; }

 private:
  struct Slot {
    sim::EnvState state;
    std::mt19937_64 rng;
    std::vector<double> prev_action;
    double ret = 0.0;
    int length = 0;
    rewards::RewardBreakdown last;
  };
  void reset_slot(int i);
  void observe_slot(int i);
  bool step_slot(int i, std::span<const double> action, double& reward, EpisodeStats& ep);

  sim::TaskSpec task_;
  InteractionEnvConfig cfg_;
  spaces::ObsLayout obs_layout_;
  spaces::ActionLayout act_layout_;
  std::vector<Slot> slots_;
  std::vector<double> obs_;
};

}  // namespace asymdex::train
