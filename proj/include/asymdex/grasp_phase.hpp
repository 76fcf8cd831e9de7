#pragma once
// Object acquisition: the hand base follows a scripted lift while a grasp
// policy drives only the finger joints. One policy is shared by both hands;
// its observation is expressed in the controlled hand's base frame.

#include <span>
#include <vector>

#include "asymdex/vec_env.hpp"

namespace asymdex::train {

/// Base target of the scripted lift at step t of the grasp horizon: the base
/// holds still for the first quarter, then rises linearly to lift_height.
geom::Pose scripted_lift(const geom::Pose& start, int t, const sim::AcquisitionParams& acq);

/// Hands that must grasp in the acquisition phase of a task.
std::vector<int> grasping_hands(const sim::TaskSpec& task);

/// Grasp observation: joint positions (and velocities when flagged), held or
/// target object pose in the hand frame, lift progress, previous action.
int grasp_obs_dim(const sim::HandModel& hand, spaces::SpaceFlags flags);
std::vector<double> grasp_observation(const sim::EnvState& st, const sim::TaskSpec& task, int hand, int t,
                                      std::span<const double> prev_action, spaces::SpaceFlags flags);

/// Joint targets for `hand`: policy output for the actuated joints.
std::vector<double> grasp_joint_targets(const sim::HandModel& hand, std::span<const double> action);

class GraspEnv final : public BatchEnv {
 public:
  GraspEnv(const sim::TaskSpec& task, int n, std::uint64_t seed, int threads = 1);

  int size() const override { return static_cast<int>(slots_.size()); }
  int obs_dim() const override { return obs_dim_; }
  int act_dim() const override { return act_dim_; }
  std::span<const double> observations() const override { return obs_; }
  void step(std::span<const double> actions, std::span<double> rewards, std::span<double> dones,
            std::vector<EpisodeStats>& finished) override;
  std::mt19937_64& rng(int slot) override { return slots_[slot].rng; }

 private:
  struct Slot {
    sim::EnvState state;
    std::mt19937_64 rng;
    int hand = sim::kFacilitating;
    std::array<geom::Pose, 2> start;
    geom::Vec3 initial_rel = geom::Vec3::Zero();
    int t = 0;
    std::vector<double> prev_action;
    double ret = 0.0;
  };
  void reset_slot(int i);
  void observe_slot(int i);

  sim::TaskSpec task_;
  sim::TaskSpec grasp_task_;  // horizon long enough that the simulator never times out
  spaces::SpaceFlags flags_;
  std::vector<int> hands_;
  int threads_ = 1;
  int obs_dim_ = 0;
  int act_dim_ = 0;
  std::vector<Slot> slots_;
  std::vector<double> obs_;
};

}  // namespace asymdex::train
