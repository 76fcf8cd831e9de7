#pragma once

#include <span>

#include "asymdex/envsim.hpp"

namespace asymdex::rewards {

/// Weighted reward components of one interaction step. `task_terms` holds the
/// unweighted real-world extras: cup orientation (pour) or orientation, twist,
/// finger distance and hand-distance terms (lid).
struct RewardBreakdown {
  double hand = 0.0;
  double progress = 0.0;
  double action = 0.0;
  double success = 0.0;
  std::array<double, 4> task_terms{};
  double total = 0.0;
};

/// -||a||^2
double action_penalty(std::span<const double> action);

/// (1 - (d_index + d_thumb))^3
double pinch_reward(double d_index, double d_thumb);

/// Computes every term from the state after a step. `state.prev_articulation`
/// carries the lid angle of the previous step.
RewardBreakdown interaction_reward(const sim::TaskSpec& task, const sim::EnvState& state,
                                   std::span<const double> action, const sim::RewardCoeffs& coeffs);

/// (alpha - ||rel - initial_rel||) * beta + <obj_dir, hand_dir>, with rel = obj_pos - hand_pos.
double grasp_reward(const geom::Vec3& hand_pos, const geom::Vec3& obj_pos, const geom::Vec3& initial_rel_pos,
                    const geom::Vec3& hand_dir, const geom::Vec3& obj_dir, double alpha, double beta);

}  // namespace asymdex::rewards
