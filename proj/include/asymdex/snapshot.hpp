#pragma once
// Flat numeric record of an EnvState for replay and debugging logs.
//
// Layout (all entries double):
//   version, step_count, phase (0 acquisition / 1 interaction), done, success,
//   failed, fault, prev_articulation, friction,
//   for each of the two hands (facilitating, dominant):
//     base[7], n_joints, joints[n], joint_vels[n], joint_targets[n],
//     held_object (-1 when empty), grasp[7]
//   n_objects, for each object:
//     pose[7], lin_vel[3], ang_vel[3], attached_to (-1), parent (-1), seat[7],
//     articulation (NaN when absent), support_z (NaN when absent)
// Poses use [px, py, pz, qw, qx, qy, qz]. The random engine is not recorded.

#include <span>
#include <vector>

#include "asymdex/envsim.hpp"

namespace asymdex::sim {

inline constexpr double kSnapshotVersion = 1.0;

std::vector<double> snapshot(const EnvState& state);
/// Throws ShapeError on truncated or malformed records.
EnvState restore(std::span<const double> record);

}  // namespace asymdex::sim
