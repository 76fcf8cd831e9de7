#pragma once
// Relative-pose tracking controller for two hand bases. A commanded correction
// of the dominant base pose, expressed in the facilitating object's frame P_f,
// is split between the hands: the dominant base takes alpha of it and the
// facilitating base takes (alpha - 1) of it.

#include <span>
#include <vector>

#include "asymdex/geom.hpp"
#include "asymdex/hand_model.hpp"

namespace asymdex::control {

struct ControllerConfig {
  double alpha = 0.5;
  void validate() const;
};

struct BaseTargets {
  geom::Pose dominant;
  geom::Pose facilitating;
};

/// Splits pose_dist(target_rel, current_rel), rotated into world coordinates by
/// the orientation of P_f, between the two bases. Rotations are applied by left
/// composition with exp(alpha * drot_w) and exp((alpha - 1) * drot_w). The
/// translation carries an extra term for the rotation of P_f itself, so that
/// perfect tracking of both targets realizes target_rel; it vanishes when the
/// facilitating base does not rotate.
///
/// `frame_f` is P_f in world coordinates (the facilitating hand's held object);
/// `current_rel` is the dominant base expressed in P_f.
BaseTargets split_base_targets(const geom::Pose& target_rel, const geom::Pose& current_rel, const geom::Pose& base_d,
                        const geom::Pose& base_f, const geom::Pose& frame_f, const ControllerConfig& cfg);

/// First-order joint tracking: new = target - e^(-rate dt) (target - current),
/// clamped to `limits` when given. Throws ShapeError on length mismatch.
std::vector<double> track_joint_targets(std::span<const double> current, std::span<const double> target, double rate,
                                        double dt, std::span<const sim::JointLimit> limits = {});

}  // namespace asymdex::control
