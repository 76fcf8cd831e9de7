#pragma once

#include <span>
#include <string>
#include <vector>

#include "asymdex/geom.hpp"

namespace asymdex::sim {

struct JointLimit {
  double lo = 0.0;
  double hi = 1.0;
  double span() const { return hi - lo; }
};

/// Joint-count abstraction of a multi-fingered hand on a floating 6-DoF base.
/// Joints [0, n_joints_act) are actuated; the remaining observed joints are
/// coupled and mirror actuated joint (k - n_joints_act) in normalized units.
struct HandModel {
  std::string name = "abstract";
  int n_joints_obs = 0;
  int n_joints_act = 0;
  std::vector<JointLimit> joint_limits;  // n_joints_obs entries
  geom::Vec3 palm_offset = geom::Vec3::Zero();
  std::vector<geom::Vec3> fingertip_offsets;  // index tip first, thumb tip second
  double base_tracking_rate = 20.0;           // 1/s
  double joint_tracking_rate = 30.0;          // 1/s
  double grasp_closure = 0.8;                 // normalized closure of the grasp configuration
  double open_closure = 0.2;                  // normalized closure of the pre-grasp configuration

  /// Throws ConfigError when the model is inconsistent.
  void validate() const;

  /// Joint vector (n_joints_obs) at the given normalized closure.
  std::vector<double> configuration(double closure) const;
  std::vector<double> grasp_configuration() const { return configuration(grasp_closure); }

  /// Maps actuated targets (n_joints_act) to a full target vector (n_joints_obs).
  std::vector<double> expand_targets(std::span<const double> actuated) const;

  /// Mean normalized position of the actuated joints, in [0, 1].
  double closure(std::span<const double> joints) const;

  geom::Vec3 index_tip() const { return fingertip_offsets.at(0); }
  geom::Vec3 thumb_tip() const { return fingertip_offsets.at(1); }
};

/// 24 observed joints, 20 actuated (four coupled distal joints).
HandModel shadow_hand();
/// 16 observed and actuated joints.
HandModel allegro_hand();
/// Uniform limits, default fingertip geometry; used by tests and dimension tables.
HandModel abstract_hand(int n_joints_obs, int n_joints_act);

}  // namespace asymdex::sim
