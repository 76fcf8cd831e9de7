#pragma once
// Random controller scenario shared by the unit tests and the acceptance suite.

#include "asymdex/controller.hpp"
#include "oracles.hpp"

namespace oracle {

struct ControllerCase {
  asymdex::geom::Pose base_d, base_f, grasp, frame_f, current_rel, target_rel;
};

/// Relative targets within `max_rot` rad and 5 cm of the current relative pose.
inline ControllerCase random_controller_case(std::mt19937_64& rng, double max_rot) {
  using namespace asymdex::geom;
  std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, max_rot);
  ControllerCase c;
  c.base_d = random_pose(rng, 0.5);
  c.base_f = random_pose(rng, 0.5);
  c.grasp = random_pose(rng, 0.1);
  c.frame_f = compose(c.base_f, c.grasp);
  c.current_rel = relative_pose(c.base_d, c.frame_f);
  Vec3 axis{u(rng), u(rng), u(rng)};
  axis.normalize();
  const Quat turn = exp_map(axis * ang(rng));
  c.target_rel = {c.current_rel.pos + 0.05 * Vec3{u(rng), u(rng), u(rng)}, mul(turn, c.current_rel.orient)};
  return c;
}

/// Relative pose reached when both bases land exactly on their targets and
/// P_f stays welded to the facilitating base.
inline asymdex::geom::Pose realized(const ControllerCase& c, const asymdex::control::BaseTargets& t) {
  using namespace asymdex::geom;
  return relative_pose(t.dominant, compose(t.facilitating, c.grasp));
}

}  // namespace oracle
