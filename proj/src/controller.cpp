#include "asymdex/controller.hpp"

#include <algorithm>
#include <cmath>

#include "asymdex/error.hpp"

namespace asymdex::control {

using geom::Pose;
using geom::Quat;
using geom::Vec3;

void ControllerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("controller alpha must lie in [0, 1]");
}

namespace {

Quat turn(const Vec3& rotvec, const Quat& q) {
  // exp(0) is the identity; skip the product so the input stays bit-identical
  if (rotvec.x() == 0.0 && rotvec.y() == 0.0 && rotvec.z() == 0.0) return q;
  return geom::mul(geom::exp_map(rotvec), q);
}

}  // namespace

BaseTargets split_base_targets(const Pose& target_rel, const Pose& current_rel, const Pose& base_d, const Pose& base_f,
                        const Pose& frame_f, const ControllerConfig& cfg) {
  const double a = cfg.alpha;
  const geom::PoseDelta delta = geom::pose_dist(target_rel, current_rel);
  const Vec3 dpos_w = geom::rotate(frame_f.orient, delta.dpos);
  const Vec3 drot_w = geom::rotate(frame_f.orient, delta.drot);

  const Quat orient_d = turn(a * drot_w, base_d.orient);
  const Quat orient_f = turn((a - 1.0) * drot_w, base_f.orient);

  // P_f rides on the facilitating base with a fixed grasp transform.
  const Pose grasp = geom::relative_pose(frame_f, base_f);
  const Quat frame_orient_new = orient_f == base_f.orient ? frame_f.orient : geom::mul(orient_f, grasp.orient);
  const Vec3 carry = (geom::rotate(frame_orient_new, target_rel.pos) - geom::rotate(frame_f.orient, target_rel.pos)) +
                     (geom::rotate(orient_f, grasp.pos) - geom::rotate(base_f.orient, grasp.pos));
  const Vec3 correction = dpos_w + carry;

  return {Pose{base_d.pos + a * correction, orient_d}, Pose{base_f.pos + (a - 1.0) * correction, orient_f}};
}

std::vector<double> track_joint_targets(std::span<const double> current, std::span<const double> target, double rate,
                                        double dt, std::span<const sim::JointLimit> limits) {
  if (current.size() != target.size()) throw ShapeError("track_joint_targets: current and target lengths differ");
  if (!limits.empty() && limits.size() != current.size())
    throw ShapeError("track_joint_targets: limits length differs from joint count");
  const double keep = std::exp(-rate * dt);
  std::vector<double> out(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    double q = target[i] - keep * (target[i] - current[i]);
    if (!limits.empty()) q = std::clamp(q, limits[i].lo, limits[i].hi);
    out[i] = q;
  }
  return out;
}

}  // namespace asymdex::control
