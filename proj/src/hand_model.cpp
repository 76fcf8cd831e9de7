#include "asymdex/hand_model.hpp"

#include <algorithm>
#include <cmath>

#include "asymdex/error.hpp"

namespace asymdex::sim {

void HandModel::validate() const {
  if (n_joints_obs < 0 || n_joints_act < 0) throw ConfigError("hand '" + name + "': negative joint count");
  if (n_joints_act > n_joints_obs)
    throw ConfigError("hand '" + name + "': n_joints_act exceeds n_joints_obs");
  if (static_cast<int>(joint_limits.size()) != n_joints_obs)
    throw ConfigError("hand '" + name + "': joint_limits size differs from n_joints_obs");
  for (const auto& l : joint_limits)
    if (!(l.lo < l.hi)) throw ConfigError("hand '" + name + "': joint limit lo must be below hi");
  if (fingertip_offsets.size() < 2) throw ConfigError("hand '" + name + "': needs index and thumb tips");
  if (!(base_tracking_rate > 0.0) || !(joint_tracking_rate > 0.0))
    throw ConfigError("hand '" + name + "': tracking rates must be positive");
}

std::vector<double> HandModel::configuration(double c) const {
  std::vector<double> q(static_cast<std::size_t>(n_joints_obs));
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = joint_limits[i].lo + c * joint_limits[i].span();
  return q;
}

std::vector<double> HandModel::expand_targets(std::span<const double> actuated) const {
  if (static_cast<int>(actuated.size()) != n_joints_act)
    throw ShapeError("hand '" + name + "': expected " + std::to_string(n_joints_act) + " joint targets");
  std::vector<double> full(static_cast<std::size_t>(n_joints_obs));
  for (int i = 0; i < n_joints_act; ++i) full[i] = actuated[i];
  for (int k = n_joints_act; k < n_joints_obs; ++k) {
    if (n_joints_act == 0) {
      full[k] = joint_limits[k].lo;
      continue;
    }
    const int src = (k - n_joints_act) % n_joints_act;
    const double t = (actuated[src] - joint_limits[src].lo) / joint_limits[src].span();
    full[k] = joint_limits[k].lo + t * joint_limits[k].span();
  }
  return full;
}

double HandModel::closure(std::span<const double> joints) const {
  if (n_joints_act == 0) return grasp_closure;
  double acc = 0.0;
  for (int i = 0; i < n_joints_act; ++i) acc += (joints[i] - joint_limits[i].lo) / joint_limits[i].span();
  return acc / n_joints_act;
}

namespace {

void default_geometry(HandModel& h) {
  h.palm_offset = {0.0, 0.0, 0.0};
  h.fingertip_offsets = {{0.015, 0.0, -0.02}, {-0.015, 0.0, -0.02}};
}

}  // namespace

HandModel shadow_hand() {
  HandModel h;
  h.name = "shadow";
  h.n_joints_obs = 24;
  h.n_joints_act = 20;
  h.joint_limits.assign(24, {-0.26, 1.57});
  // wrist and thumb base joints have narrower ranges
  h.joint_limits[0] = {-0.52, 0.17};
  h.joint_limits[1] = {-0.70, 0.49};
  h.joint_limits[15] = {-1.05, 1.05};
  default_geometry(h);
  return h;
}

HandModel allegro_hand() {
  HandModel h;
  h.name = "allegro";
  h.n_joints_obs = 16;
  h.n_joints_act = 16;
  h.joint_limits.assign(16, {-0.19, 1.61});
  h.joint_limits[0] = {-0.47, 0.47};
  h.joint_limits[4] = {-0.47, 0.47};
  h.joint_limits[8] = {-0.47, 0.47};
  h.joint_limits[12] = {0.26, 1.40};
  default_geometry(h);
  return h;
}

HandModel abstract_hand(int n_joints_obs, int n_joints_act) {
  HandModel h;
  h.name = "abstract";
  h.n_joints_obs = n_joints_obs;
  h.n_joints_act = n_joints_act;
  h.joint_limits.assign(static_cast<std::size_t>(std::max(n_joints_obs, 0)), {0.0, 1.0});
  default_geometry(h);
  return h;
}

}  // namespace asymdex::sim
