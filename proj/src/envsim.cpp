#include "asymdex/envsim.hpp"

#include <algorithm>
#include <cmath>

#include "asymdex/error.hpp"

namespace asymdex::sim {

using geom::Pose;
using geom::Quat;
using geom::Vec3;

namespace {

Pose sample_base(const BaseSampling& s, std::mt19937_64& rng) {
  const double x = s.x.sample(rng);
  const double y = s.y.sample(rng);
  const double z = s.z.sample(rng);
  const double roll = s.roll.sample(rng);
  const Quat orient = roll == 0.0 ? geom::canonical(s.nominal_orient)
                                  : geom::mul(geom::axis_angle(s.roll_axis, roll), s.nominal_orient);
  return Pose::make({x, y, z}, orient);
}

HandState make_hand(const HandModel& model, const Pose& base, double closure) {
  HandState h;
  h.base = base;
  h.joints = model.configuration(closure);
  h.joint_vels.assign(h.joints.size(), 0.0);
  h.joint_targets = h.joints;
  return h;
}

bool finite_pose(const Pose& p) {
  return p.pos.allFinite() && std::isfinite(p.orient.w) && std::isfinite(p.orient.x) && std::isfinite(p.orient.y) &&
         std::isfinite(p.orient.z) && p.orient.norm() > 0.0;
}

bool is_sub_body_task(TaskId id) {
  return id == TaskId::BottleCap || id == TaskId::Switch || id == TaskId::RwTwistLid;
}

void integrate_free(ObjectState& o, const SimParams& sim) {
  o.lin_vel += sim.gravity * sim.dt;
  o.pose.pos += o.lin_vel * sim.dt;
  if (o.ang_vel.squaredNorm() > 0.0) o.pose.orient = geom::mul(geom::exp_map(o.ang_vel * sim.dt), o.pose.orient);
  if (o.support_z && o.pose.pos.z() < *o.support_z) {
    o.pose.pos.z() = *o.support_z;
    o.lin_vel.setZero();
    o.ang_vel.setZero();
  }
}

bool within_grasp(const EnvState& s, const TaskSpec& task, int hand, const Vec3& point) {
  const double r = task.sim.grasp_radius;
  return (fingertip_position(s, task, hand, 0) - point).norm() < r &&
         (fingertip_position(s, task, hand, 1) - point).norm() < r;
}

}  // namespace

const HandModel& hand_model(const TaskSpec& task, int hand) {
  return hand == kFacilitating ? task.facilitating : task.dominant;
}

Vec3 palm_position(const EnvState& state, const TaskSpec& task, int hand) {
  return state.hands[hand].base.transform_point(hand_model(task, hand).palm_offset);
}

Vec3 fingertip_position(const EnvState& state, const TaskSpec& task, int hand, int tip) {
  return state.hands[hand].base.transform_point(hand_model(task, hand).fingertip_offsets.at(tip));
}

double rim_distance(const Vec3& point_in_jar, const TaskGeometry& g) {
  const Vec3 rel = point_in_jar - g.lid_offset;
  const double radial = std::hypot(rel.x(), rel.y());
  return std::hypot(radial - g.lid_radius, rel.z());
}

Pose seated_pose(const ObjectState& child, const Pose& parent, TaskId task) {
  Pose local = child.seat;
  if (child.articulation) {
    const double a = *child.articulation;
    if (task == TaskId::Switch) local.orient = geom::mul(local.orient, geom::axis_angle(Vec3::UnitX(), a));
    if (task == TaskId::RwTwistLid) local.orient = geom::mul(local.orient, geom::axis_angle(Vec3::UnitZ(), a));
  }
  return geom::compose(parent, local);
}

void weld(EnvState& state, int hand, int object) {
  HandState& h = state.hands[hand];
  ObjectState& o = state.objects[object];
  h.held = Attachment{object, geom::relative_pose(o.pose, h.base)};
  o.attached_to = hand;
  o.parent.reset();
  o.lin_vel.setZero();
  o.ang_vel.setZero();
}

void release(EnvState& state, int hand, const Vec3& lin_vel) {
  HandState& h = state.hands[hand];
  if (!h.held) return;
  ObjectState& o = state.objects[h.held->object];
  o.attached_to.reset();
  o.lin_vel = lin_vel;
  o.ang_vel.setZero();
  h.held.reset();
}

EnvState reset_sample(const TaskSpec& task, std::mt19937_64& rng, StartPhase start) {
  task.validate();
  EnvState s;
  const Pose dom_base = sample_base(task.dominant_sampling, rng);
  const Pose fac_base = sample_base(task.facilitating_sampling, rng);
  if (task.randomization.enabled && task.randomization.friction) s.friction = task.randomization.friction->sample(rng);

  const bool dom_holds = task.dominant_holds_object();
  s.objects.resize(2);
  s.phase = start == StartPhase::Interaction ? Phase::Interaction : Phase::Acquisition;

  if (start == StartPhase::Interaction) {
    s.hands[kFacilitating] = make_hand(task.facilitating, fac_base, task.facilitating.grasp_closure);
    s.hands[kDominant] =
        make_hand(task.dominant, dom_base, dom_holds ? task.dominant.grasp_closure : task.dominant.open_closure);
    s.objects[kFacilitatingObject].pose = fac_base;
    weld(s, kFacilitating, kFacilitatingObject);
    if (dom_holds) {
      s.objects[kDominantObject].pose = dom_base;
      weld(s, kDominant, kDominantObject);
    }
  } else {
    const Vec3 lift{0.0, 0.0, task.acquisition.lift_height};
    auto place = [&](int hand, const Pose& carry_pose) {
      ObjectState& o = s.objects[hand];
      o.pose = Pose{carry_pose.pos - lift, carry_pose.orient};
      o.support_z = o.pose.pos.z();
      // offset in the hand frame keeps the fingertips equally close for any base orientation
      const Pose pregrasp{o.pose.transform_point(task.acquisition.pregrasp_offset), carry_pose.orient};
      s.hands[hand] = make_hand(hand_model(task, hand), pregrasp, hand_model(task, hand).open_closure);
    };
    place(kFacilitating, fac_base);
    if (dom_holds) {
      place(kDominant, dom_base);
    } else {
      s.hands[kDominant] = make_hand(task.dominant, dom_base, task.dominant.open_closure);
    }
  }

  if (is_sub_body_task(task.id)) {
    ObjectState& child = s.objects[kDominantObject];
    child.parent = kFacilitatingObject;
    switch (task.id) {
      case TaskId::BottleCap:
        child.seat = Pose{task.geometry.bottle_top, Quat::identity()};
        break;
      case TaskId::Switch:
        child.seat = Pose{task.geometry.button_offset, Quat::identity()};
        child.articulation = 0.0;
        break;
      default:
        child.seat = Pose{task.geometry.lid_offset, Quat::identity()};
        child.articulation = 0.0;
        break;
    }
    child.pose = seated_pose(child, s.objects[kFacilitatingObject].pose, task.id);
  }

  s.rng = rng;
  return s;
}

void update_articulation(EnvState& state, const TaskSpec& task, const Pose& prev_dominant_base,
                         const Pose& prev_parent) {
  ObjectState& child = state.objects[kDominantObject];
  if (!child.parent) return;
  const Pose& parent = state.objects[*child.parent].pose;
  const TaskGeometry& g = task.geometry;
  const HandModel& dom = task.dominant;
  const int n_tips = static_cast<int>(dom.fingertip_offsets.size());

  switch (task.id) {
    case TaskId::Switch: {
      const Pose rest = geom::compose(parent, child.seat);
      double angle = child.articulation.value_or(0.0);
      for (int t = 0; t < n_tips; ++t) {
        const Vec3 rel = rest.inverse_transform_point(fingertip_position(state, task, kDominant, t));
        const double lateral = std::hypot(rel.x(), rel.y());
        const double depth = -rel.z();
        if (lateral < g.button_radius && depth > 0.0 && depth < g.button_travel)
          angle = std::max(angle, std::min(g.button_limit, depth * g.button_limit / g.button_full_depth));
      }
      child.articulation = std::clamp(angle, 0.0, g.button_limit);
      break;
    }
    case TaskId::BottleCap: {
      const Vec3 cap = seated_pose(child, parent, task.id).pos;
      const HandState& h = state.hands[kDominant];
      if (within_grasp(state, task, kDominant, cap) && dom.closure(h.joints) > task.sim.close_threshold) {
        child.pose = seated_pose(child, parent, task.id);
        weld(state, kDominant, kDominantObject);
        return;
      }
      break;
    }
    case TaskId::RwTwistLid: {
      int pinching = 0;
      for (int t = 0; t < n_tips; ++t) {
        const Vec3 in_jar = parent.inverse_transform_point(fingertip_position(state, task, kDominant, t));
        if (rim_distance(in_jar, g) < task.sim.grasp_radius) ++pinching;
      }
      if (pinching >= 2) {
        const Quat rel_old = geom::mul(geom::conjugate(prev_parent.orient), prev_dominant_base.orient);
        const Quat rel_new = geom::mul(geom::conjugate(parent.orient), state.hands[kDominant].base.orient);
        const Vec3 turn = geom::log_map(geom::mul(rel_new, geom::conjugate(rel_old)));
        child.articulation = std::clamp(child.articulation.value_or(0.0) + turn.z(), -g.lid_limit, g.lid_limit);
      }
      break;
    }
    default:
      break;
  }
  child.pose = seated_pose(child, parent, task.id);
}

StepResult step(EnvState& state, const TaskSpec& task, const StepTargets& targets) {
  const double dt = task.sim.dt;
  for (int h = 0; h < 2; ++h) {
    if (static_cast<int>(targets.joints[h].size()) != hand_model(task, h).n_joints_act)
      throw ShapeError("step: joint target vector has the wrong length");
  }

  bool finite = finite_pose(targets.base[0]) && finite_pose(targets.base[1]);
  for (const auto& j : targets.joints)
    for (double v : j) finite = finite && std::isfinite(v);
  if (!finite) {
    ++state.step_count;
    state.fault = state.failed = state.done = true;
    return {true, false, true, true, false};
  }

  const Pose prev_dominant = state.hands[kDominant].base;
  const Pose prev_parent = state.objects[kFacilitatingObject].pose;
  std::array<Vec3, 2> base_vel{Vec3::Zero(), Vec3::Zero()};
  std::array<bool, 2> moved{false, false};
  state.prev_articulation = state.objects[kDominantObject].articulation.value_or(0.0);

  for (int h = 0; h < 2; ++h) {
    const HandModel& model = hand_model(task, h);
    HandState& hs = state.hands[h];
    const double kb = 1.0 - std::exp(-model.base_tracking_rate * dt);
    const geom::PoseDelta d = geom::pose_dist(targets.base[h], hs.base);
    const Vec3 move = kb * d.dpos;
    hs.base.pos += move;
    const Vec3 turn = kb * d.drot;
    if (turn.squaredNorm() > 0.0) hs.base.orient = geom::mul(geom::exp_map(turn), hs.base.orient);
    moved[h] = move.squaredNorm() > 0.0 || turn.squaredNorm() > 0.0;
    base_vel[h] = move / dt;

    const double kj = 1.0 - std::exp(-model.joint_tracking_rate * dt);
    hs.joint_targets = model.expand_targets(targets.joints[h]);
    for (std::size_t i = 0; i < hs.joints.size(); ++i) {
      const JointLimit& lim = model.joint_limits[i];
      const double target = std::clamp(hs.joint_targets[i], lim.lo, lim.hi);
      const double q = std::clamp(hs.joints[i] + kj * (target - hs.joints[i]), lim.lo, lim.hi);
      hs.joint_vels[i] = (q - hs.joints[i]) / dt;
      hs.joints[i] = q;
    }

    if (hs.held && model.closure(hs.joints) < task.sim.release_closure) release(state, h, base_vel[h]);
  }

  // Free objects in a hand's own slot can be (re)grasped.
  for (int h = 0; h < 2; ++h) {
    HandState& hs = state.hands[h];
    if (hs.held || (h == kDominant && !task.dominant_holds_object())) continue;
    ObjectState& o = state.objects[h];
    if (o.attached_to || o.parent) continue;
    if (within_grasp(state, task, h, o.pose.pos) &&
        hand_model(task, h).closure(hs.joints) > task.sim.close_threshold)
      weld(state, h, h);
  }

  for (int h = 0; h < 2; ++h) {
    const HandState& hs = state.hands[h];
    // a still base leaves its object untouched (no re-composition round-off)
    if (!hs.held || !moved[h]) continue;
    ObjectState& o = state.objects[hs.held->object];
    o.pose = geom::compose(hs.base, hs.held->grasp);
  }

  update_articulation(state, task, prev_dominant, prev_parent);

  for (ObjectState& o : state.objects)
    if (!o.attached_to && !o.parent) integrate_free(o, task.sim);

  ++state.step_count;
  StepResult r;
  r.success = check_success(state, task);
  bool dropped = false;
  for (const ObjectState& o : state.objects) dropped = dropped || o.pose.pos.z() < task.sim.floor_z;
  r.timeout = state.step_count >= task.horizon;
  r.failed = !r.success && (dropped || r.timeout);
  r.done = r.success || dropped || r.timeout;
  state.success = r.success;
  state.failed = r.failed;
  state.done = r.done;
  return r;
}

bool check_success(const EnvState& s, const TaskSpec& task) {
  const ObjectState& of = s.objects[kFacilitatingObject];
  const ObjectState& od = s.objects[kDominantObject];
  const SuccessParams& p = task.success;
  switch (task.id) {
    case TaskId::BlockInCup:
    case TaskId::RwBlockInCup:
      return (od.pose.pos - of.pose.pos).norm() < p.block_in_cup;
    case TaskId::Stack:
      return (od.pose.pos - of.pose.pos).norm() < p.stack;
    case TaskId::BottleCap:
      if (od.parent) return false;
      return (od.pose.pos - of.pose.transform_point(task.geometry.bottle_top)).norm() >= p.cap_displacement;
    case TaskId::Switch:
      return od.articulation.value_or(0.0) >= p.switch_angle;
    case TaskId::RwPour: {
      const Vec3 rim_d = od.pose.transform_point(task.geometry.cup_rim);
      const Vec3 rim_f = of.pose.transform_point(task.geometry.cup_rim);
      return (rim_d - rim_f).norm() < p.pour_rim && geom::z_axis(of.pose.orient).z() > p.upright_dot;
    }
    case TaskId::RwTwistLid:
      return od.articulation.value_or(0.0) >= p.twist_angle;
  }
  return false;
}

bool check_reset(const EnvState& s, const TaskSpec& task) {
  for (const ObjectState& o : s.objects)
    if (o.pose.pos.z() < task.sim.floor_z) return true;
  return s.step_count >= task.horizon || check_success(s, task);
}

}  // namespace asymdex::sim
