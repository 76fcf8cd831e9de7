#include "asymdex/rewards.hpp"

#include <algorithm>
#include <cmath>

namespace asymdex::rewards {

using geom::Vec3;
using sim::kDominant;
using sim::kDominantObject;
using sim::kFacilitating;
using sim::kFacilitatingObject;
using sim::TaskId;

double action_penalty(std::span<const double> action) {
  double s = 0.0;
  for (double a : action) s += a * a;
  return -s;
}

double pinch_reward(double d_index, double d_thumb) {
  const double r = 1.0 - (d_index + d_thumb);
  return r * r * r;
}

RewardBreakdown interaction_reward(const sim::TaskSpec& task, const sim::EnvState& s, std::span<const double> action,
                                   const sim::RewardCoeffs& c) {
  const sim::TaskGeometry& g = task.geometry;
  const geom::Pose& of = s.objects[kFacilitatingObject].pose;
  const geom::Pose& od = s.objects[kDominantObject].pose;
  const Vec3 palm = sim::palm_position(s, task, kDominant);
  const Vec3 index = sim::fingertip_position(s, task, kDominant, 0);
  const Vec3 thumb = sim::fingertip_position(s, task, kDominant, 1);

  double hand = 0.0;
  double prog = 0.0;
  std::array<double, 4> extra{};
  bool weighted_by_task = false;

  switch (task.id) {
    case TaskId::BlockInCup:
    case TaskId::RwBlockInCup:
      hand = std::exp(-(palm - of.transform_point(g.cup_mouth)).norm());
      prog = -(of.pos - od.pos).norm();
      break;
    case TaskId::Stack:
      hand = std::exp(-(palm - of.transform_point(g.cup_mouth)).norm());
      prog = -(od.pos - of.pos).norm();
      break;
    case TaskId::BottleCap:
      hand = pinch_reward((index - od.pos).norm(), (thumb - od.pos).norm());
      prog = (od.pos - of.transform_point(g.bottle_top)).norm();
      break;
    case TaskId::Switch:
      hand = pinch_reward((index - od.pos).norm(), (thumb - od.pos).norm());
      prog = 2.0 * s.objects[kDominantObject].articulation.value_or(0.0);
      break;
    case TaskId::RwPour:
      hand = std::exp(-(palm - of.transform_point(g.cup_mouth)).norm());
      prog = -(od.transform_point(g.cup_rim) - of.transform_point(g.cup_rim)).norm();
      extra[0] = geom::z_axis(of.orient).z();
      break;
    case TaskId::RwTwistLid: {
      weighted_by_task = true;
      extra[0] = geom::z_axis(of.orient).z();
      extra[1] = s.objects[kDominantObject].articulation.value_or(0.0) - s.prev_articulation;
      extra[2] = pinch_reward(sim::rim_distance(of.inverse_transform_point(index), g),
                              sim::rim_distance(of.inverse_transform_point(thumb), g));
      const double d = (s.hands[kFacilitating].base.pos - s.hands[kDominant].base.pos).norm();
      extra[3] = -std::min(d - 0.1, 0.0);
      break;
    }
  }

  RewardBreakdown r;
  if (!weighted_by_task) {
    r.hand = c.hand * hand;
    r.progress = c.progress * prog;
  }
  for (int i = 0; i < 4; ++i) r.task_terms[i] = c.task[i] * extra[i];
  r.action = c.action * action_penalty(action);
  r.success = sim::check_success(s, task) ? c.success * c.success_bonus : 0.0;
  r.total = r.hand + r.progress + r.action + r.success;
  for (double t : r.task_terms) r.total += t;
  return r;
}

double grasp_reward(const Vec3& hand_pos, const Vec3& obj_pos, const Vec3& initial_rel_pos, const Vec3& hand_dir,
                    const Vec3& obj_dir, double alpha, double beta) {
  const Vec3 rel = obj_pos - hand_pos;
  return (alpha - (rel - initial_rel_pos).norm()) * beta + obj_dir.dot(hand_dir);
}

}  // namespace asymdex::rewards
