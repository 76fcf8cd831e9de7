#include "asymdex/spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "asymdex/error.hpp"

namespace asymdex::spaces {

using geom::Pose;
using geom::Quat;
using geom::Vec3;
using sim::EnvState;
using sim::HandModel;

namespace {

constexpr int kPose = 7;
constexpr int kBaseDelta = 6;

constexpr std::array<std::pair<PolicyVariant, std::string_view>, 4> kNames{{
    {PolicyVariant::Sym, "Sym"},
    {PolicyVariant::AsymNoRel, "AsymNoRel"},
    {PolicyVariant::RelNoAsym, "RelNoAsym"},
    {PolicyVariant::AsymDex, "AsymDex"},
}};

class Builder {
 public:
  void add(std::string name, int length, SegmentKind kind) {
    layout_.segments.push_back({std::move(name), layout_.dim, length, kind});
    layout_.dim += length;
  }
  Layout take(PolicyVariant v, SpaceFlags f) {
    layout_.variant = v;
    layout_.flags = f;
    return std::move(layout_);
  }

 private:
  Layout layout_;
};

void add_joints(Builder& b, const std::string& hand, const HandModel& m, SpaceFlags f) {
  b.add(hand + "_joint_pos", m.n_joints_obs, SegmentKind::JointPos);
  if (f.include_joint_vels) b.add(hand + "_joint_vel", m.n_joints_obs, SegmentKind::JointVel);
}

void put(std::vector<double>& out, const Segment& s, std::span<const double> values) {
  if (static_cast<int>(values.size()) != s.length) throw ShapeError("segment '" + s.name + "' length mismatch");
  std::copy(values.begin(), values.end(), out.begin() + s.offset);
}

void put_pose(std::vector<double>& out, const Segment& s, const Pose& p) {
  const auto a = geom::to_array(p);
  put(out, s, a);
}

const Pose& facilitating_frame(const EnvState& st) {
  if (!st.hands[sim::kFacilitating].held)
    throw ConfigError("relative observation requires the facilitating hand to hold its object");
  return st.objects[st.hands[sim::kFacilitating].held->object].pose;
}

Vec3 vec_at(std::span<const double> a, int off) { return {a[off], a[off + 1], a[off + 2]}; }

std::vector<double> joint_targets(std::span<const double> unit, const HandModel& m) {
  std::vector<double> q(static_cast<std::size_t>(m.n_joints_act));
  for (int i = 0; i < m.n_joints_act; ++i) q[i] = joint_from_unit(unit[i], m.joint_limits[i]);
  return q;
}

std::vector<double> hold_grasp(const HandModel& m) {
  std::vector<double> g = m.grasp_configuration();
  g.resize(static_cast<std::size_t>(m.n_joints_act));
  return g;
}

Pose world_delta(const Pose& base, std::span<const double> d, const sim::ActionScaling& sc) {
  const Vec3 dpos = sc.translation * Vec3{d[0], d[1], d[2]};
  const Vec3 drot = sc.rotation * Vec3{d[3], d[4], d[5]};
  Pose t{base.pos + dpos, base.orient};
  if (drot.squaredNorm() > 0.0) t.orient = geom::mul(geom::exp_map(drot), base.orient);
  return t;
}

}  // namespace

std::string_view to_string(PolicyVariant v) {
  for (const auto& [k, n] : kNames)
    if (k == v) return n;
  return "unknown";
}

std::optional<PolicyVariant> variant_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  return std::nullopt;
}

bool is_relative(PolicyVariant v) { return v == PolicyVariant::AsymDex || v == PolicyVariant::RelNoAsym; }

void Layout::validate() const {
  int at = 0;
  for (const Segment& s : segments) {
    if (s.offset != at || s.length < 0) throw ShapeError("layout segment '" + s.name + "' is not contiguous");
    at += s.length;
  }
  if (at != dim) throw ShapeError("layout segments do not add up to the vector length");
}

const Segment& Layout::find(std::string_view name) const {
  for (const Segment& s : segments)
    if (s.name == name) return s;
  throw std::out_of_range("no layout segment named '" + std::string(name) + "'");
}

bool Layout::has(std::string_view name) const {
  return std::any_of(segments.begin(), segments.end(), [&](const Segment& s) { return s.name == name; });
}

std::span<const double> Layout::view(std::span<const double> v, std::string_view name) const {
  if (static_cast<int>(v.size()) != dim) throw ShapeError("vector length does not match layout");
  const Segment& s = find(name);
  return v.subspan(static_cast<std::size_t>(s.offset), static_cast<std::size_t>(s.length));
}

std::string Layout::to_json() const {
  static constexpr std::array<std::string_view, 7> kKinds{"joint_pos",  "joint_vel",  "hand_pose",   "object_pose",
                                                          "prev_action", "base_delta", "joint_target"};
  std::ostringstream os;
  os << "{\"variant\": \"" << to_string(variant) << "\", \"dim\": " << dim
     << ", \"include_joint_vels\": " << (flags.include_joint_vels ? "true" : "false")
     << ", \"include_prev_action\": " << (flags.include_prev_action ? "true" : "false") << ", \"segments\": [";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    os << (i ? ", " : "") << "{\"name\": \"" << s.name << "\", \"offset\": " << s.offset
       << ", \"length\": " << s.length << ", \"kind\": \"" << kKinds[static_cast<int>(s.kind)] << "\"}";
  }
  os << "]}";
  return os.str();
}

ActionLayout action_layout(PolicyVariant v, const HandModel& fac, const HandModel& dom) {
  Builder b;
  switch (v) {
    case PolicyVariant::Sym:
      b.add("fac_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      b.add("fac_joints", fac.n_joints_act, SegmentKind::JointTarget);
      b.add("dom_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      b.add("dom_joints", dom.n_joints_act, SegmentKind::JointTarget);
      break;
    case PolicyVariant::AsymNoRel:
      b.add("dom_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      b.add("dom_joints", dom.n_joints_act, SegmentKind::JointTarget);
      b.add("fac_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      break;
    case PolicyVariant::RelNoAsym:
      b.add("rel_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      b.add("dom_joints", dom.n_joints_act, SegmentKind::JointTarget);
      b.add("fac_joints", fac.n_joints_act, SegmentKind::JointTarget);
      break;
    case PolicyVariant::AsymDex:
      b.add("rel_base_delta", kBaseDelta, SegmentKind::BaseDelta);
      b.add("dom_joints", dom.n_joints_act, SegmentKind::JointTarget);
      break;
  }
  return b.take(v, {});
}

ObsLayout obs_layout(PolicyVariant v, const HandModel& fac, const HandModel& dom, SpaceFlags f) {
  Builder b;
  switch (v) {
    case PolicyVariant::Sym:
      add_joints(b, "fac", fac, f);
      add_joints(b, "dom", dom, f);
      b.add("fac_base", kPose, SegmentKind::HandPose);
      b.add("dom_base", kPose, SegmentKind::HandPose);
      b.add("fac_object", kPose, SegmentKind::ObjectPose);
      b.add("dom_object", kPose, SegmentKind::ObjectPose);
      break;
    case PolicyVariant::AsymNoRel:
      add_joints(b, "dom", dom, f);
      b.add("fac_base", kPose, SegmentKind::HandPose);
      b.add("dom_base", kPose, SegmentKind::HandPose);
      b.add("fac_object", kPose, SegmentKind::ObjectPose);
      b.add("dom_object", kPose, SegmentKind::ObjectPose);
      break;
    case PolicyVariant::RelNoAsym:
      add_joints(b, "fac", fac, f);
      add_joints(b, "dom", dom, f);
      b.add("rel_dom_base", kPose, SegmentKind::HandPose);
      b.add("rel_dom_object", kPose, SegmentKind::ObjectPose);
      b.add("fac_object_in_hand", kPose, SegmentKind::ObjectPose);
      break;
    case PolicyVariant::AsymDex:
      add_joints(b, "dom", dom, f);
      b.add("rel_dom_base", kPose, SegmentKind::HandPose);
      b.add("rel_dom_object", kPose, SegmentKind::ObjectPose);
      break;
  }
  if (f.include_prev_action) b.add("prev_action", action_layout(v, fac, dom).dim, SegmentKind::PrevAction);
  return b.take(v, f);
}

Dims space_dims(PolicyVariant v, const HandModel& fac, const HandModel& dom, SpaceFlags f) {
  return {obs_layout(v, fac, dom, f).dim, action_layout(v, fac, dom).dim};
}

SpaceFlags default_flags(sim::TaskId id) {
  const bool sim_task = !sim::is_real_world(id);
  return {sim_task, sim_task};
}

std::vector<double> build_observation(const ObsLayout& layout, const EnvState& st,
                                      std::span<const double> prev_action) {
  std::vector<double> out(static_cast<std::size_t>(layout.dim), 0.0);
  const auto& fac = st.hands[sim::kFacilitating];
  const auto& dom = st.hands[sim::kDominant];
  const Pose& fac_obj = st.objects[sim::kFacilitatingObject].pose;
  const Pose& dom_obj = st.objects[sim::kDominantObject].pose;
  std::optional<Pose> frame;
  if (is_relative(layout.variant)) frame = facilitating_frame(st);

  for (const Segment& s : layout.segments) {
    if (s.name == "fac_joint_pos") put(out, s, fac.joints);
    else if (s.name == "fac_joint_vel") put(out, s, fac.joint_vels);
    else if (s.name == "dom_joint_pos") put(out, s, dom.joints);
    else if (s.name == "dom_joint_vel") put(out, s, dom.joint_vels);
    else if (s.name == "fac_base") put_pose(out, s, fac.base);
    else if (s.name == "dom_base") put_pose(out, s, dom.base);
    else if (s.name == "fac_object") put_pose(out, s, fac_obj);
    else if (s.name == "dom_object") put_pose(out, s, dom_obj);
    else if (s.name == "rel_dom_base") put_pose(out, s, geom::relative_pose(dom.base, *frame));
    else if (s.name == "rel_dom_object") put_pose(out, s, geom::relative_pose(dom_obj, *frame));
    else if (s.name == "fac_object_in_hand") put_pose(out, s, geom::relative_pose(fac_obj, fac.base));
    else if (s.name == "prev_action") put(out, s, prev_action);
    else throw ShapeError("unknown observation segment '" + s.name + "'");
  }
  return out;
}

sim::StepTargets decode_action(const ActionLayout& layout, std::span<const double> action, const EnvState& st,
                               const sim::TaskSpec& task, const control::ControllerConfig& ctrl) {
  if (static_cast<int>(action.size()) != layout.dim)
    throw ShapeError("action has length " + std::to_string(action.size()) + ", expected " +
                     std::to_string(layout.dim));
  std::vector<double> a(action.begin(), action.end());
  for (double& x : a) {
    if (!std::isfinite(x)) throw NumericFault("action contains a non-finite entry");
    x = std::clamp(x, -1.0, 1.0);
  }
  const std::span<const double> av(a);
  const auto& fac = st.hands[sim::kFacilitating];
  const auto& dom = st.hands[sim::kDominant];

  sim::StepTargets t;
  t.base = {fac.base, dom.base};
  t.joints[sim::kFacilitating] = hold_grasp(task.facilitating);
  t.joints[sim::kDominant] = hold_grasp(task.dominant);

  if (layout.has("fac_base_delta"))
    t.base[sim::kFacilitating] = world_delta(fac.base, layout.view(av, "fac_base_delta"), task.action_scaling);
  if (layout.has("dom_base_delta"))
    t.base[sim::kDominant] = world_delta(dom.base, layout.view(av, "dom_base_delta"), task.action_scaling);
  if (layout.has("rel_base_delta")) {
    const auto d = layout.view(av, "rel_base_delta");
    const Pose& frame = facilitating_frame(st);
    const Pose current_rel = geom::relative_pose(dom.base, frame);
    Pose target_rel{current_rel.pos + task.action_scaling.translation * vec_at(d, 0), current_rel.orient};
    const Vec3 drot = task.action_scaling.rotation * vec_at(d, 3);
    if (drot.squaredNorm() > 0.0) target_rel.orient = geom::mul(geom::exp_map(drot), current_rel.orient);
    const control::BaseTargets bt = control::split_base_targets(target_rel, current_rel, dom.base, fac.base, frame, ctrl);
    t.base[sim::kDominant] = bt.dominant;
    t.base[sim::kFacilitating] = bt.facilitating;
  }
  if (layout.has("fac_joints")) t.joints[sim::kFacilitating] = joint_targets(layout.view(av, "fac_joints"), task.facilitating);
  if (layout.has("dom_joints")) t.joints[sim::kDominant] = joint_targets(layout.view(av, "dom_joints"), task.dominant);
  return t;
}

void add_observation_noise(std::span<double> obs, const ObsLayout& layout, std::mt19937_64& rng,
                           const sim::NoiseSpec& noise) {
  if (static_cast<int>(obs.size()) != layout.dim) throw ShapeError("observation length does not match layout");
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto perturb_pose = [&](double* p, double pos_sigma, double rot_sigma) {
    if (pos_sigma > 0.0)
      for (int k = 0; k < 3; ++k) p[k] += pos_sigma * gauss(rng);
    if (rot_sigma > 0.0) {
      const Vec3 n{rot_sigma * gauss(rng), rot_sigma * gauss(rng), rot_sigma * gauss(rng)};
      const Quat q = geom::mul(geom::exp_map(n), geom::canonical({p[3], p[4], p[5], p[6]}));
      p[3] = q.w;
      p[4] = q.x;
      p[5] = q.y;
      p[6] = q.z;
    }
  };
  for (const Segment& s : layout.segments) {
    double* p = obs.data() + s.offset;
    switch (s.kind) {
      case SegmentKind::JointPos:
        if (noise.hand_joint > 0.0)
          for (int i = 0; i < s.length; ++i) p[i] += noise.hand_joint * gauss(rng);
        break;
      case SegmentKind::HandPose:
        perturb_pose(p, noise.hand_pos, noise.hand_orient);
        break;
      case SegmentKind::ObjectPose:
        perturb_pose(p, noise.object_pos, 0.0);
        break;
      default:
        break;
    }
  }
}

void add_action_noise(std::span<double> action, std::mt19937_64& rng, double sigma) {
  if (!(sigma > 0.0)) return;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& a : action) a = std::clamp(a + gauss(rng), -1.0, 1.0);
}

double joint_from_unit(double a, const sim::JointLimit& lim) { return lim.lo + 0.5 * (a + 1.0) * lim.span(); }

double unit_from_joint(double q, const sim::JointLimit& lim) { return 2.0 * (q - lim.lo) / lim.span() - 1.0; }

}  // namespace asymdex::spaces
