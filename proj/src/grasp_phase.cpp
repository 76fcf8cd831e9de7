#include "asymdex/grasp_phase.hpp"

#include <algorithm>

#include "asymdex/error.hpp"

namespace asymdex::train {

using geom::Pose;
using geom::Vec3;

geom::Pose scripted_lift(const Pose& start, int t, const sim::AcquisitionParams& acq) {
  const int hold = acq.grasp_horizon / 4;
  const int rise = acq.grasp_horizon - hold;
  const double frac = rise > 0 ? std::clamp(static_cast<double>(t - hold) / rise, 0.0, 1.0) : 1.0;
  return {start.pos + Vec3{0.0, 0.0, frac * acq.lift_height}, start.orient};
}

std::vector<int> grasping_hands(const sim::TaskSpec& task) {
  if (task.dominant_holds_object()) return {sim::kFacilitating, sim::kDominant};
  return {sim::kFacilitating};
}

int grasp_obs_dim(const sim::HandModel& hand, spaces::SpaceFlags flags) {
  return hand.n_joints_obs * (flags.include_joint_vels ? 2 : 1) + 7 + 1 +
         (flags.include_prev_action ? hand.n_joints_act : 0);
}

std::vector<double> grasp_observation(const sim::EnvState& st, const sim::TaskSpec& task, int hand, int t,
                                      std::span<const double> prev_action, spaces::SpaceFlags flags) {
  const sim::HandModel& m = sim::hand_model(task, hand);
  const sim::HandState& h = st.hands[hand];
  std::vector<double> o;
  o.reserve(static_cast<std::size_t>(grasp_obs_dim(m, flags)));
  o.insert(o.end(), h.joints.begin(), h.joints.end());
  if (flags.include_joint_vels) o.insert(o.end(), h.joint_vels.begin(), h.joint_vels.end());
  const auto rel = geom::to_array(geom::relative_pose(st.objects[hand].pose, h.base));
  o.insert(o.end(), rel.begin(), rel.end());
  o.push_back(static_cast<double>(t) / task.acquisition.grasp_horizon);
  if (flags.include_prev_action) {
    if (static_cast<int>(prev_action.size()) != m.n_joints_act) throw ShapeError("grasp prev_action length");
    o.insert(o.end(), prev_action.begin(), prev_action.end());
  }
  return o;
}

std::vector<double> grasp_joint_targets(const sim::HandModel& hand, std::span<const double> action) {
  if (static_cast<int>(action.size()) != hand.n_joints_act) throw ShapeError("grasp action length");
  std::vector<double> q(action.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = spaces::joint_from_unit(std::clamp(action[i], -1.0, 1.0), hand.joint_limits[i]);
  return q;
}

namespace {

std::vector<double> open_targets(const sim::HandModel& m) {
  auto q = m.configuration(m.open_closure);
  q.resize(static_cast<std::size_t>(m.n_joints_act));
  return q;
}

}  // namespace

GraspEnv::GraspEnv(const sim::TaskSpec& task, int n, std::uint64_t seed, int threads)
    : task_(task), grasp_task_(task), flags_(spaces::default_flags(task.id)), hands_(grasping_hands(task)),
      threads_(threads) {
  if (n < 1) throw ConfigError("number of environments must be >= 1");
  task_.validate();
  if (task_.facilitating.n_joints_act != task_.dominant.n_joints_act ||
      task_.facilitating.n_joints_obs != task_.dominant.n_joints_obs)
    throw ConfigError("the shared grasp policy needs identical hand joint counts");
  grasp_task_.horizon = task_.acquisition.grasp_horizon + 1;
  obs_dim_ = grasp_obs_dim(task_.facilitating, flags_);
  act_dim_ = task_.facilitating.n_joints_act;
  slots_.resize(n);
  obs_.assign(static_cast<std::size_t>(n) * obs_dim_, 0.0);
  for (int i = 0; i < n; ++i) {
    slots_[i].rng = slot_rng(seed, i, 1);
    reset_slot(i);
  }
}

void GraspEnv::reset_slot(int i) {
  Slot& s = slots_[i];
  s.state = sim::reset_sample(task_, s.rng, sim::StartPhase::Acquisition);
  s.hand = hands_.size() == 1 ? hands_[0] : hands_[std::uniform_int_distribution<int>(0, 1)(s.rng)];
  s.start = {s.state.hands[0].base, s.state.hands[1].base};
  s.initial_rel = s.state.objects[s.hand].pose.pos - s.state.hands[s.hand].base.pos;
  s.t = 0;
  s.prev_action.assign(act_dim_, 0.0);
  s.ret = 0.0;
  observe_slot(i);
}

void GraspEnv::observe_slot(int i) {
  const Slot& s = slots_[i];
  const auto o = grasp_observation(s.state, task_, s.hand, s.t, s.prev_action, flags_);
  std::copy(o.begin(), o.end(), obs_.begin() + static_cast<std::ptrdiff_t>(i) * obs_dim_);
}

void GraspEnv::step(std::span<const double> actions, std::span<double> rewards, std::span<double> dones,
                    std::vector<EpisodeStats>& finished) {
  const int n = size();
  if (actions.size() != static_cast<std::size_t>(n) * act_dim_ || rewards.size() != static_cast<std::size_t>(n) ||
      dones.size() != static_cast<std::size_t>(n))
    throw ShapeError("GraspEnv::step: array sizes disagree with the batch");
  std::vector<EpisodeStats> eps(n);
  std::vector<char> ended(n, 0);
  const auto& acq = task_.acquisition;
  parallel_for(n, threads_, [&](int i) {
    Slot& s = slots_[i];
    const auto a = actions.subspan(static_cast<std::size_t>(i) * act_dim_, act_dim_);
    sim::StepTargets tg;
    for (int h = 0; h < 2; ++h) {
      const sim::HandModel& m = sim::hand_model(task_, h);
      tg.base[h] = h == s.hand ? scripted_lift(s.start[h], s.t + 1, acq) : s.start[h];
      tg.joints[h] = h == s.hand ? grasp_joint_targets(m, a) : open_targets(m);
    }
    sim::step(s.state, grasp_task_, tg);
    ++s.t;
    const sim::HandState& hs = s.state.hands[s.hand];
    const geom::Pose& obj = s.state.objects[s.hand].pose;
    rewards[i] = rewards::grasp_reward(hs.base.pos, obj.pos, s.initial_rel, geom::z_axis(hs.base.orient),
                                       geom::z_axis(obj.orient), task_.rewards.grasp_alpha, task_.rewards.grasp_beta);
    s.ret += rewards[i];
    std::copy(a.begin(), a.end(), s.prev_action.begin());
    if (s.t >= acq.grasp_horizon) {
      eps[i] = {s.ret, s.t, hs.held.has_value()};
      ended[i] = 1;
      reset_slot(i);
    } else {
      observe_slot(i);
    }
  });
  for (int i = 0; i < n; ++i) {
    dones[i] = ended[i] ? 1.0 : 0.0;
    if (ended[i]) finished.push_back(eps[i]);
  }
  env_steps_ += n;
}

}  // namespace asymdex::train
