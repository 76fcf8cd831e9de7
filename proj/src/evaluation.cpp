#include "asymdex/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "asymdex/error.hpp"
#include "asymdex/grasp_phase.hpp"
#include "asymdex/rewards.hpp"

namespace asymdex::train {

std::vector<double> deterministic_action(const rl::ActorCritic& ac, std::span<const double> raw_obs) {
  std::vector<double> x(raw_obs.begin(), raw_obs.end());
  ac.normalizer.apply(x);
  std::vector<double> a = ac.policy.forward(x);
  for (double& v : a) v = std::tanh(v);
  return a;
}

bool run_episode(const rl::ActorCritic& ac, const sim::TaskSpec& task, spaces::PolicyVariant variant,
                 sim::EnvState state, std::mt19937_64& rng, EvalReport* acc) {
  const auto flags = spaces::default_flags(task.id);
  const auto ol = spaces::obs_layout(variant, task.facilitating, task.dominant, flags);
  const auto al = spaces::action_layout(variant, task.facilitating, task.dominant);
  if (ac.obs_dim() != ol.dim || ac.act_dim() != al.dim)
    throw ShapeError("policy dimensions do not match the " + std::string(spaces::to_string(variant)) + " spaces");
  const control::ControllerConfig ctrl{task.alpha};
  std::vector<double> prev(al.dim, 0.0);
  double ret = 0.0;
  int len = 0;
  bool success = false;
  while (!state.done && len < task.horizon) {
    if (spaces::is_relative(variant) && !state.hands[sim::kFacilitating].held) break;
    auto obs = spaces::build_observation(ol, state, prev);
    if (task.randomization.enabled) spaces::add_observation_noise(obs, ol, rng, task.randomization.noise);
    const auto a = deterministic_action(ac, obs);
    std::vector<double> applied = a;
    if (task.randomization.enabled) spaces::add_action_noise(applied, rng, task.randomization.noise.action);
    const sim::StepResult r = sim::step(state, task, spaces::decode_action(al, applied, state, task, ctrl));
    const rewards::RewardBreakdown rb = rewards::interaction_reward(task, state, a, task.rewards);
    ret += rb.total;
    ++len;
    prev = a;
    if (acc) {
      acc->hand += rb.hand;
      acc->progress += rb.progress;
      acc->action += rb.action;
      acc->success_bonus += rb.success;
      for (int k = 0; k < 4; ++k) acc->task_terms[k] += rb.task_terms[k];
    }
    if (r.done) {
      success = r.success;
      break;
    }
  }
  if (acc) {
    ++acc->episodes;
    acc->successes += success ? 1 : 0;
    acc->mean_length += len;
    acc->mean_return += ret;
  }
  return success;
}

EvalReport evaluate(const rl::ActorCritic& ac, const sim::TaskSpec& task, spaces::PolicyVariant variant, int episodes,
                    std::uint64_t seed, sim::StartPhase start) {
  if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
  EvalReport rep;
  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng = slot_rng(seed, e, 2);
    const sim::EnvState s = sim::reset_sample(task, rng, start);
    run_episode(ac, task, variant, s, rng, &rep);
  }
  const double steps = rep.mean_length;
  if (steps > 0.0) {
    rep.hand /= steps;
    rep.progress /= steps;
    rep.action /= steps;
    rep.success_bonus /= steps;
    for (double& t : rep.task_terms) t /= steps;
  }
  rep.success_rate = static_cast<double>(rep.successes) / rep.episodes;
  rep.mean_length /= rep.episodes;
  rep.mean_return /= rep.episodes;
  return rep;
}

TwoPhaseOutcome two_phase_rollout(const rl::ActorCritic& grasp_policy, const rl::ActorCritic& interaction_policy,
                                  const sim::TaskSpec& task, spaces::PolicyVariant variant, sim::EnvState state,
                                  std::mt19937_64& rng) {
  TwoPhaseOutcome out;
  const std::vector<int> hands = grasping_hands(task);
  auto all_held = [&] {
    for (int h : hands)
      if (!state.hands[h].held || state.hands[h].held->object != h) return false;
    return true;
  };

  if (!all_held()) {
    const auto flags = spaces::default_flags(task.id);
    const auto& acq = task.acquisition;
    sim::TaskSpec grasp_task = task;
    grasp_task.horizon = acq.grasp_horizon + 1;
    const std::array<geom::Pose, 2> start{state.hands[0].base, state.hands[1].base};
    std::array<std::vector<double>, 2> prev{std::vector<double>(task.facilitating.n_joints_act, 0.0),
                                            std::vector<double>(task.dominant.n_joints_act, 0.0)};
    for (int t = 0; t < acq.grasp_horizon; ++t) {
      sim::StepTargets tg;
      for (int h = 0; h < 2; ++h) {
        const sim::HandModel& m = sim::hand_model(task, h);
        const bool grasping = std::find(hands.begin(), hands.end(), h) != hands.end();
        if (grasping) {
          const auto obs = grasp_observation(state, task, h, t, prev[h], flags);
          const auto a = deterministic_action(grasp_policy, obs);
          tg.base[h] = scripted_lift(start[h], t + 1, acq);
          tg.joints[h] = grasp_joint_targets(m, a);
          prev[h] = a;
        } else {
          tg.base[h] = start[h];
          auto q = m.configuration(m.open_closure);
          q.resize(static_cast<std::size_t>(m.n_joints_act));
          tg.joints[h] = q;
        }
      }
      sim::step(state, grasp_task, tg);
      ++out.grasp_steps;
    }
    if (!all_held()) return out;
  }
  out.grasped = true;
  state.step_count = 0;
  state.phase = sim::Phase::Interaction;
  state.done = state.success = state.failed = state.fault = false;
  state.prev_articulation = state.objects[sim::kDominantObject].articulation.value_or(0.0);
  EvalReport rep;
  out.success = run_episode(interaction_policy, task, variant, state, rng, &rep);
  out.interaction_steps = static_cast<int>(rep.mean_length);
  return out;
}

TwoPhaseReport evaluate_two_phase(const rl::ActorCritic& grasp_policy, const rl::ActorCritic& interaction_policy,
                                  const sim::TaskSpec& task, spaces::PolicyVariant variant, int episodes,
                                  std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
  TwoPhaseReport rep;
  rep.episodes = episodes;
  int grasped = 0;
  int success = 0;
  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng = slot_rng(seed, e, 2);
    const sim::EnvState s = sim::reset_sample(task, rng, sim::StartPhase::Acquisition);
    const TwoPhaseOutcome o = two_phase_rollout(grasp_policy, interaction_policy, task, variant, s, rng);
    grasped += o.grasped ? 1 : 0;
    success += o.success ? 1 : 0;
  }
  rep.grasp_rate = static_cast<double>(grasped) / episodes;
  rep.success_rate = static_cast<double>(success) / episodes;
  return rep;
}

}  // namespace asymdex::train
