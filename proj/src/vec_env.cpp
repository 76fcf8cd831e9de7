#include "asymdex/vec_env.hpp"

#include <algorithm>
#include <thread>

#include "asymdex/error.hpp"

namespace asymdex::train {

std::mt19937_64 slot_rng(std::uint64_t seed, int slot, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int t = std::clamp(threads, 1, std::max(n, 1));
  if (t == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += t) fn(i);
    });
  for (auto& th : pool) th.join();
}

InteractionEnv::InteractionEnv(const sim::TaskSpec& task, const InteractionEnvConfig& cfg, int n, std::uint64_t seed)
    : task_(task), cfg_(cfg) {
  if (n < 1) throw ConfigError("number of environments must be >= 1");
  task_.validate();
  cfg_.controller.validate();
  const auto flags = spaces::default_flags(task_.id);
  obs_layout_ = spaces::obs_layout(cfg_.variant, task_.facilitating, task_.dominant, flags);
  act_layout_ = spaces::action_layout(cfg_.variant, task_.facilitating, task_.dominant);
  if (spaces::is_relative(cfg_.variant) && cfg_.start == sim::StartPhase::Acquisition)
    throw ConfigError("relative variants need an interaction start (P_f is undefined before the grasp)");
  slots_.resize(n);
  obs_.assign(static_cast<std::size_t>(n) * obs_layout_.dim, 0.0);
  for (int i = 0; i < n; ++i) {
    slots_[i].rng = slot_rng(seed, i, 0);
    reset_slot(i);
  }
}

void InteractionEnv::reset_slot(int i) {
  Slot& s = slots_[i];
  s.state = sim::reset_sample(task_, s.rng, cfg_.start);
  s.prev_action.assign(act_layout_.dim, 0.0);
  s.ret = 0.0;
  s.length = 0;
  observe_slot(i);
}

void InteractionEnv::observe_slot(int i) {
  Slot& s = slots_[i];
  auto o = spaces::build_observation(obs_layout_, s.state, s.prev_action);
  if (task_.randomization.enabled) spaces::add_observation_noise(o, obs_layout_, s.rng, task_.randomization.noise);
  std::copy(o.begin(), o.end(), obs_.begin() + static_cast<std::ptrdiff_t>(i) * obs_layout_.dim);
}

void InteractionEnv::set_state(int i, const sim::EnvState& st) {
  slots_[i].state = st;
  observe_slot(i);
}

bool InteractionEnv::step_slot(int i, std::span<const double> action, double& reward, EpisodeStats& ep) {
  Slot& s = slots_[i];
  std::vector<double> applied(action.begin(), action.end());
  if (task_.randomization.enabled) spaces::add_action_noise(applied, s.rng, task_.randomization.noise.action);

  sim::StepResult r;
  try {
    const sim::StepTargets t = spaces::decode_action(act_layout_, applied, s.state, task_, cfg_.controller);
    r = sim::step(s.state, task_, t);
  } catch (const NumericFault&) {
    ++s.state.step_count;
    s.state.fault = s.state.failed = s.state.done = true;
    r = {true, false, true, true, false};
  }
  // relative variants lose their frame when the facilitating hand lets go
  if (!r.done && spaces::is_relative(cfg_.variant) && !s.state.hands[sim::kFacilitating].held) {
    r.done = r.failed = true;
    s.state.done = s.state.failed = true;
  }

  s.last = rewards::interaction_reward(task_, s.state, action, task_.rewards);
  reward = s.state.fault ? 0.0 : s.last.total;
  s.ret += reward;
  ++s.length;
  std::copy(action.begin(), action.end(), s.prev_action.begin());
  if (r.done) {
    ep = {s.ret, s.length, r.success};
    reset_slot(i);
    return true;
  }
  observe_slot(i);
  return false;
}

void InteractionEnv::step(std::span<const double> actions, std::span<double> rewards, std::span<double> dones,
                          std::vector<EpisodeStats>& finished) {
  const int n = size();
  const int ad = act_layout_.dim;
  if (actions.size() != static_cast<std::size_t>(n) * ad || rewards.size() != static_cast<std::size_t>(n) ||
      dones.size() != static_cast<std::size_t>(n))
    throw ShapeError("InteractionEnv::step: array sizes disagree with the batch");
  std::vector<EpisodeStats> eps(n);
  std::vector<char> ended(n, 0);
  parallel_for(n, cfg_.threads, [&](int i) {
    ended[i] = step_slot(i, actions.subspan(static_cast<std::size_t>(i) * ad, ad), rewards[i], eps[i]) ? 1 : 0;
  });
  for (int i = 0; i < n; ++i) {
    dones[i] = ended[i] ? 1.0 : 0.0;
    if (ended[i]) finished.push_back(eps[i]);
  }
  env_steps_ += n;
}

}  // namespace asymdex::train
