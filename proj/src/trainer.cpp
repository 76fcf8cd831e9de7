#include "asymdex/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "asymdex/error.hpp"
#include "asymdex/grasp_phase.hpp"

namespace asymdex::train {

namespace {
constexpr std::array<std::pair<PhaseMode, std::string_view>, 4> kPhaseNames{{
    {PhaseMode::Interaction, "interaction"},
    {PhaseMode::Grasp, "grasp"},
    {PhaseMode::Combined, "combined"},
    {PhaseMode::Monolithic, "monolithic"},
}};
}  // namespace

std::string_view to_string(PhaseMode m) {
  for (const auto& [k, n] : kPhaseNames)
    if (k == m) return n;
  return "unknown";
}

std::optional<PhaseMode> phase_from_string(std::string_view name) {
  for (const auto& [k, n] : kPhaseNames)
    if (n == name) return k;
  return std::nullopt;
}

void TrainRunConfig::validate() const {
  if (num_envs < 1) throw ConfigError("num_envs must be >= 1");
  if (steps_per_rollout < 1) throw ConfigError("steps_per_rollout must be >= 1");
  if (budget < static_cast<long long>(num_envs) * steps_per_rollout)
    throw ConfigError("budget must cover at least one rollout (num_envs x steps_per_rollout)");
  if (!(grasp_budget_fraction > 0.0 && grasp_budget_fraction < 1.0))
    throw ConfigError("grasp_budget_fraction must lie in (0, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (phase == PhaseMode::Monolithic && spaces::is_relative(variant))
    throw ConfigError("monolithic runs need an absolute variant (Sym or AsymNoRel)");
  ppo.validate();
}

sim::TaskSpec effective_task(const sim::TaskSpec& task, const TrainRunConfig& cfg) {
  sim::TaskSpec t = task;
  if (cfg.randomize) t.randomization.enabled = *cfg.randomize;
  if (cfg.phase == PhaseMode::Monolithic) t.horizon = task.horizon + task.acquisition.grasp_horizon;
  return t;
}

void collect_rollouts(rl::ActorCritic& ac, BatchEnv& env, rl::RolloutBuffer& buf, bool update_normalizer,
                      RolloutStats& stats) {
  const int n = env.size();
  const int od = env.obs_dim();
  const int ad = env.act_dim();
  if (buf.envs != n || buf.obs_dim != od || buf.act_dim != ad || ac.obs_dim() != od || ac.act_dim() != ad)
    throw ShapeError("collect_rollouts: buffer, policy and environment shapes disagree");

  rl::Mlp::Workspace pws;
  rl::Mlp::Workspace vws;
  std::vector<double> obs(static_cast<std::size_t>(n) * od);
  std::vector<double> squashed(static_cast<std::size_t>(n) * ad);
  std::vector<double> rewards(n);
  std::vector<double> dones(n);

  auto normalized_obs = [&](bool update) {
    const auto raw = env.observations();
    if (update) ac.normalizer.update(raw, n);
    std::copy(raw.begin(), raw.end(), obs.begin());
    ac.normalizer.apply(obs);
  };

  for (int t = 0; t < buf.steps; ++t) {
    normalized_obs(update_normalizer);
    const std::size_t row = static_cast<std::size_t>(t) * n;
    std::copy(obs.begin(), obs.end(), buf.obs.begin() + static_cast<std::ptrdiff_t>(row * od));
    const auto mean = ac.policy.forward(obs, n, pws);
    const auto value = ac.value.forward(obs, n, vws);
    for (int i = 0; i < n; ++i) {
      const std::span<double> a(buf.actions.data() + (row + i) * ad, ad);
      buf.log_probs[row + i] =
          rl::sample_action(mean.subspan(static_cast<std::size_t>(i) * ad, ad), ac.log_std, env.rng(i), a);
      for (int j = 0; j < ad; ++j) squashed[static_cast<std::size_t>(i) * ad + j] = std::tanh(a[j]);
      buf.values[row + i] = value[i];
    }
    env.step(squashed, rewards, dones, stats.finished);
    std::copy(rewards.begin(), rewards.end(), buf.rewards.begin() + static_cast<std::ptrdiff_t>(row));
    std::copy(dones.begin(), dones.end(), buf.dones.begin() + static_cast<std::ptrdiff_t>(row));
  }
  normalized_obs(false);
  const auto last = ac.value.forward(obs, n, vws);
  std::copy(last.begin(), last.end(), buf.values.begin() + static_cast<std::ptrdiff_t>(buf.steps) * n);
}

TrainOutput train_policy(BatchEnv& env, const TrainRunConfig& cfg, long long budget, int stream, const Hooks& hooks) {
  cfg.validate();
  const int n = env.size();
  const int m = cfg.steps_per_rollout;
  const long long per_update = static_cast<long long>(n) * m;
  if (budget < per_update) throw ConfigError("budget must cover at least one rollout");
  const long long updates = budget / per_update;

  TrainOutput out;
  std::mt19937_64 init_rng = slot_rng(cfg.seed, -1, stream);
  std::mt19937_64 shuffle_rng = slot_rng(cfg.seed, -2, stream);
  out.model = rl::ActorCritic(env.obs_dim(), env.act_dim(), cfg.net);
  out.model.init(init_rng, cfg.net.init_log_std);
  rl::Optimizer opt(out.model);
  out.lr = cfg.ppo.learning_rate;
  rl::RolloutBuffer buf(m, n, env.obs_dim(), env.act_dim());

  double last_success = 0.0;
  double last_return = 0.0;
  for (long long u = 0; u < updates; ++u) {
    RolloutStats rs;
    collect_rollouts(out.model, env, buf, true, rs);
    rl::compute_gae(buf, cfg.ppo.gamma, cfg.ppo.lambda);
    const rl::UpdateStats st = rl::ppo_update(out.model, opt, buf, cfg.ppo, out.lr, shuffle_rng);

    if (!rs.finished.empty()) {
      double succ = 0.0;
      double ret = 0.0;
      for (const auto& e : rs.finished) {
        succ += e.success ? 1.0 : 0.0;
        ret += e.ret;
      }
      last_success = succ / static_cast<double>(rs.finished.size());
      last_return = ret / static_cast<double>(rs.finished.size());
    }
    MetricsRow row{env.env_steps(), last_success, last_return, st.approx_kl, out.lr};
    const bool finite = std::isfinite(row.success_rate) && std::isfinite(row.mean_return) &&
                        std::isfinite(row.approx_kl) && std::isfinite(row.lr);
    out.env_steps = env.env_steps();
    out.updates = static_cast<int>(u + 1);
    if (st.fault || !finite) {
      if (hooks.on_checkpoint) hooks.on_checkpoint(out.model, out.lr, out.env_steps, out.updates);
      throw NumericFault("non-finite loss or metrics at env step " + std::to_string(out.env_steps));
    }
    out.rows.push_back(row);
    const bool last = u + 1 == updates;
    bool keep_going = true;
    if (hooks.on_update) keep_going = hooks.on_update(row, out.model);
    if (hooks.on_checkpoint && (last || !keep_going || (cfg.checkpoint_every > 0 && out.updates % cfg.checkpoint_every == 0)))
      hooks.on_checkpoint(out.model, out.lr, out.env_steps, out.updates);
    if (!keep_going) break;
  }
  return out;
}

TrainOutput train_interaction(const TrainRunConfig& cfg, const sim::TaskSpec& task, long long budget,
                              const Hooks& hooks) {
  const sim::TaskSpec t = effective_task(task, cfg);
  InteractionEnvConfig ec;
  ec.variant = cfg.variant;
  ec.start = cfg.phase == PhaseMode::Monolithic ? sim::StartPhase::Acquisition : sim::StartPhase::Interaction;
  ec.controller.alpha = t.alpha;
  ec.threads = cfg.threads;
  InteractionEnv env(t, ec, cfg.num_envs, cfg.seed);
  return train_policy(env, cfg, budget, 0, hooks);
}

TrainOutput train_grasp(const TrainRunConfig& cfg, const sim::TaskSpec& task, long long budget, const Hooks& hooks) {
  const sim::TaskSpec t = effective_task(task, cfg);
  GraspEnv env(t, cfg.num_envs, cfg.seed, cfg.threads);
  return train_policy(env, cfg, budget, 1, hooks);
}

std::pair<long long, long long> split_budget(const TrainRunConfig& cfg) {
  // whole rollouts on both sides so the two phases spend exactly what one run would
  const long long per_update = static_cast<long long>(cfg.num_envs) * cfg.steps_per_rollout;
  const long long total = cfg.budget / per_update;
  const long long grasp = std::clamp<long long>(std::llround(static_cast<double>(total) * cfg.grasp_budget_fraction), 1,
                                                std::max<long long>(total - 1, 1));
  return {grasp * per_update, (total - grasp) * per_update};
}

}  // namespace asymdex::train
