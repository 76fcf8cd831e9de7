#include "asymdex/task_spec.hpp"

#include <array>

#include "asymdex/error.hpp"

namespace asymdex::sim {
namespace {

constexpr std::array<std::pair<TaskId, std::string_view>, 7> kTaskNames{{
    {TaskId::BlockInCup, "BlockInCup"},
    {TaskId::Stack, "Stack"},
    {TaskId::BottleCap, "BottleCap"},
    {TaskId::Switch, "Switch"},
    {TaskId::RwBlockInCup, "RwBlockInCup"},
    {TaskId::RwPour, "RwPour"},
    {TaskId::RwTwistLid, "RwTwistLid"},
}};

BaseSampling box(Range x, Range y, Range z, Range roll) {
  BaseSampling s;
  s.x = x;
  s.y = y;
  s.z = z;
  s.roll = roll;
  return s;
}

void check_range(const Range& r, const std::string& what) {
  if (!r.valid()) throw ConfigError("task sampling range '" + what + "' is not a finite interval");
}

void check_sampling(const BaseSampling& s, const std::string& hand) {
  check_range(s.x, hand + ".x");
  check_range(s.y, hand + ".y");
  check_range(s.z, hand + ".z");
  check_range(s.roll, hand + ".roll");
  if (!(s.roll_axis.norm() > 0.0)) throw ConfigError("task sampling '" + hand + ".roll_axis' must be nonzero");
}

}  // namespace

std::string_view to_string(TaskId id) {
  for (const auto& [t, name] : kTaskNames)
    if (t == id) return name;
  return "unknown";
}

std::optional<TaskId> task_from_string(std::string_view name) {
  for (const auto& [t, n] : kTaskNames)
    if (n == name) return t;
  return std::nullopt;
}

bool is_real_world(TaskId id) {
  return id == TaskId::RwBlockInCup || id == TaskId::RwPour || id == TaskId::RwTwistLid;
}

double Range::sample(std::mt19937_64& rng) const {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

NoiseSpec NoiseSpec::table_defaults(bool with_action_noise) {
  NoiseSpec n;
  n.object_pos = 0.02;
  n.hand_joint = 0.2;
  n.hand_pos = 0.02;
  n.hand_orient = 0.05;
  n.action = with_action_noise ? 0.1 : 0.0;
  return n;
}

void TaskSpec::validate() const {
  facilitating.validate();
  dominant.validate();
  check_sampling(facilitating_sampling, "facilitating");
  check_sampling(dominant_sampling, "dominant");
  if (horizon < 1) throw ConfigError("task horizon must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("controller alpha must lie in [0, 1]");
  if (!(sim.dt > 0.0)) throw ConfigError("sim dt must be positive");
  const std::array<double, 9> coeffs{rewards.hand,    rewards.progress, rewards.action,
                                     rewards.success, rewards.task[0],  rewards.task[1],
                                     rewards.task[2], rewards.task[3],  rewards.grasp_beta};
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ConfigError("reward coefficients must be finite");
  if (!(rewards.success_bonus > 0.0) || !std::isfinite(rewards.success_bonus))
    throw ConfigError("success bonus must be positive");
  if (!(action_scaling.translation > 0.0) || !(action_scaling.rotation > 0.0))
    throw ConfigError("action scaling must be positive");
  if (randomization.friction) check_range(*randomization.friction, "randomization.friction");
  if (acquisition.grasp_horizon < 1) throw ConfigError("grasp horizon must be >= 1");
}

bool TaskSpec::dominant_holds_object() const {
  switch (id) {
    case TaskId::BlockInCup:
    case TaskId::Stack:
    case TaskId::RwBlockInCup:
    case TaskId::RwPour:
      return true;
    default:
      return false;
  }
}

TaskSpec default_task(TaskId id) {
  TaskSpec t;
  t.id = id;
  switch (id) {
    case TaskId::BlockInCup:
    case TaskId::Stack:
      t.dominant_sampling = box({0.3, 0.7}, {-0.2, 0.0}, {0.7, 1.1}, {-1.57, 1.57});
      t.facilitating_sampling = box({0.55, 0.55}, {0.6, 0.6}, {0.8, 0.8}, {0.0, 0.0});
      break;
    case TaskId::BottleCap:
      t.dominant_sampling = box({0.58, 0.62}, {-0.21, -0.19}, {0.58, 0.62}, {-1.0, 1.0});
      t.facilitating_sampling = box({0.53, 0.57}, {0.59, 0.61}, {0.43, 0.45}, {-0.5, 0.5});
      break;
    case TaskId::Switch:
      t.dominant_sampling = box({0.2, 0.6}, {-0.25, -0.05}, {0.5, 0.9}, {-1.0, 1.0});
      t.facilitating_sampling = box({0.2, 0.6}, {0.05, 0.25}, {0.41, 0.81}, {-1.0, 1.0});
      break;
    case TaskId::RwBlockInCup:
      t.dominant_sampling = box({0.40, 0.50}, {-0.25, -0.15}, {0.55, 0.65}, {-0.3, 0.3});
      t.facilitating_sampling = box({0.50, 0.55}, {0.20, 0.25}, {0.45, 0.50}, {-0.1, 0.1});
      break;
    case TaskId::RwPour:
      t.dominant_sampling = box({0.35, 0.55}, {-0.25, -0.15}, {0.55, 0.65}, {-1.1, 0.6});
      t.facilitating_sampling = box({0.45, 0.55}, {0.15, 0.25}, {0.45, 0.50}, {-0.1, 0.1});
      break;
    case TaskId::RwTwistLid:
      t.dominant_sampling = box({0.46, 0.54}, {-0.02, 0.04}, {0.62, 0.68}, {-0.2, 0.2});
      t.facilitating_sampling = box({0.48, 0.52}, {0.08, 0.12}, {0.45, 0.48}, {-0.1, 0.1});
      t.geometry.lid_offset = {0.0, 0.0, 0.1};
      break;
  }
  if (is_real_world(id)) {
    t.facilitating = allegro_hand();
    t.dominant = allegro_hand();
    t.randomization.enabled = true;
    t.randomization.noise = NoiseSpec::table_defaults(id == TaskId::RwTwistLid);
    if (id == TaskId::RwTwistLid) t.randomization.friction = Range{0.5, 1.5};
  }
  return t;
}

}  // namespace asymdex::sim
