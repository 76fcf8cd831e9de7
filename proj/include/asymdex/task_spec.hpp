#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "asymdex/geom.hpp"
#include "asymdex/hand_model.hpp"

namespace asymdex::sim {

enum class TaskId { BlockInCup, Stack, BottleCap, Switch, RwBlockInCup, RwPour, RwTwistLid };

std::string_view to_string(TaskId id);
std::optional<TaskId> task_from_string(std::string_view name);
/// Real-world counterparts use the 16-joint hand configuration.
bool is_real_world(TaskId id);

enum class StartPhase { Interaction, Acquisition };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }
  double sample(std::mt19937_64& rng) const;
};

/// Uniform base placement: position box plus a roll about the arm axis applied
/// on top of the nominal orientation.
struct BaseSampling {
  Range x, y, z, roll;
  geom::Vec3 roll_axis = geom::Vec3::UnitY();
  geom::Quat nominal_orient{};
};

/// Fixed points declared in object frames.
struct TaskGeometry {
  geom::Vec3 cup_mouth{0.0, 0.0, 0.05};
  geom::Vec3 cup_rim{0.0, 0.0, 0.06};
  geom::Vec3 bottle_top{0.0, 0.0, 0.08};
  geom::Vec3 button_offset{0.0, 0.0, 0.04};
  double button_radius = 0.03;
  double button_travel = 0.04;      // contact zone depth below the button surface
  double button_full_depth = 0.02;  // penetration that drives the button to its limit
  double button_limit = 0.5585;
  geom::Vec3 lid_offset{0.0, 0.0, 0.08};
  double lid_radius = 0.025;
  double lid_limit = 12.0 * std::numbers::pi;
};

struct SuccessParams {
  double block_in_cup = 0.035;
  double stack = 0.02;
  double cap_displacement = 0.05;
  double switch_angle = 0.3585;
  double pour_rim = 0.035;
  double upright_dot = 0.95;
  double twist_angle = 3.0 * std::numbers::pi;
};

struct SimParams {
  double dt = 1.0 / 60.0;
  double grasp_radius = 0.03;
  double close_threshold = 0.5;   // normalized joint closure that triggers attachment
  double release_closure = 0.25;  // normalized joint closure below which a weld lets go
  double floor_z = 0.05;
  geom::Vec3 gravity{0.0, 0.0, -9.81};
};

/// Per-step bounds applied to [-1, 1] base-delta action entries.
struct ActionScaling {
  double translation = 0.02;  // m
  double rotation = 0.05;     // rad
};

struct RewardCoeffs {
  double hand = 0.5;       // alpha_1
  double progress = 1.0;   // alpha_2
  double action = 0.01;    // alpha_3
  double success = 10.0;   // alpha_4
  double success_bonus = 25.0;
  std::array<double, 4> task{1.0, 1.0, 1.0, -1.0};  // beta_1..beta_4 (real-world tasks)
  double grasp_alpha = 0.1;
  double grasp_beta = 10.0;
};

/// Gaussian standard deviations per observation class.
struct NoiseSpec {
  double object_pos = 0.0;
  double hand_joint = 0.0;
  double hand_pos = 0.0;
  double hand_orient = 0.0;
  double action = 0.0;

  static NoiseSpec table_defaults(bool with_action_noise);
};

struct DomainRandomization {
  bool enabled = false;
  NoiseSpec noise{};
  std::optional<Range> friction;  // passthrough only
};

struct AcquisitionParams {
  double lift_height = 0.15;
  int grasp_horizon = 120;
  geom::Vec3 pregrasp_offset{0.0, 0.0, 0.01};  // hand base relative to the object, object frame
};

struct TaskSpec {
  TaskId id = TaskId::Switch;
  HandModel facilitating = shadow_hand();
  HandModel dominant = shadow_hand();
  BaseSampling facilitating_sampling;
  BaseSampling dominant_sampling;
  int horizon = 300;
  double alpha = 0.5;
  TaskGeometry geometry;
  SuccessParams success;
  SimParams sim;
  ActionScaling action_scaling;
  RewardCoeffs rewards;
  DomainRandomization randomization;
  AcquisitionParams acquisition;

  /// Throws ConfigError on invalid ranges, coefficients or hand models.
  void validate() const;
  /// The dominant hand starts the interaction phase holding its object.
  bool dominant_holds_object() const;
};

TaskSpec default_task(TaskId id);

}  // namespace asymdex::sim
