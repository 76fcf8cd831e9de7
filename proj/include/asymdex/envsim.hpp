#pragma once
// Desk-scale bimanual task simulator. Hand bases are floating 6-DoF frames
// that track pose targets with a first-order law; fingers are joint vectors.
// Grasps are welds: a held object is rigidly attached to its hand base.
// Sub-bodies (cap, button, lid) ride on their parent object until an
// articulation rule moves or detaches them.

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "asymdex/geom.hpp"
#include "asymdex/task_spec.hpp"

namespace asymdex::sim {

inline constexpr int kFacilitating = 0;
inline constexpr int kDominant = 1;
/// Object slot 0 belongs to the facilitating hand (frame P_f), slot 1 to the dominant hand.
inline constexpr int kFacilitatingObject = 0;
inline constexpr int kDominantObject = 1;

enum class Phase { Acquisition, Interaction };

struct Attachment {
  int object = -1;
  geom::Pose grasp;  // object pose in the hand-base frame
};

struct HandState {
  geom::Pose base;
  std::vector<double> joints;
  std::vector<double> joint_vels;
  std::vector<double> joint_targets;  // last commanded full target vector
  std::optional<Attachment> held;
};

struct ObjectState {
  geom::Pose pose;
  geom::Vec3 lin_vel = geom::Vec3::Zero();
  geom::Vec3 ang_vel = geom::Vec3::Zero();
  std::optional<int> attached_to;  // hand index while welded
  std::optional<int> parent;       // parent object while seated as a sub-body
  geom::Pose seat;                 // sub-body rest pose in the parent frame
  std::optional<double> articulation;
  std::optional<double> support_z;  // virtual support plane (acquisition start)
};

struct EnvState {
  std::array<HandState, 2> hands;
  std::vector<ObjectState> objects;
  int step_count = 0;
  Phase phase = Phase::Interaction;
  bool done = false;
  bool success = false;
  bool failed = false;
  bool fault = false;
  double prev_articulation = 0.0;  // articulation angle before the last step
  double friction = 1.0;           // randomization passthrough
  std::mt19937_64 rng;
};

struct StepTargets {
  std::array<geom::Pose, 2> base;
  std::array<std::vector<double>, 2> joints;  // n_joints_act per hand
};

struct StepResult {
  bool done = false;
  bool success = false;
  bool failed = false;
  bool fault = false;
  bool timeout = false;
};

/// Samples an initial state. Interaction starts weld held objects to their hands
/// with identity grasp transforms; acquisition starts rest them on support planes
/// one lift height below, with the hands at their pre-grasp poses.
EnvState reset_sample(const TaskSpec& task, std::mt19937_64& rng, StartPhase start = StartPhase::Interaction);

/// Advances one control step of length task.sim.dt. Non-finite targets mark a
/// fault and end the episode as failed without moving anything.
StepResult step(EnvState& state, const TaskSpec& task, const StepTargets& targets);

/// Articulation and sub-body rules for the current hand and parent poses.
/// `prev_dominant_base` and `prev_parent` are the poses before this step (lid twist).
void update_articulation(EnvState& state, const TaskSpec& task, const geom::Pose& prev_dominant_base,
                         const geom::Pose& prev_parent);

bool check_success(const EnvState& state, const TaskSpec& task);
/// Dropped object, exhausted horizon or success.
bool check_reset(const EnvState& state, const TaskSpec& task);

/// World-frame points of a hand.
geom::Vec3 palm_position(const EnvState& state, const TaskSpec& task, int hand);
geom::Vec3 fingertip_position(const EnvState& state, const TaskSpec& task, int hand, int tip);

/// Lid-rim distance of a point given in the jar frame.
double rim_distance(const geom::Vec3& point_in_jar, const TaskGeometry& g);

/// Pose of a seated sub-body from its parent and articulation angle.
geom::Pose seated_pose(const ObjectState& child, const geom::Pose& parent, TaskId task);

/// Kinematic attachment helpers.
void weld(EnvState& state, int hand, int object);
void release(EnvState& state, int hand, const geom::Vec3& lin_vel);

const HandModel& hand_model(const TaskSpec& task, int hand);

}  // namespace asymdex::sim
