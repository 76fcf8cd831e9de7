#pragma once
// Observation and action spaces for the four policy variants. Relative variants
// express the dominant hand base and its object in the frame P_f of the object
// held by the facilitating hand; absolute variants use world coordinates.

#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asymdex/controller.hpp"
#include "asymdex/envsim.hpp"

namespace asymdex::spaces {

enum class PolicyVariant { Sym, AsymNoRel, RelNoAsym, AsymDex };

inline constexpr PolicyVariant kAllVariants[] = {PolicyVariant::Sym, PolicyVariant::AsymNoRel,
                                                 PolicyVariant::RelNoAsym, PolicyVariant::AsymDex};

std::string_view to_string(PolicyVariant v);
std::optional<PolicyVariant> variant_from_string(std::string_view name);
/// Relative variants observe and act in P_f.
bool is_relative(PolicyVariant v);

/// Noise classes of observation segments.
enum class SegmentKind { JointPos, JointVel, HandPose, ObjectPose, PrevAction, BaseDelta, JointTarget };

struct Segment {
  std::string name;
  int offset = 0;
  int length = 0;
  SegmentKind kind = SegmentKind::JointPos;
};

struct SpaceFlags {
  bool include_joint_vels = true;
  bool include_prev_action = true;
};

/// Ordered, contiguous segments of a flat vector.
struct Layout {
  PolicyVariant variant = PolicyVariant::AsymDex;
  SpaceFlags flags;
  std::vector<Segment> segments;
  int dim = 0;

  /// Throws ShapeError when segments overlap, leave gaps or miss the total.
  void validate() const;
  /// Throws std::out_of_range for unknown names.
  const Segment& find(std::string_view name) const;
  bool has(std::string_view name) const;
  std::span<const double> view(std::span<const double> v, std::string_view name) const;
  std::string to_json() const;
};

using ObsLayout = Layout;
using ActionLayout = Layout;

struct Dims {
  int obs = 0;
  int act = 0;
  bool operator==(const Dims&) const = default;
};

ObsLayout obs_layout(PolicyVariant v, const sim::HandModel& fac, const sim::HandModel& dom, SpaceFlags flags);
ActionLayout action_layout(PolicyVariant v, const sim::HandModel& fac, const sim::HandModel& dom);
Dims space_dims(PolicyVariant v, const sim::HandModel& fac, const sim::HandModel& dom, SpaceFlags flags);

/// Flags used by a task: velocities and previous action for the simulated
/// benchmark tasks, positions only for the real-world counterparts.
SpaceFlags default_flags(sim::TaskId id);

/// Packs an observation. `prev_action` must match the action dimension when
/// the layout includes it. Relative variants throw ConfigError when the
/// facilitating hand holds nothing (P_f undefined).
std::vector<double> build_observation(const ObsLayout& layout, const sim::EnvState& state,
                                      std::span<const double> prev_action);

/// Maps an action in [-1, 1] to base and joint targets for both hands.
/// Throws ShapeError on a wrong length and NumericFault on non-finite entries.
sim::StepTargets decode_action(const ActionLayout& layout, std::span<const double> action, const sim::EnvState& state,
                               const sim::TaskSpec& task, const control::ControllerConfig& ctrl);

/// Per-class Gaussian observation noise. Orientation noise is a rotation-vector
/// perturbation followed by renormalization.
void add_observation_noise(std::span<double> obs, const ObsLayout& layout, std::mt19937_64& rng,
                           const sim::NoiseSpec& noise);

/// Additive Gaussian action noise, clipped back to [-1, 1].
void add_action_noise(std::span<double> action, std::mt19937_64& rng, double sigma);

/// Affine map between [-1, 1] and a joint range.
double joint_from_unit(double a, const sim::JointLimit& lim);
double unit_from_joint(double q, const sim::JointLimit& lim);

}  // namespace asymdex::spaces
