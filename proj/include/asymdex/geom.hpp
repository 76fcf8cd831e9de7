#pragma once
// Rigid-frame algebra: unit quaternions (scalar-first, sign-canonical), poses,
// composition, relative frames and the 6D pose difference used by the
// relative-pose controller.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <span>

namespace asymdex::geom {

using Vec3 = Eigen::Vector3d;

/// Unit quaternion, scalar first. Canonical form has w >= 0 (and, when w == 0,
/// a non-negative first nonzero vector component).
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat identity() { return {}; }
  Vec3 vec() const { return {x, y, z}; }
  double norm() const;
  bool operator==(const Quat&) const = default;
};

/// Normalizes and sign-canonicalizes.
Quat canonical(Quat q);
bool is_canonical(const Quat& q, double tol = 1e-9);

/// Hamilton product a * b (rotation b applied first), canonicalized.
Quat mul(const Quat& a, const Quat& b);
Quat conjugate(const Quat& q);
Vec3 rotate(const Quat& q, const Vec3& v);

/// Rotation vector (axis * angle) -> unit quaternion.
Quat exp_map(const Vec3& rotvec);
/// Unit quaternion -> rotation vector on the principal branch, |result| <= pi.
Vec3 log_map(const Quat& q);

Quat axis_angle(const Vec3& axis, double angle);

/// Columns of the rotation matrix.
Vec3 x_axis(const Quat& q);
Vec3 y_axis(const Quat& q);
Vec3 z_axis(const Quat& q);

struct Pose {
  Vec3 pos = Vec3::Zero();
  Quat orient{};

  static Pose identity() { return {}; }
  /// Builds a pose with a normalized, canonical orientation.
  static Pose make(const Vec3& pos, const Quat& orient);

  /// Point given in this frame, expressed in the parent frame.
  Vec3 transform_point(const Vec3& local) const;
  /// Point given in the parent frame, expressed in this frame.
  Vec3 inverse_transform_point(const Vec3& world) const;
};

/// 6D pose difference: translation delta plus rotation vector.
struct PoseDelta {
  Vec3 dpos = Vec3::Zero();
  Vec3 drot = Vec3::Zero();
};

/// a after b: pos = a.pos + R_a b.pos, orient = a.orient * b.orient.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);
/// x expressed in the coordinate frame `frame`: compose(inverse(frame), x).
Pose relative_pose(const Pose& x, const Pose& frame);
/// dpos = target.pos - current.pos, drot = log(target.orient * current.orient^-1).
PoseDelta pose_dist(const Pose& target, const Pose& current);

/// Serialized layout used by every file format and log: [px, py, pz, qw, qx, qy, qz].
std::array<double, 7> to_array(const Pose& p);
Pose from_array(std::span<const double, 7> a);
void write_pose(const Pose& p, std::span<double> out);

}  // namespace asymdex::geom
