#include "asymdex/geom.hpp"

#include <cmath>

namespace asymdex::geom {
namespace {

constexpr double kSmallAngle = 1e-8;

Quat raw_mul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

}  // namespace

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat canonical(Quat q) {
  const double n = q.norm();
  // Within a few ulps of unit norm the quaternion is left untouched so that
  // identity operations are bit-exact.
  if (std::abs(n - 1.0) > 1e-15) {
    q.w /= n;
    q.x /= n;
    q.y /= n;
    q.z /= n;
  }
  bool flip = q.w < 0.0;
  if (q.w == 0.0) {
    const double first = q.x != 0.0 ? q.x : (q.y != 0.0 ? q.y : q.z);
    flip = first < 0.0;
  }
  if (flip) q = {-q.w, -q.x, -q.y, -q.z};
  if (q.w == 0.0) q.w = 0.0;  // drop a negative zero
  return q;
}

bool is_canonical(const Quat& q, double tol) {
  if (std::abs(q.norm() - 1.0) > tol) return false;
  if (q.w > 0.0) return true;
  if (q.w < 0.0) return false;
  const double first = q.x != 0.0 ? q.x : (q.y != 0.0 ? q.y : q.z);
  return first >= 0.0;
}

Quat mul(const Quat& a, const Quat& b) { return canonical(raw_mul(a, b)); }

Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

Vec3 rotate(const Quat& q, const Vec3& v) {
  // v' = v + 2 u x (u x v + w v)
  const Vec3 u = q.vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w * t + u.cross(t);
}

Quat exp_map(const Vec3& rotvec) {
  const double theta = rotvec.norm();
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    const double s = 0.5 - t2 / 48.0;
    return canonical({1.0 - t2 / 8.0, s * rotvec.x(), s * rotvec.y(), s * rotvec.z()});
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half) / theta;
  return canonical({std::cos(half), s * rotvec.x(), s * rotvec.y(), s * rotvec.z()});
}

Vec3 log_map(const Quat& q_in) {
  const Quat q = canonical(q_in);
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < kSmallAngle) {
    // 2 atan(s / w) / s ~ (2 / w) (1 - s^2 / (3 w^2))
    const double w = q.w;
    return (2.0 / w) * (1.0 - s * s / (3.0 * w * w)) * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w);
  return (angle / s) * v;
}

Quat axis_angle(const Vec3& axis, double angle) { return exp_map(axis.normalized() * angle); }

Vec3 x_axis(const Quat& q) { return rotate(q, Vec3::UnitX()); }
Vec3 y_axis(const Quat& q) { return rotate(q, Vec3::UnitY()); }
Vec3 z_axis(const Quat& q) { return rotate(q, Vec3::UnitZ()); }

Pose Pose::make(const Vec3& pos, const Quat& orient) { return {pos, canonical(orient)}; }

Vec3 Pose::transform_point(const Vec3& local) const { return pos + rotate(orient, local); }

Vec3 Pose::inverse_transform_point(const Vec3& world) const { return rotate(conjugate(orient), world - pos); }

Pose compose(const Pose& a, const Pose& b) { return {a.pos + rotate(a.orient, b.pos), mul(a.orient, b.orient)}; }

Pose inverse(const Pose& p) {
  const Quat inv = conjugate(p.orient);
  return {-rotate(inv, p.pos), canonical(inv)};
}

Pose relative_pose(const Pose& x, const Pose& frame) { return compose(inverse(frame), x); }

PoseDelta pose_dist(const Pose& target, const Pose& current) {
  return {target.pos - current.pos, log_map(raw_mul(target.orient, conjugate(current.orient)))};
}

std::array<double, 7> to_array(const Pose& p) {
  return {p.pos.x(), p.pos.y(), p.pos.z(), p.orient.w, p.orient.x, p.orient.y, p.orient.z};
}

Pose from_array(std::span<const double, 7> a) { return Pose::make({a[0], a[1], a[2]}, {a[3], a[4], a[5], a[6]}); }

void write_pose(const Pose& p, std::span<double> out) {
  const auto a = to_array(p);
  for (std::size_t i = 0; i < 7; ++i) out[i] = a[i];
}

}  // namespace asymdex::geom
