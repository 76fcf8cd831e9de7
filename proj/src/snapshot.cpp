#include "asymdex/snapshot.hpp"

#include <cmath>
#include <limits>

#include "asymdex/error.hpp"

namespace asymdex::sim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void put_pose(std::vector<double>& out, const geom::Pose& p) {
  const auto a = geom::to_array(p);
  out.insert(out.end(), a.begin(), a.end());
}

class Reader {
 public:
  explicit Reader(std::span<const double> r) : r_(r) {}
  double next() {
    if (pos_ >= r_.size()) throw ShapeError("snapshot record is truncated");
    return r_[pos_++];
  }
  int next_int() { return static_cast<int>(next()); }
  geom::Pose pose() {
    std::array<double, 7> a{};
    for (double& v : a) v = next();
    return {{a[0], a[1], a[2]}, {a[3], a[4], a[5], a[6]}};
  }
  geom::Vec3 vec3() {
    const double x = next(), y = next(), z = next();
    return {x, y, z};
  }
  std::vector<double> vec(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = next();
    return v;
  }
  bool exhausted() const { return pos_ == r_.size(); }

 private:
  std::span<const double> r_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<double> snapshot(const EnvState& s) {
  std::vector<double> out{kSnapshotVersion,
                          static_cast<double>(s.step_count),
                          s.phase == Phase::Interaction ? 1.0 : 0.0,
                          s.done ? 1.0 : 0.0,
                          s.success ? 1.0 : 0.0,
                          s.failed ? 1.0 : 0.0,
                          s.fault ? 1.0 : 0.0,
                          s.prev_articulation,
                          s.friction};
  for (const HandState& h : s.hands) {
    put_pose(out, h.base);
    out.push_back(static_cast<double>(h.joints.size()));
    out.insert(out.end(), h.joints.begin(), h.joints.end());
    out.insert(out.end(), h.joint_vels.begin(), h.joint_vels.end());
    out.insert(out.end(), h.joint_targets.begin(), h.joint_targets.end());
    out.push_back(h.held ? h.held->object : -1.0);
    put_pose(out, h.held ? h.held->grasp : geom::Pose::identity());
  }
  out.push_back(static_cast<double>(s.objects.size()));
  for (const ObjectState& o : s.objects) {
    put_pose(out, o.pose);
    out.insert(out.end(), {o.lin_vel.x(), o.lin_vel.y(), o.lin_vel.z()});
    out.insert(out.end(), {o.ang_vel.x(), o.ang_vel.y(), o.ang_vel.z()});
    out.push_back(o.attached_to ? *o.attached_to : -1.0);
    out.push_back(o.parent ? *o.parent : -1.0);
    put_pose(out, o.seat);
    out.push_back(o.articulation.value_or(kNaN));
    out.push_back(o.support_z.value_or(kNaN));
  }
  return out;
}

EnvState restore(std::span<const double> record) {
  Reader r(record);
  if (r.next() != kSnapshotVersion) throw ShapeError("snapshot record has an unsupported version");
  EnvState s;
  s.step_count = r.next_int();
  s.phase = r.next() != 0.0 ? Phase::Interaction : Phase::Acquisition;
  s.done = r.next() != 0.0;
  s.success = r.next() != 0.0;
  s.failed = r.next() != 0.0;
  s.fault = r.next() != 0.0;
  s.prev_articulation = r.next();
  s.friction = r.next();
  for (HandState& h : s.hands) {
    h.base = r.pose();
    const int n = r.next_int();
    if (n < 0) throw ShapeError("snapshot record has a negative joint count");
    h.joints = r.vec(n);
    h.joint_vels = r.vec(n);
    h.joint_targets = r.vec(n);
    const int held = r.next_int();
    const geom::Pose grasp = r.pose();
    if (held >= 0) h.held = Attachment{held, grasp};
  }
  const int n_obj = r.next_int();
  if (n_obj < 0) throw ShapeError("snapshot record has a negative object count");
  s.objects.resize(static_cast<std::size_t>(n_obj));
  for (ObjectState& o : s.objects) {
    o.pose = r.pose();
    o.lin_vel = r.vec3();
    o.ang_vel = r.vec3();
    if (const int a = r.next_int(); a >= 0) o.attached_to = a;
    if (const int p = r.next_int(); p >= 0) o.parent = p;
    o.seat = r.pose();
    if (const double a = r.next(); !std::isnan(a)) o.articulation = a;
    if (const double z = r.next(); !std::isnan(z)) o.support_z = z;
  }
  if (!r.exhausted()) throw ShapeError("snapshot record has trailing entries");
  return s;
}

}  // namespace asymdex::sim
