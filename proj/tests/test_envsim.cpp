#include <doctest.h>

#include <cstring>

#include "asymdex/envsim.hpp"
#include "asymdex/error.hpp"
#include "asymdex/snapshot.hpp"
#include "oracles.hpp"

using namespace asymdex;
using namespace asymdex::sim;
using geom::Pose;
using geom::Quat;
using geom::Vec3;

namespace {

StepTargets hold_targets(const EnvState& s, const TaskSpec& task) {
  StepTargets t;
  for (int h = 0; h < 2; ++h) {
    t.base[h] = s.hands[h].base;
    const int n = hand_model(task, h).n_joints_act;
    t.joints[h].assign(s.hands[h].joints.begin(), s.hands[h].joints.begin() + n);
  }
  return t;
}

/// Bitwise equality; absent articulations are NaN in snapshots.
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("reset ranges") {
  const auto bic = default_task(TaskId::BlockInCup);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto s = reset_sample(bic, rng);
    const Vec3 p = s.hands[kDominant].base.pos;
    CHECK((p.x() >= 0.3 && p.x() <= 0.7));
    CHECK((p.y() >= -0.2 && p.y() <= 0.0));
    CHECK((p.z() >= 0.7 && p.z() <= 1.1));
    const Vec3 roll = geom::log_map(s.hands[kDominant].base.orient);
    CHECK(std::abs(roll.y()) <= 1.57 + 1e-12);
  }
  const auto cap = default_task(TaskId::BottleCap);
  for (int i = 0; i < 200; ++i) {
    const auto s = reset_sample(cap, rng);
    const double x = s.hands[kFacilitating].base.pos.x();
    CHECK((x >= 0.53 && x <= 0.57));
    REQUIRE(s.hands[kFacilitating].held);
    CHECK(s.hands[kFacilitating].held->object == kFacilitatingObject);
    CHECK(s.objects[kFacilitatingObject].attached_to == kFacilitating);
  }
}

TEST_CASE("reset is deterministic per seed") {
  for (auto id : {TaskId::BlockInCup, TaskId::Switch, TaskId::RwTwistLid}) {
    std::mt19937_64 a(42), b(42);
    const auto sa = reset_sample(default_task(id), a);
    const auto sb = reset_sample(default_task(id), b);
    CHECK(same_bits(snapshot(sa), snapshot(sb)));
    CHECK(sa.rng == sb.rng);
  }
}

TEST_CASE("holding targets leaves the state unchanged except the step count") {
  const auto task = default_task(TaskId::Switch);
  std::mt19937_64 rng(2);
  const auto s0 = reset_sample(task, rng);
  auto s = s0;
  step(s, task, hold_targets(s, task));
  CHECK(s.step_count == 1);
  auto a = snapshot(s0), b = snapshot(s);
  a[1] = b[1] = 0.0;  // step_count
  CHECK(same_bits(a, b));
}

TEST_CASE("free objects fall under gravity with semi-implicit Euler") {
  auto task = default_task(TaskId::BlockInCup);
  std::mt19937_64 rng(3);
  auto s = reset_sample(task, rng);
  release(s, kDominant, Vec3::Zero());
  const double z0 = s.objects[kDominantObject].pose.pos.z();
  auto t = hold_targets(s, task);
  for (std::size_t i = 0; i < t.joints[kDominant].size(); ++i) t.joints[kDominant][i] = task.dominant.joint_limits[i].lo;
  step(s, task, t);
  const ObjectState& o = s.objects[kDominantObject];
  CHECK(!o.attached_to);
  CHECK(o.lin_vel.z() == -9.81 * (1.0 / 60.0));
  CHECK(o.pose.pos.z() == z0 + o.lin_vel.z() * (1.0 / 60.0));
}

TEST_CASE("welded objects keep their grasp transform under arbitrary motion") {
  const auto task = default_task(TaskId::BlockInCup);
  std::mt19937_64 rng(4);
  auto s = reset_sample(task, rng);
  const Pose g0 = geom::relative_pose(s.objects[kFacilitatingObject].pose, s.hands[kFacilitating].base);
  std::normal_distribution<double> n(0.0, 0.05);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    auto t = hold_targets(s, task);
    for (auto& b : t.base) {
      b.pos += Vec3{n(rng), n(rng), 0.02 + n(rng)};
      b.orient = geom::mul(geom::exp_map({3 * n(rng), 3 * n(rng), 3 * n(rng)}), b.orient);
    }
    step(s, task, t);
    s.done = false;
    const Pose g = geom::relative_pose(s.objects[kFacilitatingObject].pose, s.hands[kFacilitating].base);
    worst = std::max(worst, (g.pos - g0.pos).norm());
    worst = std::max(worst, (oracle::rotation(g.orient) - oracle::rotation(g0.orient)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("switch articulation") {
  const auto task = default_task(TaskId::Switch);
  std::mt19937_64 rng(5);
  auto s = reset_sample(task, rng);
  s.hands[kDominant].base.pos += Vec3{0, 0, 0.5};
  const Pose prev_d = s.hands[kDominant].base, prev_p = s.objects[kFacilitatingObject].pose;
  update_articulation(s, task, prev_d, prev_p);
  CHECK(s.objects[kDominantObject].articulation == 0.0);

  // a fingertip pressed 1 cm into the button
  const Pose rest = geom::compose(s.objects[kFacilitatingObject].pose, s.objects[kDominantObject].seat);
  const Vec3 tip_local = task.dominant.fingertip_offsets[0];
  s.hands[kDominant].base = {rest.transform_point(Vec3{0, 0, -0.01}) - geom::rotate(rest.orient, tip_local), rest.orient};
  update_articulation(s, task, prev_d, prev_p);
  CHECK(*s.objects[kDominantObject].articulation == doctest::Approx(0.01 * task.geometry.button_limit / 0.02));

  s.objects[kDominantObject].articulation = 0.3585;
  CHECK(check_success(s, task));
  s.objects[kDominantObject].articulation = 0.35;
  CHECK(!check_success(s, task));
}

TEST_CASE("twisting the dominant base about the jar axis turns the lid") {
  const auto task = default_task(TaskId::RwTwistLid);
  std::mt19937_64 rng(6);
  auto s = reset_sample(task, rng);
  const Pose jar = s.objects[kFacilitatingObject].pose;
  const Pose grip{{0, 0, task.geometry.lid_offset.z() + 0.02}, Quat::identity()};
  const int steps = 360;
  const double inc = 2.0 * std::numbers::pi / steps;
  double oracle_yaw = 0.0;
  const double a0 = s.objects[kDominantObject].articulation.value_or(0.0);
  s.hands[kDominant].base = geom::compose(jar, grip);
  for (int k = 1; k <= steps; ++k) {
    const Pose prev = s.hands[kDominant].base;
    s.hands[kDominant].base = geom::compose(jar, geom::compose({Vec3::Zero(), geom::axis_angle(Vec3::UnitZ(), k * inc)}, grip));
    update_articulation(s, task, prev, jar);
    oracle_yaw += inc;
  }
  CHECK(*s.objects[kDominantObject].articulation - a0 == doctest::Approx(oracle_yaw).epsilon(1e-9));
  CHECK(oracle_yaw == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("success boundaries") {
  std::mt19937_64 rng(7);
  auto bic = default_task(TaskId::BlockInCup);
  auto s = reset_sample(bic, rng);
  s.objects[kFacilitatingObject].pose.pos = {0.0, 0.0, 1.0};
  s.objects[kDominantObject].pose.pos = {0.03, 0.0, 1.0};
  CHECK(check_success(s, bic));
  auto stack = default_task(TaskId::Stack);
  s.objects[kDominantObject].pose.pos = {0.02, 0.0, 1.0};
  CHECK(!check_success(s, stack));
  s.objects[kDominantObject].pose.pos = {0.0199, 0.0, 1.0};
  CHECK(check_success(s, stack));

  auto lid = default_task(TaskId::RwTwistLid);
  auto sl = reset_sample(lid, rng);
  sl.objects[kDominantObject].articulation = 3.0 * std::numbers::pi;
  CHECK(check_success(sl, lid));
  sl.objects[kDominantObject].articulation = 2.9 * std::numbers::pi;
  CHECK(!check_success(sl, lid));
}

TEST_CASE("reset conditions") {
  const auto task = default_task(TaskId::BlockInCup);
  std::mt19937_64 rng(8);
  auto s = reset_sample(task, rng);
  CHECK(!check_reset(s, task));
  auto dropped = s;
  dropped.objects[kDominantObject].pose.pos.z() = 0.0;
  CHECK(check_reset(dropped, task));
  auto late = s;
  late.step_count = task.horizon;
  CHECK(check_reset(late, task));
}

TEST_CASE("non-finite targets fault the episode") {
  const auto task = default_task(TaskId::Switch);
  std::mt19937_64 rng(9);
  auto s = reset_sample(task, rng);
  auto t = hold_targets(s, task);
  t.base[0].pos.x() = std::nan("");
  const auto r = step(s, task, t);
  CHECK(r.fault);
  CHECK(r.done);
  CHECK(s.fault);
  auto bad = hold_targets(s, task);
  bad.joints[0].pop_back();
  CHECK_THROWS_AS(step(s, task, bad), ShapeError);
}

TEST_CASE("acquisition start rests objects one lift height below the carry pose") {
  const auto task = default_task(TaskId::BlockInCup);
  std::mt19937_64 a(10), b(10);
  const auto inter = reset_sample(task, a, StartPhase::Interaction);
  const auto acq = reset_sample(task, b, StartPhase::Acquisition);
  CHECK(!acq.hands[kFacilitating].held);
  for (int h = 0; h < 2; ++h)
    CHECK((acq.objects[h].pose.pos - (inter.hands[h].base.pos - Vec3{0, 0, task.acquisition.lift_height})).norm() <
          1e-12);
  // supported objects do not fall
  auto s = acq;
  step(s, task, hold_targets(s, task));
  CHECK(s.objects[0].pose.pos.z() == acq.objects[0].pose.pos.z());
}

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(11);
  const auto s = reset_sample(default_task(TaskId::RwTwistLid), rng);
  const auto rec = snapshot(s);
  CHECK(same_bits(snapshot(restore(rec)), rec));
  CHECK_THROWS_AS(restore(std::span<const double>(rec.data(), 5)), ShapeError);
}

TEST_CASE("pre-grasp fingertips start within the grasp radius") {
  for (TaskId id : {TaskId::BlockInCup, TaskId::Stack}) {
    const auto task = default_task(id);
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const auto s = reset_sample(task, rng, StartPhase::Acquisition);
      for (int h = 0; h < 2; ++h)
        for (int t = 0; t < 2; ++t)
          worst = std::max(worst, (fingertip_position(s, task, h, t) - s.objects[h].pose.pos).norm());
    }
    CHECK(worst < task.sim.grasp_radius);
  }
}

TEST_CASE("attachment waits for the tracked finger closure") {
  const auto task = default_task(TaskId::BlockInCup);
  std::mt19937_64 rng(13);
  auto s = reset_sample(task, rng, StartPhase::Acquisition);
  auto t = hold_targets(s, task);
  // commanded closure 0.6 is above the threshold at once; the joints get there on the third step
  const auto closing = task.facilitating.configuration(0.6);
  t.joints[kFacilitating].assign(closing.begin(), closing.begin() + task.facilitating.n_joints_act);
  step(s, task, t);
  CHECK(!s.hands[kFacilitating].held);
  step(s, task, t);
  CHECK(!s.hands[kFacilitating].held);
  step(s, task, t);
  CHECK(s.hands[kFacilitating].held);
  CHECK(task.facilitating.closure(s.hands[kFacilitating].joints) > task.sim.close_threshold);
}
