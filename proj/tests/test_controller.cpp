#include <doctest.h>

#include <limits>

#include "asymdex/error.hpp"
#include "controller_cases.hpp"

using namespace asymdex;
using namespace asymdex::geom;
using control::ControllerConfig;
using control::split_base_targets;

TEST_CASE("alpha endpoints hold one hand still") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto c = oracle::random_controller_case(rng, 0.1);
    const auto t1 = split_base_targets(c.target_rel, c.current_rel, c.base_d, c.base_f, c.frame_f, ControllerConfig{1.0});
    CHECK(t1.facilitating.pos == c.base_f.pos);
    CHECK(t1.facilitating.orient == c.base_f.orient);
    const auto t0 = split_base_targets(c.target_rel, c.current_rel, c.base_d, c.base_f, c.frame_f, ControllerConfig{0.0});
    CHECK(t0.dominant.pos == c.base_d.pos);
    CHECK(t0.dominant.orient == c.base_d.orient);
  }
}

TEST_CASE("alpha 0.5 splits a pure translation") {
  const Pose base_d{{0.4, -0.1, 0.8}, Quat::identity()};
  const Pose base_f{{0.4, 0.2, 0.6}, Quat::identity()};
  const Pose current = relative_pose(base_d, base_f);
  const Pose target{current.pos + Vec3{0.1, 0, 0}, current.orient};
  const auto t = split_base_targets(target, current, base_d, base_f, base_f, ControllerConfig{0.5});
  CHECK((t.dominant.pos - (base_d.pos + Vec3{0.05, 0, 0})).norm() < 1e-15);
  CHECK((t.facilitating.pos - (base_f.pos - Vec3{0.05, 0, 0})).norm() < 1e-15);
  CHECK(t.dominant.orient == base_d.orient);
  CHECK(t.facilitating.orient == base_f.orient);
}

TEST_CASE("perfect tracking realizes the relative target") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> alpha(0.0, 1.0);
  double worst_pos = 0.0, worst_rot = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const auto c = oracle::random_controller_case(rng, 0.1);
    const auto t = split_base_targets(c.target_rel, c.current_rel, c.base_d, c.base_f, c.frame_f, {alpha(rng)});
    const Pose got = oracle::realized(c, t);
    worst_pos = std::max(worst_pos, (got.pos - c.target_rel.pos).norm());
    worst_rot = std::max(worst_rot, oracle::angle_between(oracle::rotation(got.orient),
                                                          oracle::rotation(c.target_rel.orient)));
  }
  CHECK(worst_pos < 1e-12);
  CHECK(worst_rot < 1e-6);
}

TEST_CASE("controller config validation") {
  CHECK_THROWS_AS(ControllerConfig{1.5}.validate(), ConfigError);
  CHECK_THROWS_AS(ControllerConfig{-0.1}.validate(), ConfigError);
  CHECK_NOTHROW(ControllerConfig{0.0}.validate());
}

TEST_CASE("joint tracking") {
  const std::vector<double> cur{0.1, -0.2, 0.5}, tgt{0.4, 0.3, 0.5};
  CHECK(control::track_joint_targets(cur, cur, 30.0, 1.0 / 60.0) == cur);
  CHECK(control::track_joint_targets(cur, tgt, std::numeric_limits<double>::infinity(), 1.0 / 60.0) == tgt);
  const auto next = control::track_joint_targets(cur, tgt, 30.0, 1.0 / 60.0);
  const double k = 1.0 - std::exp(-0.5);
  CHECK(k == doctest::Approx(0.3935).epsilon(1e-4));
  for (std::size_t i = 0; i < cur.size(); ++i) CHECK(next[i] - cur[i] == doctest::Approx(k * (tgt[i] - cur[i])));
  CHECK_THROWS_AS(control::track_joint_targets(cur, std::vector<double>{0.0}, 30.0, 0.1), ShapeError);
  const std::vector<sim::JointLimit> lim(3, {0.0, 0.2});
  const auto clamped = control::track_joint_targets(cur, tgt, 1e9, 1.0, lim);
  for (double q : clamped) CHECK((q >= 0.0 && q <= 0.2));
}
