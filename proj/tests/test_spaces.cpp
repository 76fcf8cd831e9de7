#include <doctest.h>

#include "asymdex/error.hpp"
#include "asymdex/spaces.hpp"
#include "controller_cases.hpp"
#include "oracles.hpp"

using namespace asymdex;
using namespace asymdex::spaces;
using geom::Pose;
using geom::Vec3;

namespace {

Dims dims(PolicyVariant v, const sim::HandModel& h, SpaceFlags f) { return space_dims(v, h, h, f); }

sim::EnvState switch_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sim::reset_sample(sim::default_task(sim::TaskId::Switch), rng);
}

}  // namespace

TEST_CASE("dimension tables for the two published hand configurations") {
  const auto shadow = sim::shadow_hand();
  const SpaceFlags sim_flags{true, true};
  CHECK(dims(PolicyVariant::Sym, shadow, sim_flags) == Dims{176, 52});
  CHECK(dims(PolicyVariant::AsymNoRel, shadow, sim_flags) == Dims{108, 32});
  CHECK(dims(PolicyVariant::RelNoAsym, shadow, sim_flags) == Dims{163, 46});
  CHECK(dims(PolicyVariant::AsymDex, shadow, sim_flags) == Dims{88, 26});
  const auto allegro = sim::allegro_hand();
  const SpaceFlags rw_flags{false, false};
  CHECK(dims(PolicyVariant::Sym, allegro, rw_flags) == Dims{60, 44});
  CHECK(dims(PolicyVariant::AsymNoRel, allegro, rw_flags) == Dims{44, 28});
  CHECK(dims(PolicyVariant::RelNoAsym, allegro, rw_flags) == Dims{53, 38});
  CHECK(dims(PolicyVariant::AsymDex, allegro, rw_flags) == Dims{30, 22});
  CHECK(dims(PolicyVariant::AsymDex, sim::abstract_hand(0, 0), {false, false}) == Dims{14, 6});
}

TEST_CASE("layouts are contiguous and named") {
  const auto h = sim::shadow_hand();
  for (auto v : kAllVariants) {
    const auto o = obs_layout(v, h, h, {true, true});
    CHECK_NOTHROW(o.validate());
    const auto a = action_layout(v, h, h);
    CHECK_NOTHROW(a.validate());
    CHECK(o.find("prev_action").length == a.dim);
  }
  const auto a = action_layout(PolicyVariant::AsymNoRel, h, h);
  CHECK(a.dim == 32);
  CHECK(a.find("dom_base_delta").length + a.find("dom_joints").length == 26);
  CHECK(a.find("fac_base_delta").length == 6);
  CHECK_THROWS_AS(a.find("nope"), std::out_of_range);
  CHECK(variant_from_string("AsymDex") == PolicyVariant::AsymDex);
  CHECK(!variant_from_string("asym"));
}

TEST_CASE("relative base is the identity when the dominant base coincides with P_f") {
  auto st = switch_state(1);
  st.hands[sim::kDominant].base = st.objects[sim::kFacilitatingObject].pose;
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto layout = obs_layout(PolicyVariant::AsymDex, task.facilitating, task.dominant, {true, true});
  const std::vector<double> prev(26, 0.0);
  const auto obs = build_observation(layout, st, prev);
  const auto rel = layout.view(obs, "rel_dom_base");
  const double expect[7] = {0, 0, 0, 1, 0, 0, 0};
  for (int i = 0; i < 7; ++i) CHECK(std::abs(rel[i] - expect[i]) <= 1e-15);
}

TEST_CASE("relative observations are invariant to a rigid world transform") {
  const auto task = sim::default_task(sim::TaskId::Switch);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto st = switch_state(100 + k);
    const auto moved = oracle::transform_state(st, oracle::random_pose(rng, 2.0));
    for (auto v : kAllVariants) {
      const auto layout = obs_layout(v, task.facilitating, task.dominant, {true, true});
      const std::vector<double> prev(static_cast<std::size_t>(layout.find("prev_action").length), 0.25);
      const auto a = build_observation(layout, st, prev);
      const auto b = build_observation(layout, moved, prev);
      double diff = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
      if (is_relative(v)) CHECK(diff <= 1e-9);
      else CHECK(diff > 1e-3);
    }
  }
}

TEST_CASE("relative observations need a facilitating grasp") {
  auto st = switch_state(2);
  st.hands[sim::kFacilitating].held.reset();
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto layout = obs_layout(PolicyVariant::AsymDex, task.facilitating, task.dominant, {true, true});
  CHECK_THROWS_AS(build_observation(layout, st, std::vector<double>(26, 0.0)), ConfigError);
}

TEST_CASE("zero action holds the bases and maps joints to mid-range") {
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto st = switch_state(4);
  for (auto v : kAllVariants) {
    const auto layout = action_layout(v, task.facilitating, task.dominant);
    const std::vector<double> zero(static_cast<std::size_t>(layout.dim), 0.0);
    const auto t = decode_action(layout, zero, st, task, {0.5});
    for (int h = 0; h < 2; ++h) {
      CHECK(t.base[h].pos == st.hands[h].base.pos);
      CHECK(t.base[h].orient == st.hands[h].base.orient);
    }
    for (int i = 0; i < task.dominant.n_joints_act; ++i) {
      const auto& lim = task.dominant.joint_limits[static_cast<std::size_t>(i)];
      CHECK(t.joints[sim::kDominant][static_cast<std::size_t>(i)] == doctest::Approx(0.5 * (lim.lo + lim.hi)));
    }
  }
}

TEST_CASE("relative +x action moves the relative target 2 cm along P_f x") {
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto st = switch_state(5);
  const auto layout = action_layout(PolicyVariant::AsymDex, task.facilitating, task.dominant);
  std::vector<double> a(static_cast<std::size_t>(layout.dim), 0.0);
  a[static_cast<std::size_t>(layout.find("rel_base_delta").offset)] = 1.0;
  const auto t = decode_action(layout, a, st, task, {0.5});
  const Pose frame = st.objects[sim::kFacilitatingObject].pose;
  const Pose grasp = geom::relative_pose(frame, st.hands[sim::kFacilitating].base);
  const Pose before = geom::relative_pose(st.hands[sim::kDominant].base, frame);
  const Pose after = geom::relative_pose(t.base[sim::kDominant], geom::compose(t.base[sim::kFacilitating], grasp));
  CHECK((after.pos - before.pos - Vec3{0.02, 0, 0}).norm() < 1e-12);
  // the facilitating base moves too when alpha < 1
  CHECK((t.base[sim::kFacilitating].pos - st.hands[sim::kFacilitating].base.pos).norm() > 1e-3);
}

TEST_CASE("actions are clamped and checked") {
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto st = switch_state(6);
  const auto layout = action_layout(PolicyVariant::Sym, task.facilitating, task.dominant);
  std::vector<double> big(static_cast<std::size_t>(layout.dim), 0.0), one = big;
  big[static_cast<std::size_t>(layout.find("dom_base_delta").offset)] = 7.0;
  one[static_cast<std::size_t>(layout.find("dom_base_delta").offset)] = 1.0;
  const auto tb = decode_action(layout, big, st, task, {0.5});
  const auto to = decode_action(layout, one, st, task, {0.5});
  CHECK(tb.base[sim::kDominant].pos == to.base[sim::kDominant].pos);
  CHECK((to.base[sim::kDominant].pos - st.hands[sim::kDominant].base.pos - Vec3{0.02, 0, 0}).norm() < 1e-15);
  big[0] = std::nan("");
  CHECK_THROWS_AS(decode_action(layout, big, st, task, {0.5}), NumericFault);
  CHECK_THROWS_AS(decode_action(layout, std::vector<double>(3, 0.0), st, task, {0.5}), ShapeError);
}

TEST_CASE("observation noise") {
  const auto task = sim::default_task(sim::TaskId::Switch);
  const auto layout = obs_layout(PolicyVariant::AsymDex, task.facilitating, task.dominant, {true, true});
  const auto st = switch_state(7);
  const auto clean = build_observation(layout, st, std::vector<double>(26, 0.0));
  std::mt19937_64 rng(8);

  auto copy = clean;
  add_observation_noise(copy, layout, rng, sim::NoiseSpec{});
  CHECK(copy == clean);

  sim::NoiseSpec ns;
  ns.object_pos = 0.02;
  ns.hand_orient = 0.1;
  const auto& seg = layout.find("rel_dom_object");
  const auto& hand = layout.find("rel_dom_base");
  const int n = 100000;
  double sum = 0.0, sq = 0.0, worst_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    copy = clean;
    add_observation_noise(copy, layout, rng, ns);
    const double d = copy[static_cast<std::size_t>(seg.offset)] - clean[static_cast<std::size_t>(seg.offset)];
    sum += d;
    sq += d * d;
    const double* q = copy.data() + hand.offset + 3;
    worst_norm = std::max(worst_norm, std::abs(std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) - 1.0));
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(var == doctest::Approx(0.02 * 0.02).epsilon(0.05));
  CHECK(worst_norm < 1e-12);
}

TEST_CASE("action noise stays in range") {
  std::mt19937_64 rng(9);
  std::vector<double> a(1000, 0.95);
  add_action_noise(a, rng, 0.5);
  for (double x : a) CHECK((x >= -1.0 && x <= 1.0));
}
