#include "doctest.h"

#include "lexplan/systems.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace lexplan;
using namespace lexplan::sys;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// Output trace of a single-track pose sequence, inputs zero. A single pose
/// is repeated since traces need two columns.
stl::Trace poses(const std::vector<std::array<double, 5>>& states, double dt = 0.2) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(7, std::max<Eigen::Index>(2, static_cast<Eigen::Index>(states.size())));
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (int r = 0; r < 5; ++r) y(r, static_cast<Eigen::Index>(k)) = states[k][static_cast<std::size_t>(r)];
  }
  if (states.size() == 1) y.col(1) = y.col(0);
  return stl::Trace(y, dt);
}

std::shared_ptr<const Lane> straight_lane(double width) {
  return std::make_shared<const Lane>(std::vector<Eigen::Vector2d>{{0.0, 0.0}, {100.0, 0.0}}, width);
}

}  // namespace

TEST_CASE("integrator steps and bounds") {
  const Integrator sys;
  CHECK(sys.step(vec({0.0}), vec({1.35}))(0) == doctest::Approx(1.35));
  CHECK(sys.step(vec({5.0}), vec({0.0}))(0) == 5.0);
  CHECK(sys.u_lo()(0) == -1.35);
  CHECK(sys.u_hi()(0) == 1.35);

  const auto r = rollout(sys, vec({0.0}), Eigen::MatrixXd::Constant(1, 9, 1.35));
  CHECK(r.states(0, 8) == doctest::Approx(10.8).epsilon(1e-12));
  CHECK(r.trace.K() == 8);
  CHECK(r.trace(0, 8) == r.states(0, 8));

  CHECK_THROWS_AS(Integrator(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("integrator reachable set after k steps is the interval of width 2.7k") {
  const Integrator sys;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.35, 1.35);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::MatrixXd in(1, 9);
    for (int k = 0; k < 9; ++k) in(0, k) = u(rng);
    const auto r = rollout(sys, vec({0.5}), in);
    for (int k = 0; k <= 8; ++k) {
      CHECK(std::abs(r.states(0, k) - 0.5) <= 1.35 * k + 1e-12);
    }
  }
  const auto lo = rollout(sys, vec({0.5}), Eigen::MatrixXd::Constant(1, 9, -1.35));
  CHECK(lo.states(0, 5) == doctest::Approx(0.5 - 5 * 1.35));
}

TEST_CASE("single-track Euler step") {
  const SingleTrack car;
  SUBCASE("zero velocity is a fixed point") {
    const auto x = vec({1.0, 2.0, 0.7, 0.1, 0.0});
    CHECK(car.step(x, vec({0.0, 0.0})) == x);
  }
  SUBCASE("straight driving") {
    const auto next = car.step(vec({0.0, 0.0, 0.0, 0.0, 10.0}), vec({0.0, 0.0}));
    CHECK(next(st::kX) == doctest::Approx(2.0));
    CHECK(next(st::kY) == 0.0);
    CHECK(next(st::kTheta) == 0.0);
    CHECK(next(st::kV) == 10.0);
  }
  SUBCASE("yaw rate from steering") {
    const auto next = single_track_step(vec({0.0, 0.0, 0.0, 0.2, 10.0}), vec({0.1, 1.0}), 0.2, 3.0);
    CHECK(next(st::kTheta) == doctest::Approx(0.2 * 10.0 / 3.0 * std::tan(0.2)));
    CHECK(next(st::kDelta) == doctest::Approx(0.22));
    CHECK(next(st::kV) == doctest::Approx(10.2));
  }
  SUBCASE("output is state and input") {
    const auto y = car.output(vec({1, 2, 3, 0.1, 5}), vec({0.2, -1}));
    REQUIRE(y.size() == 7);
    CHECK(y(st::kSteerRate) == 0.2);
    CHECK(y(st::kAccel) == -1.0);
    CHECK(y(st::kTheta) == 3.0);
  }
  SUBCASE("steering singularity") {
    CHECK_THROWS_AS(single_track_step(vec({0, 0, 0, std::numbers::pi / 2, 1}), vec({0, 0}), 0.2, 3.0),
                    std::domain_error);
    CHECK_THROWS_AS(single_track_step(vec({0, 0, 0, -2.0, 1}), vec({0, 0}), 0.2, 3.0), std::domain_error);
  }
  CHECK(car.params().wheelbase == 3.0);
  CHECK(car.dt() == 0.2);
}

TEST_CASE("single-track mirrored steering gives mirrored trajectories") {
  const SingleTrack car;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> steer(-0.3, 0.3), acc(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd u(2, 16), m(2, 16);
    for (int k = 0; k < 16; ++k) {
      u(0, k) = steer(rng);
      u(1, k) = acc(rng);
      m(0, k) = -u(0, k);
      m(1, k) = u(1, k);
    }
    const auto a = rollout(car, vec({0, 0, 0, 0, 8}), u);
    const auto b = rollout(car, vec({0, 0, 0, 0, 8}), m);
    for (int k = 0; k <= 15; ++k) {
      CHECK(b.states(st::kX, k) == doctest::Approx(a.states(st::kX, k)));
      CHECK(b.states(st::kY, k) == doctest::Approx(-a.states(st::kY, k)));
      CHECK(b.states(st::kTheta, k) == doctest::Approx(-a.states(st::kTheta, k)));
      CHECK(b.states(st::kDelta, k) == doctest::Approx(-a.states(st::kDelta, k)));
    }
  }
}

TEST_CASE("rollout rejects non-finite states") {
  const Integrator sys(1e308, 1.0);
  CHECK_THROWS_AS(rollout(sys, vec({1e308}), Eigen::MatrixXd::Constant(1, 3, 1e308)), std::domain_error);
  const SingleTrack car;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(rollout(car, vec({0, 0, 0, 1.6, 1}), u), std::domain_error);
}

TEST_CASE("disc cover") {
  const auto d = vehicle_discs(0.0, 0.0, 0.0, 4.5, 1.8);
  CHECK(d[0].center.x() == doctest::Approx(1.125));
  CHECK(d[1].center.x() == doctest::Approx(2.25));
  CHECK(d[2].center.x() == doctest::Approx(3.375));
  CHECK(d[0].radius == doctest::Approx(std::hypot(1.125, 0.9)));
  const auto c = centered_discs(2.25, 0.0, 0.0, 4.5, 1.8);
  for (int i = 0; i < 3; ++i) CHECK(c[static_cast<std::size_t>(i)].center.x() == doctest::Approx(d[static_cast<std::size_t>(i)].center.x()));
  // the cover contains every corner of the rectangle
  const auto rot = vehicle_discs(1.0, 2.0, 0.6, 4.5, 1.8);
  for (double along : {0.0, 4.5}) {
    for (double side : {-0.9, 0.9}) {
      const Eigen::Vector2d corner(1.0 + along * std::cos(0.6) - side * std::sin(0.6),
                                   2.0 + along * std::sin(0.6) + side * std::cos(0.6));
      double best = 1e9;
      for (const auto& disc : rot) best = std::min(best, (disc.center - corner).norm() - disc.radius);
      CHECK(best <= 1e-12);
    }
  }
  CHECK(penetration(d, d) > 0.0);
  CHECK(penetration(d, vehicle_discs(0.0, 10.0, 0.0, 4.5, 1.8)) < 0.0);
}

TEST_CASE("lane projection") {
  const Lane lane({{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}}, 4.0);
  CHECK(lane.length() == doctest::Approx(20.0));
  auto p = lane.project({5.0, 1.5});
  CHECK(p.s == doctest::Approx(5.0));
  CHECK(p.offset == doctest::Approx(1.5));  // left of the direction of travel
  p = lane.project({11.0, 5.0});
  CHECK(p.s == doctest::Approx(15.0));
  CHECK(p.offset == doctest::Approx(-1.0));
  // beyond both ends the end segments extend as lines
  p = lane.project({-3.0, -1.0});
  CHECK(p.s == doctest::Approx(-3.0));
  CHECK(p.offset == doctest::Approx(-1.0));
  p = lane.project({9.0, 14.0});
  CHECK(p.s == doctest::Approx(24.0));
  CHECK(p.offset == doctest::Approx(1.0));

  CHECK_THROWS_AS(Lane({{0.0, 0.0}}, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(Lane({{0.0, 0.0}, {0.0, 0.0}}, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(Lane({{0.0, 0.0}, {1.0, 0.0}}, 0.0), std::invalid_argument);
}

TEST_CASE("in-lane predicate") {
  const auto lane = straight_lane(4.0);
  const Footprint fp;
  const auto mu = in_lane("in_lane", lane, fp);
  const double r = std::hypot(1.125, 0.9);
  SUBCASE("centered vehicle has a positive margin") {
    const auto t = poses({{10, 0, 0, 0, 10}});
    CHECK(mu->evaluate(t, 0) == doctest::Approx(2.0 - r));
  }
  SUBCASE("margin at the boundary is zero") {
    const auto t = poses({{10, 2.0 - r, 0, 0, 10}, {10, -(2.0 - r), 0, 0, 10}});
    CHECK(mu->evaluate(t, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mu->evaluate(t, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("left and right excursions are both negative") {
    const auto t = poses({{10, 3.0, 0, 0, 10}, {10, -3.0, 0, 0, 10}});
    CHECK(mu->evaluate(t, 0) == doctest::Approx(2.0 - 3.0 - r));
    CHECK(mu->evaluate(t, 1) == doctest::Approx(2.0 - 3.0 - r));
  }
  SUBCASE("agrees with the two bound predicates") {
    const auto left = left_bound("l", lane, fp), right = right_bound("r", lane, fp);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> y(-4, 4), th(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
      const auto t = poses({{20, y(rng), th(rng), 0, 10}});
      CHECK(mu->evaluate(t, 0) == doctest::Approx(std::min(left->evaluate(t, 0), right->evaluate(t, 0))));
    }
  }
}

TEST_CASE("predicate library margins") {
  const auto t = poses({{0, 0, 0, 0.1, 10}, {2, 0, 0, 0.1, 15}});
  CHECK(speed_limit("s", 13.9)->evaluate(t, 0) == doctest::Approx(3.9));
  CHECK(speed_limit("s", 13.9)->evaluate(t, 1) == doctest::Approx(-1.1));
  CHECK(preserves_flow("f", 12.0)->evaluate(t, 1) == doctest::Approx(3.0));
  CHECK(lateral_acceleration("a", 5.0, 3.0)->evaluate(t, 0) == doctest::Approx(5.0 - 100.0 * std::tan(0.1) / 3.0));
  CHECK(state_limits("x", 0.0, 12.0, 0.5)->evaluate(t, 1) == doctest::Approx(-3.0));
  CHECK(upper_threshold("u", 4, 12.0)->evaluate(t, 0) == doctest::Approx(2.0));
  CHECK(lower_threshold("l", 4, 12.0)->evaluate(t, 0) == doctest::Approx(-2.0));

  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(7, 2);
  y(st::kAccel, 0) = -3.0;
  CHECK(longitudinal_acceleration("lon", 2.0)->evaluate(stl::Trace(y, 0.2), 0) == doctest::Approx(-1.0));

  const auto lane = straight_lane(4.0);
  const auto moving = poses({{5, 0, 0, 0, 10}, {7, 0, 0, 0, 10}, {30, 0, 0, 0, 10}});
  const auto prog = make_progress("p", lane, 20.0);
  CHECK(prog->evaluate(moving, 0) == doctest::Approx(-20.0));
  CHECK(prog->evaluate(moving, 2) == doctest::Approx(5.0));
  const auto at = at_position("at", lane, 8.0, 1.5);
  CHECK(at->evaluate(moving, 1) == doctest::Approx(0.5));
  CHECK(at->evaluate(moving, 2) == doctest::Approx(-20.5));
}

TEST_CASE("collision predicate follows the constant-velocity prediction") {
  Obstacle ob;
  ob.id = "car";
  ob.x = 20.0;
  ob.velocity = 5.0;
  CHECK(ob.at(2.0).x == doctest::Approx(30.0));
  const Footprint fp;
  // at t = 1 the obstacle spans 22.75..27.25 and the ego 25.75..30.25
  const auto t = poses({{0, 0, 0, 0, 0}, {10, 0, 0, 0, 0}, {25.75, 0, 0, 0, 0}}, 0.5);
  const auto mu = collision("c", ob, fp, 0.0);
  CHECK(mu->evaluate(t, 0) > 0.0);
  CHECK(mu->evaluate(t, 1) > 0.0);
  CHECK(mu->evaluate(t, 2) < 0.0);
  // absolute start time shifts the prediction
  const auto later = collision("c", ob, fp, 10.0);
  CHECK(later->evaluate(t, 2) > 0.0);
}
