#pragma once

// Discrete-time system models, lane and obstacle geometry, and the predicate
// library used by the driving scenarios.

#include "lexplan/stl.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace lexplan::sys {

/// x_{k+1} = f(x_k, u_k), y_k = g(x_k, u_k) with box input bounds.
class System {
 public:
  virtual ~System() = default;

  virtual int n_x() const = 0;
  virtual int n_u() const = 0;
  virtual int n_y() const = 0;
  virtual double dt() const = 0;
  virtual Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const = 0;
  virtual Eigen::VectorXd output(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const = 0;

  const Eigen::VectorXd& u_lo() const { return u_lo_; }
  const Eigen::VectorXd& u_hi() const { return u_hi_; }

 protected:
  /// Throws std::invalid_argument unless the bounds are finite, of equal size
  /// and u_lo <= u_hi.
  void set_bounds(Eigen::VectorXd lo, Eigen::VectorXd hi);

 private:
  Eigen::VectorXd u_lo_;
  Eigen::VectorXd u_hi_;
};

/// Scalar integrator x' = x + u, y = x.
class Integrator final : public System {
 public:
  explicit Integrator(double u_bound = 1.35, double dt = 1.0);
  Integrator(double u_lo, double u_hi, double dt);

  int n_x() const override { return 1; }
  int n_u() const override { return 1; }
  int n_y() const override { return 1; }
  double dt() const override { return dt_; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  Eigen::VectorXd output(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;

 private:
  double dt_;
};

/// Rows of the single-track state, input and output vectors.
namespace st {
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kTheta = 2;
inline constexpr int kDelta = 3;
inline constexpr int kV = 4;
inline constexpr int kSteerRate = 5;  // output rows only
inline constexpr int kAccel = 6;
}  // namespace st

struct SingleTrackParams {
  double wheelbase = 3.0;
  double length = 4.5;  // footprint used for the disc cover
  double width = 1.8;
  double dt = 0.2;
  std::array<double, 2> u_lo{-0.3, -8.0};  // steering rate, acceleration
  std::array<double, 2> u_hi{0.3, 8.0};
};

/// Kinematic single-track model, state [x, y, theta, delta, v] (rear axle),
/// input [steering rate, acceleration], explicit Euler. Output y = [x; u].
class SingleTrack final : public System {
 public:
  explicit SingleTrack(SingleTrackParams params = {});

  int n_x() const override { return 5; }
  int n_u() const override { return 2; }
  int n_y() const override { return 7; }
  double dt() const override { return params_.dt; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  Eigen::VectorXd output(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;

  const SingleTrackParams& params() const { return params_; }

 private:
  SingleTrackParams params_;
};

/// One Euler step. Throws std::domain_error if |delta| >= pi/2.
Eigen::VectorXd single_track_step(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double dt,
                                  double wheelbase);

/// States x_0..x_K and the output trace for inputs u_0..u_K (columns).
/// Throws std::domain_error if a state or output becomes non-finite.
struct Rollout {
  Eigen::MatrixXd states;
  stl::Trace trace;
};
Rollout rollout(const System& system, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs);

struct Disc {
  Eigen::Vector2d center;
  double radius = 0.0;
};

/// Three equal discs covering a length x width rectangle. The rectangle
/// starts at the reference point and extends forward along the heading.
std::array<Disc, 3> vehicle_discs(double x, double y, double theta, double length, double width);

/// Same cover for a rectangle given by its center.
std::array<Disc, 3> centered_discs(double x, double y, double theta, double length, double width);

/// Deepest overlap of two disc covers: positive iff some pair intersects.
double penetration(const std::array<Disc, 3>& a, const std::array<Disc, 3>& b);

/// Piecewise-linear reference path with constant lane width.
class Lane {
 public:
  /// Throws std::invalid_argument on fewer than two points, repeated
  /// consecutive points, or a non-positive width.
  Lane(std::vector<Eigen::Vector2d> path, double width);

  struct Projection {
    double s = 0.0;        // arc length
    double offset = 0.0;   // signed lateral offset, left positive
  };
  /// Projects onto the nearest segment. Beyond the path ends the first and
  /// last segments are extended as straight lines.
  Projection project(const Eigen::Vector2d& p) const;

  double width() const { return width_; }
  double length() const { return cumulative_.back(); }
  const std::vector<Eigen::Vector2d>& path() const { return path_; }

 private:
  std::vector<Eigen::Vector2d> path_;
  std::vector<double> cumulative_;
  double width_;
};

/// Largest left excursion and largest right excursion (right positive) of a
/// disc cover relative to the reference path.
struct LateralDeviation {
  double left = 0.0;
  double right = 0.0;
};
LateralDeviation lateral_deviation(const Lane& lane, const std::array<Disc, 3>& discs);

/// Box obstacle predicted with constant velocity along its heading.
struct Obstacle {
  std::string id;
  double x = 0.0;  // center
  double y = 0.0;
  double theta = 0.0;
  double length = 4.5;
  double width = 1.8;
  double velocity = 0.0;

  Obstacle at(double t) const;
  std::array<Disc, 3> discs() const;
};

/// Ego footprint used by the geometric predicates.
struct Footprint {
  double length = 4.5;
  double width = 1.8;
};

std::array<Disc, 3> ego_discs(const stl::Trace& trace, int k, const Footprint& fp);

// Predicate library over single-track output traces. Every predicate
// returns a signed margin, nonnegative iff satisfied. t0 is the absolute time
// of trace column 0, used for obstacle prediction.

stl::PredicatePtr state_limits(std::string id, double v_min, double v_max, double delta_max);
/// Collision avoidance: minus the largest disc penetration, negative on overlap.
stl::PredicatePtr collision(std::string id, Obstacle obstacle, Footprint fp, double t0);
stl::PredicatePtr speed_limit(std::string id, double v_max);
stl::PredicatePtr preserves_flow(std::string id, double v_min);
stl::PredicatePtr longitudinal_acceleration(std::string id, double a_max);
stl::PredicatePtr lateral_acceleration(std::string id, double a_max, double wheelbase);
stl::PredicatePtr at_position(std::string id, std::shared_ptr<const Lane> lane, double s_target,
                              double tolerance);
/// Arc length gained since column 0 minus the required distance.
stl::PredicatePtr make_progress(std::string id, std::shared_ptr<const Lane> lane, double distance);
stl::PredicatePtr left_bound(std::string id, std::shared_ptr<const Lane> lane, Footprint fp);
stl::PredicatePtr right_bound(std::string id, std::shared_ptr<const Lane> lane, Footprint fp);
stl::PredicatePtr in_lane(std::string id, std::shared_ptr<const Lane> lane, Footprint fp);

/// Threshold predicates on one output row: r - y (upper) and y - r (lower).
stl::PredicatePtr upper_threshold(std::string id, int row, double r);
stl::PredicatePtr lower_threshold(std::string id, int row, double r);

}  // namespace lexplan::sys
