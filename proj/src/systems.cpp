#include "lexplan/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lexplan::sys {

void System::set_bounds(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("input bounds differ in size");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
      throw std::invalid_argument("input bounds must be finite with lo <= hi");
    }
  }
  u_lo_ = std::move(lo);
  u_hi_ = std::move(hi);
}

Integrator::Integrator(double u_bound, double dt) : Integrator(-u_bound, u_bound, dt) {}

Integrator::Integrator(double u_lo, double u_hi, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  set_bounds(Eigen::VectorXd::Constant(1, u_lo), Eigen::VectorXd::Constant(1, u_hi));
}

Eigen::VectorXd Integrator::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  return x + u;
}

Eigen::VectorXd Integrator::output(const Eigen::VectorXd& x, const Eigen::VectorXd&) const { return x; }

SingleTrack::SingleTrack(SingleTrackParams params) : params_(params) {
  if (!(params_.wheelbase > 0.0) || !(params_.dt > 0.0) || !(params_.length > 0.0) ||
      !(params_.width > 0.0)) {
    throw std::invalid_argument("single-track parameters must be positive");
  }
  Eigen::VectorXd lo(2), hi(2);
  lo << params_.u_lo[0], params_.u_lo[1];
  hi << params_.u_hi[0], params_.u_hi[1];
  set_bounds(lo, hi);
}

Eigen::VectorXd single_track_step(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double dt,
                                  double wheelbase) {
  if (x.size() != 5 || u.size() != 2) throw std::invalid_argument("single-track expects 5 states, 2 inputs");
  const double delta = x[st::kDelta];
  if (!(std::abs(delta) < std::numbers::pi / 2)) {
    throw std::domain_error("steering angle at or beyond +-pi/2");
  }
  const double v = x[st::kV];
  const double theta = x[st::kTheta];
  Eigen::VectorXd next = x;
  next[st::kX] += dt * v * std::cos(theta);
  next[st::kY] += dt * v * std::sin(theta);
  next[st::kTheta] += dt * v / wheelbase * std::tan(delta);
  next[st::kDelta] += dt * u[0];
  next[st::kV] += dt * u[1];
  return next;
}

Eigen::VectorXd SingleTrack::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  return single_track_step(x, u, params_.dt, params_.wheelbase);
}

Eigen::VectorXd SingleTrack::output(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  Eigen::VectorXd y(7);
  y << x, u;
  return y;
}

Rollout rollout(const System& system, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs) {
  if (x0.size() != system.n_x()) throw std::invalid_argument("initial state has wrong dimension");
  if (inputs.rows() != system.n_u() || inputs.cols() < 2) {
    throw std::invalid_argument("inputs must be n_u x (K+1) with K >= 1");
  }
  const Eigen::Index K = inputs.cols() - 1;
  Eigen::MatrixXd states(system.n_x(), K + 1);
  Eigen::MatrixXd out(system.n_y(), K + 1);
  states.col(0) = x0;
  for (Eigen::Index k = 0; k <= K; ++k) {
    const Eigen::VectorXd x = states.col(k);
    const Eigen::VectorXd u = inputs.col(k);
    out.col(k) = system.output(x, u);
    if (!out.col(k).allFinite()) throw std::domain_error("non-finite output at k = " + std::to_string(k));
    if (k < K) {
      states.col(k + 1) = system.step(x, u);
      if (!states.col(k + 1).allFinite()) {
        throw std::domain_error("non-finite state at k = " + std::to_string(k + 1));
      }
    }
  }
  return {std::move(states), stl::Trace(std::move(out), system.dt())};
}

namespace {

// centers are a quarter length apart, so the end discs reach the corners
double disc_radius(double length, double width) { return std::hypot(length / 4.0, width / 2.0); }

}  // namespace

std::array<Disc, 3> vehicle_discs(double x, double y, double theta, double length, double width) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double r = disc_radius(length, width);
  std::array<Disc, 3> out;
  const double fractions[3] = {0.25, 0.5, 0.75};
  for (int i = 0; i < 3; ++i) {
    const double d = fractions[i] * length;
    out[i] = {Eigen::Vector2d(x + d * c, y + d * s), r};
  }
  return out;
}

std::array<Disc, 3> centered_discs(double x, double y, double theta, double length, double width) {
  return vehicle_discs(x - 0.5 * length * std::cos(theta), y - 0.5 * length * std::sin(theta), theta, length,
                       width);
}

double penetration(const std::array<Disc, 3>& a, const std::array<Disc, 3>& b) {
  double deepest = -std::numeric_limits<double>::infinity();
  for (const auto& da : a) {
    for (const auto& db : b) {
      deepest = std::max(deepest, da.radius + db.radius - (da.center - db.center).norm());
    }
  }
  return deepest;
}

Lane::Lane(std::vector<Eigen::Vector2d> path, double width) : path_(std::move(path)), width_(width) {
  if (path_.size() < 2) throw std::invalid_argument("lane path needs at least two points");
  if (!(width_ > 0.0) || !std::isfinite(width_)) throw std::invalid_argument("lane width must be positive");
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < path_.size(); ++i) {
    if (!path_[i].allFinite()) throw std::invalid_argument("lane path has non-finite points");
    const double len = (path_[i] - path_[i - 1]).norm();
    if (!(len > 0.0)) throw std::invalid_argument("lane path has repeated points");
    cumulative_.push_back(cumulative_.back() + len);
  }
}

Lane::Projection Lane::project(const Eigen::Vector2d& p) const {
  const std::size_t n = path_.size() - 1;
  double best = std::numeric_limits<double>::infinity();
  Projection out;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = path_[i];
    const Eigen::Vector2d d = path_[i + 1] - a;
    const double len = cumulative_[i + 1] - cumulative_[i];
    const Eigen::Vector2d dir = d / len;
    double t = dir.dot(p - a);
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    const double hi = i + 1 == n ? std::numeric_limits<double>::infinity() : len;
    t = std::clamp(t, lo, hi);
    const double dist = (a + t * dir - p).norm();
    if (dist < best) {
      best = dist;
      out.s = cumulative_[i] + t;
      out.offset = dir.x() * (p - a).y() - dir.y() * (p - a).x();
    }
  }
  return out;
}

LateralDeviation lateral_deviation(const Lane& lane, const std::array<Disc, 3>& discs) {
  LateralDeviation dev{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& d : discs) {
    const double off = lane.project(d.center).offset;
    dev.left = std::max(dev.left, off + d.radius);
    dev.right = std::max(dev.right, -off + d.radius);
  }
  return dev;
}

Obstacle Obstacle::at(double t) const {
  Obstacle o = *this;
  o.x += velocity * t * std::cos(theta);
  o.y += velocity * t * std::sin(theta);
  return o;
}

std::array<Disc, 3> Obstacle::discs() const { return centered_discs(x, y, theta, length, width); }

std::array<Disc, 3> ego_discs(const stl::Trace& trace, int k, const Footprint& fp) {
  return vehicle_discs(trace(st::kX, k), trace(st::kY, k), trace(st::kTheta, k), fp.length, fp.width);
}

namespace {

stl::PredicatePtr make(std::string id, std::function<double(const stl::Trace&, int)> fn) {
  return stl::make_predicate(std::move(id), std::move(fn));
}

}  // namespace

stl::PredicatePtr state_limits(std::string id, double v_min, double v_max, double delta_max) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    const double v = t(st::kV, k);
    return std::min({v - v_min, v_max - v, delta_max - std::abs(t(st::kDelta, k))});
  });
}

stl::PredicatePtr collision(std::string id, Obstacle obstacle, Footprint fp, double t0) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    return -penetration(ego_discs(t, k, fp), obstacle.at(t0 + k * t.dt()).discs());
  });
}

stl::PredicatePtr speed_limit(std::string id, double v_max) {
  return make(std::move(id), [=](const stl::Trace& t, int k) { return v_max - t(st::kV, k); });
}

stl::PredicatePtr preserves_flow(std::string id, double v_min) {
  return make(std::move(id), [=](const stl::Trace& t, int k) { return t(st::kV, k) - v_min; });
}

stl::PredicatePtr longitudinal_acceleration(std::string id, double a_max) {
  return make(std::move(id), [=](const stl::Trace& t, int k) { return a_max - std::abs(t(st::kAccel, k)); });
}

stl::PredicatePtr lateral_acceleration(std::string id, double a_max, double wheelbase) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    const double v = t(st::kV, k);
    return a_max - std::abs(v * v * std::tan(t(st::kDelta, k)) / wheelbase);
  });
}

stl::PredicatePtr at_position(std::string id, std::shared_ptr<const Lane> lane, double s_target,
                              double tolerance) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    const double s = lane->project({t(st::kX, k), t(st::kY, k)}).s;
    return tolerance - std::abs(s - s_target);
  });
}

stl::PredicatePtr make_progress(std::string id, std::shared_ptr<const Lane> lane, double distance) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    const double s0 = lane->project({t(st::kX, 0), t(st::kY, 0)}).s;
    const double s = lane->project({t(st::kX, k), t(st::kY, k)}).s;
    return s - s0 - distance;
  });
}

stl::PredicatePtr left_bound(std::string id, std::shared_ptr<const Lane> lane, Footprint fp) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    return lane->width() / 2 - lateral_deviation(*lane, ego_discs(t, k, fp)).left;
  });
}

stl::PredicatePtr right_bound(std::string id, std::shared_ptr<const Lane> lane, Footprint fp) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    return lane->width() / 2 - lateral_deviation(*lane, ego_discs(t, k, fp)).right;
  });
}

stl::PredicatePtr in_lane(std::string id, std::shared_ptr<const Lane> lane, Footprint fp) {
  return make(std::move(id), [=](const stl::Trace& t, int k) {
    const auto dev = lateral_deviation(*lane, ego_discs(t, k, fp));
    return std::min(lane->width() / 2 - dev.left, lane->width() / 2 - dev.right);
  });
}

stl::PredicatePtr upper_threshold(std::string id, int row, double r) {
  return make(std::move(id), [=](const stl::Trace& t, int k) { return r - t(row, k); });
}

stl::PredicatePtr lower_threshold(std::string id, int row, double r) {
  return make(std::move(id), [=](const stl::Trace& t, int k) { return t(row, k) - r; });
}

}  // namespace lexplan::sys
