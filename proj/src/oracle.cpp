#include "lexplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lexplan::oracle {

LinearBenchmark LinearBenchmark::alternating(std::vector<double> r, std::vector<int> m, int K) {
  if (static_cast<int>(r.size()) != K || static_cast<int>(m.size()) != K) {
    throw std::invalid_argument("need one threshold and one interval count per time step");
  }
  LinearBenchmark bm;
  bm.K = K;
  for (int k = 1; k <= K; ++k) {
    bm.specs.push_back({k, k % 2 == 1, r[static_cast<std::size_t>(k - 1)], m[static_cast<std::size_t>(k - 1)]});
  }
  bm.validate();
  return bm;
}

void LinearBenchmark::validate() const {
  if (K < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(u_bound >= 0.0) || !std::isfinite(u_bound) || !std::isfinite(x0)) {
    throw std::invalid_argument("bounds and initial state must be finite");
  }
  if (!(c_bar > 0.0) || !std::isfinite(c_bar)) throw std::invalid_argument("c_bar must be positive");
  if (specs.empty()) throw std::invalid_argument("benchmark needs at least one spec");
  for (const auto& s : specs) {
    if (s.time < 0 || s.time > K) throw std::invalid_argument("spec time outside [0, K]");
    if (!std::isfinite(s.r)) throw std::invalid_argument("threshold must be finite");
    if (s.m < 1) throw std::invalid_argument("interval count must be at least 1");
  }
}

double LinearBenchmark::cost(std::size_t i, double y) const {
  const auto& s = specs[i];
  // same arithmetic as the violation cost of the robustness r - y or y - r
  const double rho = s.upper ? s.r - y : y - s.r;
  return rho >= 0.0 ? 0.0 : -rho;
}

lex::DiscretizationScheme LinearBenchmark::scheme(std::size_t i) const {
  return lex::uniform_thresholds(c_bar, specs[i].m);
}

int LinearBenchmark::level(std::size_t i, double y) const { return scheme(i).discretize(cost(i, y)); }

std::vector<double> LinearBenchmark::costs(const std::vector<double>& states) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < specs.size(); ++i) out.push_back(cost(i, states.at(static_cast<std::size_t>(specs[i].time))));
  return out;
}

std::vector<int> LinearBenchmark::levels(const std::vector<double>& states) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < specs.size(); ++i) out.push_back(level(i, states.at(static_cast<std::size_t>(specs[i].time))));
  return out;
}

lex::SpecSet LinearBenchmark::spec_set(const rob::MeasureConfig& measure) const {
  std::vector<lex::Spec> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string id = "phi" + std::to_string(i + 1);
    auto p = s.upper ? sys::upper_threshold(id, 0, s.r) : sys::lower_threshold(id, 0, s.r);
    out.push_back({id, stl::eventually(stl::pred(p), stl::Interval(s.time, s.time)), measure, scheme(i)});
  }
  return lex::SpecSet(std::move(out));
}

std::vector<double> random_thresholds(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> r(static_cast<std::size_t>(K));
  for (auto& x : r) x = dist(rng);
  return r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Bound dilate(const Bound& b, double d) { return {b.lo - d, b.hi + d}; }
Bound intersect(const Bound& a, const Bound& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

/// Intersection that absorbs rounding: cuts sit exactly on reachable
/// endpoints, and re-propagating them through +-u_bound can cross by an ulp.
Bound meet(const Bound& a, const Bound& b) {
  Bound out = intersect(a, b);
  if (out.empty() && out.lo - out.hi <= 1e-9 * (1.0 + std::abs(out.lo))) out.lo = out.hi = 0.5 * (out.lo + out.hi);
  return out;
}

/// Projections of the constrained trajectory set onto each x_k.
std::vector<Bound> project(const LinearBenchmark& bm, const std::vector<Bound>& constraints) {
  const std::size_t n = static_cast<std::size_t>(bm.K) + 1;
  std::vector<Bound> fwd(n);
  fwd[0] = meet({bm.x0, bm.x0}, constraints[0]);
  for (std::size_t k = 1; k < n; ++k) fwd[k] = meet(dilate(fwd[k - 1], bm.u_bound), constraints[k]);
  std::vector<Bound> out(n);
  out[n - 1] = fwd[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) out[k] = meet(dilate(out[k + 1], bm.u_bound), fwd[k]);
  for (const auto& b : out) {
    if (b.empty()) throw std::logic_error("preemptive constraint set became empty");
  }
  return out;
}

}  // namespace

LexOptimum exact_lex_optimum(const LinearBenchmark& bm, CostMode mode) {
  bm.validate();
  const std::size_t n = static_cast<std::size_t>(bm.K) + 1;
  std::vector<Bound> constraints(n, Bound{-kInf, kInf});

  for (std::size_t i = 0; i < bm.specs.size(); ++i) {
    const auto& s = bm.specs[i];
    const std::size_t t = static_cast<std::size_t>(s.time);
    const Bound P = project(bm, constraints)[t];
    // the cost is monotone in y, so its minimum sits at one endpoint
    const double best_y = s.upper ? P.lo : P.hi;
    const double c = bm.cost(i, best_y);
    // keep the points of P whose cost (continuous) or level (discretized) is
    // no worse than at best_y; for upper specs that is y <= limit
    double limit;
    if (mode == CostMode::kContinuous) {
      limit = c == 0.0 ? s.r : best_y;
    } else {
      const auto scheme = bm.scheme(i);
      const int xi = scheme.discretize(c);
      if (xi == scheme.m()) continue;  // top interval: every point is as good
      const double alpha = xi == 0 ? 0.0 : scheme.thresholds()[static_cast<std::size_t>(xi - 1)];
      limit = s.upper ? std::max(s.r + alpha, best_y) : std::min(s.r - alpha, best_y);
    }
    Bound cut{-kInf, kInf};
    if (s.upper) {
      cut.hi = limit;
    } else {
      cut.lo = limit;
    }
    constraints[t] = intersect(constraints[t], cut);
  }

  LexOptimum out;
  out.mode = mode;
  out.projections = project(bm, constraints);
  for (std::size_t i = 0; i < bm.specs.size(); ++i) {
    const auto& s = bm.specs[i];
    const Bound& P = out.projections[static_cast<std::size_t>(s.time)];
    const double c_lo = bm.cost(i, s.upper ? P.lo : P.hi);
    const double c_hi = bm.cost(i, s.upper ? P.hi : P.lo);
    out.min_cost.push_back(c_lo);
    out.max_cost.push_back(c_hi);
    out.levels.push_back(bm.scheme(i).discretize(c_lo));
  }

  // witness: walk forward through the projections, taking midpoints
  out.witness_states.assign(n, bm.x0);
  out.witness_inputs.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double prev = out.witness_states[k - 1];
    const Bound b = intersect(out.projections[k], {prev - bm.u_bound, prev + bm.u_bound});
    const double target = b.empty() ? out.projections[k].lo : 0.5 * (b.lo + b.hi);
    const double u = std::clamp(target - prev, -bm.u_bound, bm.u_bound);
    out.witness_inputs[k - 1] = u;
    out.witness_states[k] = prev + u;
  }
  return out;
}

double violation_error(const LexOptimum& continuous, const LexOptimum& discretized) {
  if (continuous.min_cost.size() != discretized.max_cost.size() || continuous.min_cost.empty()) {
    throw std::invalid_argument("optima describe different benchmarks");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < continuous.min_cost.size(); ++i) {
    sum += std::max(0.0, discretized.max_cost[i] - continuous.min_cost[i]);
  }
  return sum / static_cast<double>(continuous.min_cost.size());
}

double violation_error(const LinearBenchmark& bm) {
  return violation_error(exact_lex_optimum(bm, CostMode::kContinuous),
                         exact_lex_optimum(bm, CostMode::kDiscretized));
}

GridOptimum brute_force_optimum(const sys::System& system,
                                const std::function<lex::ScalarCost(const stl::Trace&)>& cost,
                                const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& grid, int K,
                                long max_rollouts) {
  if (grid.empty()) throw std::invalid_argument("input grid is empty");
  if (K < 1) throw std::invalid_argument("horizon must be at least 1");
  for (const auto& g : grid) {
    if (g.size() != system.n_u()) throw std::invalid_argument("grid point has wrong dimension");
  }
  const double estimate = std::pow(static_cast<double>(grid.size()), K);
  if (estimate > static_cast<double>(max_rollouts)) {
    throw std::length_error("grid search needs " + std::to_string(estimate) + " rollouts, limit is " +
                            std::to_string(max_rollouts));
  }
  const long total = std::lround(estimate);
  const long base = static_cast<long>(grid.size());

  GridOptimum best;
  bool have = false;
  Eigen::MatrixXd u(system.n_u(), K + 1);
  for (long plan = 0; plan < total; ++plan) {
    long code = plan;
    // most significant digit is u_0
    for (int k = K - 1; k >= 0; --k) {
      u.col(k) = grid[static_cast<std::size_t>(code % base)];
      code /= base;
    }
    u.col(K) = u.col(K - 1);
    ++best.rollouts;
    sys::Rollout r;
    try {
      r = sys::rollout(system, x0, u);
    } catch (const std::domain_error&) {
      continue;
    }
    lex::ScalarCost c = cost(r.trace);
    if (!have || c < best.cost) {
      have = true;
      best.cost = std::move(c);
      best.trace = std::move(r.trace);
      best.inputs = u;
    }
  }
  if (!have) throw std::runtime_error("no grid plan has a valid rollout");
  return best;
}

std::vector<Eigen::VectorXd> scalar_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo <= hi)) throw std::invalid_argument("invalid grid");
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < points; ++i) {
    const double v = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    out.push_back(Eigen::VectorXd::Constant(1, v));
  }
  return out;
}

}  // namespace lexplan::oracle
