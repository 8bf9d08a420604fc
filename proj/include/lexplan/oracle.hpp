#pragma once

// Ground truth for small problems: the exact preemptive lexicographic optimum
// of the scalar-integrator threshold benchmark, and exhaustive grid search.

#include "lexplan/lexscalar.hpp"
#include "lexplan/systems.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace lexplan::oracle {

/// One specification of the threshold benchmark: y_time < r (upper) or
/// y_time >= r (lower). The boundary counts as satisfied with zero margin,
/// so the violation cost is max(0, y - r) or max(0, r - y).
struct ThresholdSpec {
  int time = 1;
  bool upper = true;
  double r = 0.0;
  int m = 1;  // violation intervals
};

/// x_{k+1} = x_k + u_k with |u_k| <= u_bound, y = x, specs in priority order.
struct LinearBenchmark {
  int K = 8;
  double x0 = 0.0;
  double u_bound = 1.35;
  double c_bar = 10.0;
  std::vector<ThresholdSpec> specs;

  /// Spec k targets time k, odd times upper, even times lower.
  /// Throws std::invalid_argument unless r.size() == m.size() == K.
  static LinearBenchmark alternating(std::vector<double> r, std::vector<int> m, int K = 8);

  /// Throws std::invalid_argument on malformed data.
  void validate() const;

  double cost(std::size_t spec, double y) const;
  lex::DiscretizationScheme scheme(std::size_t spec) const;
  int level(std::size_t spec, double y) const;
  /// Costs of every spec for states x_0..x_K.
  std::vector<double> costs(const std::vector<double>& states) const;
  std::vector<int> levels(const std::vector<double>& states) const;

  /// The same problem as prioritized STL specifications F[t,t](mu) under
  /// the given measure, for the sampling solver.
  lex::SpecSet spec_set(const rob::MeasureConfig& measure) const;
  sys::Integrator system() const { return sys::Integrator(u_bound, 1.0); }
};

/// Thresholds drawn uniformly from [-3, 3].
std::vector<double> random_thresholds(std::mt19937_64& rng, int K = 8);

/// Closed interval, possibly unbounded, possibly empty.
struct Bound {
  double lo = 0.0;
  double hi = -1.0;
  bool empty() const { return !(lo <= hi); }
};

enum class CostMode { kContinuous, kDiscretized };

struct LexOptimum {
  CostMode mode = CostMode::kContinuous;
  /// Per spec: the minimum and the supremum of the continuous cost over the
  /// optimal set. They agree in continuous mode.
  std::vector<double> min_cost;
  std::vector<double> max_cost;
  /// Per spec: the optimal discrete level (the level of min_cost).
  std::vector<int> levels;
  /// Projection of the optimal set onto x_k, k = 0..K.
  std::vector<Bound> projections;
  /// A member of the optimal set: states x_0..x_K and inputs u_0..u_K
  /// (u_K = 0).
  std::vector<double> witness_states;
  std::vector<double> witness_inputs;
};

/// Preemptive scheme by interval reachability. Valid because the system is
/// scalar and monotone and every spec constrains a single time index.
LexOptimum exact_lex_optimum(const LinearBenchmark& bm, CostMode mode);

/// (1/N) sum_i max(0, max over the discretized optimal set of c_i - min over
/// the continuous optimal set of c_i).
double violation_error(const LexOptimum& continuous, const LexOptimum& discretized);
double violation_error(const LinearBenchmark& bm);

struct GridOptimum {
  stl::Trace trace;
  Eigen::MatrixXd inputs;
  lex::ScalarCost cost;
  long rollouts = 0;
};

/// Exhaustive minimum of the cost over all input plans u_0..u_{K-1} drawn
/// from grid (u_K repeats u_{K-1}). Ties keep the first plan in enumeration
/// order. Throws std::length_error when |grid|^K exceeds max_rollouts.
GridOptimum brute_force_optimum(const sys::System& system,
                                const std::function<lex::ScalarCost(const stl::Trace&)>& cost,
                                const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& grid,
                                int K, long max_rollouts = 10'000'000);

/// Evenly spaced points from lo to hi (inclusive) for a scalar input.
std::vector<Eigen::VectorXd> scalar_grid(double lo, double hi, int points);

}  // namespace lexplan::oracle
