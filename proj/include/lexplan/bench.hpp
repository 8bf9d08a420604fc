#pragma once

// Experiment harnesses: interval-count compositions, the discretization
// study, the solver ablation, measure timing and call counts, and the
// robustness comparison on a fan of trajectories.

#include "lexplan/oracle.hpp"
#include "lexplan/scenario.hpp"
#include "lexplan/solver.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lexplan::bench {

using Composition = std::vector<int>;

/// Uniform compositions of m_total into n positive parts (stars and bars:
/// a uniform (n-1)-subset of the m_total-1 gaps). Throws
/// std::invalid_argument if n < 1 or m_total < n.
std::vector<Composition> sample_compositions(int m_total, int n, int count, std::uint64_t seed);

/// Equal parts; the remainder goes to the highest priorities.
Composition even_composition(int m_total, int n);
/// One interval each, the rest apportioned (largest remainder) in proportion
/// to 1..n (increase) or n..1 (decrease) along the priority order.
Composition linear_composition(int m_total, int n, bool increasing);

struct DiscretizationParams {
  int scenarios = 200;
  int compositions = 100;
  std::vector<int> m_totals;  // default 8, 16, ..., 160
  int K = 8;
  std::uint64_t seed = 1;

  DiscretizationParams();
};

/// Mean and standard deviation of the violation error over the scenarios.
/// "best" is the composition with the lowest mean among all evaluated ones
/// (sampled plus the three fixed strategies).
struct DiscretizationRow {
  int m_total = 0;
  std::string strategy;  // best, even, increase, decrease
  double mean = 0.0;
  double stddev = 0.0;
  Composition composition;
};

/// Throws std::invalid_argument on an empty sweep or m_total < K.
std::vector<DiscretizationRow> discretization_study(const DiscretizationParams& params);
void write_csv(std::ostream& os, const std::vector<DiscretizationRow>& rows);

struct AblationConfig {
  std::string name;
  solver::SampleRule sample_rule = solver::SampleRule::kConstant;
  solver::BetaRule beta_rule = solver::BetaRule::kExponential;
  solver::ReturnRule return_rule = solver::ReturnRule::kFinalMppi;
};

/// baseline, config1..config6, full: the eight combinations.
std::vector<AblationConfig> ablation_configs();

struct AblationParams {
  int scenarios = 500;
  std::vector<int> m;  // interval counts per spec; default 5 each
  std::uint64_t seed = 1;
  solver::SolverConfig solver;  // shared parameters; rules are overridden per config
  std::vector<AblationConfig> configs;  // must contain "baseline"; default all eight

  AblationParams();
};

/// Percentages vs the baseline, mean optimality gap in percent, mean gap
/// change vs the baseline, share reaching the exact optimum. Scenarios whose
/// exact optimum is 0 while the solver is not are excluded from the gap
/// means and counted in excluded.
struct AblationRow {
  std::string name;
  double p_lower = 0.0;
  double p_equal = 0.0;
  double p_higher = 0.0;
  double mean_gap = 0.0;
  double mean_gap_change = 0.0;
  double p_optimal = 0.0;
  int excluded = 0;
  double mean_samples = 0.0;
};

/// One row per config followed by an "optimum" row.
std::vector<AblationRow> solver_ablation(const AblationParams& params);
void write_csv(std::ostream& os, const std::vector<AblationRow>& rows);

struct MeasureBenchParams {
  std::vector<std::string> measures;  // default: all presets
  int trajectories = 2000;            // per timing repetition
  int repetitions = 5;                // after one discarded warmup
  int solve_repetitions = 1;          // 0 skips the solve timing
  solver::SolverConfig solver;        // used for the solve timing
  std::uint64_t seed = 1;

  MeasureBenchParams();
};

struct MeasureRow {
  std::string measure;
  double t_sol_mean_ms = 0.0;
  double t_sol_std_ms = 0.0;
  double t_rob_mean_ms = 0.0;
  double t_rob_std_ms = 0.0;
  double calls_mean = 0.0;  // predicate values requested per trajectory
  double calls_std = 0.0;
  double cached_calls_mean = 0.0;  // predicate evaluations with caching
};

/// Times the evaluation of the in-lane spec G(mu) on random rollouts of the
/// scenario's system, counts predicate calls, and optionally times one
/// solve per measure. The scenario must define a predicate with id in_lane.
std::vector<MeasureRow> measure_benchmark(const sys::Scenario& scenario, const MeasureBenchParams& params);
void write_csv(std::ostream& os, const std::vector<MeasureRow>& rows);

/// Lane-keeping trajectories of an overtaking maneuver: 21 output traces
/// (single-track layout) at the first or second planning time, and the
/// corresponding lane spec G(and(left_bound, right_bound)).
struct TrajectoryFan {
  std::vector<stl::Trace> traces;
  stl::Formula lane_spec;
};
TrajectoryFan overtaking_fan(int planning_time);

struct ComparisonRow {
  std::string measure;
  int sample = 0;
  rob::ExtReal value;
  double normalized = 0.0;
  bool normalization_skipped = false;  // every value of the measure is zero
};

/// Robustness of the spec on every trace, normalized per measure by the
/// largest finite magnitude.
std::vector<ComparisonRow> robustness_comparison(const TrajectoryFan& fan,
                                                 const std::vector<std::string>& measures);
void write_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);

}  // namespace lexplan::bench
