#pragma once

// Scenario files (versioned JSON) and the receding-horizon loop.

#include "lexplan/lexscalar.hpp"
#include "lexplan/solver.hpp"
#include "lexplan/systems.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexplan::sys {

inline constexpr int kScenarioSchemaVersion = 1;

/// Load or validation failure. line() is 1-based, 0 when unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct PredicateEntry {
  std::string id;
  std::string kind;
  std::map<std::string, double> params;
  std::string obstacle;  // for collision
};

struct SpecEntry {
  std::string name;
  std::string formula;
  std::string measure;
  double c_bar = 10.0;
  int m = 1;
  std::vector<double> thresholds;  // explicit scheme; overrides c_bar and m
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string system;  // "single_track" or "integrator"
  SingleTrackParams single_track;
  double integrator_bound = 1.35;
  Footprint footprint;
  Eigen::VectorXd initial_state;
  int K = 15;
  double dt = 0.2;
  std::shared_ptr<const Lane> lane;
  std::vector<Obstacle> obstacles;
  std::vector<PredicateEntry> predicates;
  std::vector<SpecEntry> specs;
  rob::Nus nu;
  solver::SolverConfig solver;
  int mpc_iterations = 1;

  std::unique_ptr<System> make_system() const;
  /// Predicates with obstacle predictions starting at absolute time t0.
  stl::PredicateRegistry registry(double t0) const;
  /// Specs compiled for a plan starting at t0. A measure override replaces
  /// the measure of every spec. Throws ScenarioError on bad formulas.
  lex::SpecSet spec_set(double t0, const std::optional<std::string>& measure = std::nullopt) const;
  Eigen::MatrixXd initial_inputs() const;
};

/// Throws ScenarioError with a line number for syntax errors and the
/// offending key (and its line, when it can be located) otherwise.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

struct PlanRecord {
  int iteration = 0;
  lex::CostBreakdown breakdown;  // of the plan that was followed
  solver::SolveResult result;
};

struct MpcResult {
  Eigen::MatrixXd states;  // n_x x (H+1)
  Eigen::MatrixXd inputs;  // n_u x H, the applied inputs
  stl::Trace executed;     // outputs; the last column repeats the last input
  std::vector<PlanRecord> plans;
};

/// Plans, applies the first input, re-plans H times. Iteration h solves from
/// the current state with seed config.seed + h and warm-starts from the
/// previous plan shifted by one step with its last input held. A solver
/// failure is rethrown as std::runtime_error naming the iteration.
MpcResult mpc_loop(const Scenario& scenario, const solver::SolverConfig& config, int H,
                   const std::optional<std::string>& measure = std::nullopt);

/// Previous plan shifted one step to the left, last column held.
Eigen::MatrixXd shift_inputs(const Eigen::MatrixXd& plan);

/// Spec costs of the executed trajectory itself (plan start t0 = 0).
lex::CostBreakdown evaluate_executed(const Scenario& scenario, const MpcResult& run,
                                     const std::optional<std::string>& measure = std::nullopt);

/// CSV with k, t, states, inputs, per-spec robustness of the followed plan
/// and its scalar cost. The final row (k = H) leaves plan columns empty.
std::string executed_csv(const Scenario& scenario, const MpcResult& run);

}  // namespace lexplan::sys
