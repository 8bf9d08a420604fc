#pragma once

// Deterministic MPPI over an exact integer scalar cost: sampling with
// clipping, rollout, softmin weighting, input update, decay schedules and
// best-sample tracking.

#include "lexplan/lexscalar.hpp"
#include "lexplan/systems.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lexplan::solver {

enum class BetaRule { kCosine, kExponential };
enum class SampleRule { kConstant, kCosine };
enum class ReturnRule { kBestSample, kFinalMppi };

std::string to_string(BetaRule r);
std::string to_string(SampleRule r);
std::string to_string(ReturnRule r);

struct SolverConfig {
  int J = 20;
  Eigen::MatrixXd sigma;  // n_u x n_u, positive definite
  double lambda = 1.0;
  BetaRule beta_rule = BetaRule::kCosine;
  double beta_min = 1e-6;
  double gamma = 0.6;
  SampleRule sample_rule = SampleRule::kCosine;
  int M_init = 400;
  int M_final = 250;
  ReturnRule return_rule = ReturnRule::kBestSample;
  /// Empty means: use the system's bounds.
  Eigen::VectorXd u_lo;
  Eigen::VectorXd u_hi;
  std::uint64_t seed = 0;
  int threads = 1;
  /// When false every perturbation is zero (used to check the rollout path).
  bool sample_noise = true;

  /// Throws std::invalid_argument on any violated invariant, including a
  /// covariance without a Cholesky factorization.
  void validate(int n_u) const;
};

/// 1 - (1 - beta_min) * (1 - cos(pi (j-1)/(J-1))) / 2; equals 1 when J = 1.
double beta_cosine(int j, int J, double beta_min);
/// sqrt(gamma^(j-1)).
double beta_exponential(int j, double gamma);
/// ceil(M_init - (M_init - M_final) * (1 - cos(pi (j-1)/(J-1))) / 2).
int sample_count_cosine(int j, int J, int M_init, int M_final);

double beta_at(const SolverConfig& c, int j);
int samples_at(const SolverConfig& c, int j);

/// Quadratic input weight seen by the correction term: beta^2 lambda (beta Sigma)^-1.
Eigen::MatrixXd effective_input_weight(double beta, double lambda, const Eigen::MatrixXd& sigma);

/// omega_m = exp(-(l_m - l_min) / temperature) / sum. Entries equal to +inf
/// get zero weight. Throws std::invalid_argument if no entry is finite.
std::vector<double> softmin_weights(const std::vector<double>& ell, double temperature);

using CostFunction = std::function<lex::ScalarCost(const stl::Trace&)>;

struct IterationRecord {
  int j = 0;
  double beta = 0.0;
  int M = 0;
  std::optional<lex::ScalarCost> min_cost;  // empty if no sample was valid
  double weight_entropy = 0.0;
  int invalid_samples = 0;
  double wall_ms = 0.0;
};

/// Everything one iteration saw; only built when an observer is installed.
struct IterationDetail {
  int j = 0;
  double beta = 0.0;
  double lambda_j = 0.0;
  Eigen::MatrixXd sigma_j;
  Eigen::MatrixXd sigma_j_inv;
  Eigen::MatrixXd u_nominal;                  // before the update
  std::vector<Eigen::MatrixXd> sample_inputs;  // clipped
  std::vector<bool> valid;
  std::vector<double> ell;
  std::vector<double> weights;
  Eigen::MatrixXd u_updated;
};
using Observer = std::function<void(const IterationDetail&)>;

struct SolveResult {
  ReturnRule return_rule = ReturnRule::kBestSample;
  stl::Trace best_trace;
  lex::ScalarCost best_cost;
  Eigen::MatrixXd best_inputs;
  stl::Trace mppi_trace;
  lex::ScalarCost mppi_cost;
  Eigen::MatrixXd mppi_inputs;
  bool mppi_valid = false;
  std::vector<IterationRecord> per_iteration;
  long samples_evaluated = 0;

  /// The trajectory selected by the return rule.
  const stl::Trace& trace() const;
  const lex::ScalarCost& cost() const;
  const Eigen::MatrixXd& inputs() const;
};

/// Runs the solver. u_init holds u_0..u_K as columns and must lie within the
/// bounds. A sample whose rollout throws std::domain_error (non-finite state,
/// steering singularity) gets zero weight and is never tracked; such samples
/// are counted in IterationRecord::invalid_samples. Throws std::runtime_error
/// if no sample at all is valid. The result depends only on the inputs and
/// config.seed, not on config.threads.
SolveResult solve(const sys::System& system, const CostFunction& cost, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& u_init, const SolverConfig& config,
                  const Observer& observer = {});

SolveResult solve(const sys::System& system, const lex::SpecSet& specs, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& u_init, const SolverConfig& config,
                  const Observer& observer = {});

}  // namespace lexplan::solver
