#include "lexplan/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace lexplan::solver {

std::string to_string(BetaRule r) { return r == BetaRule::kCosine ? "cosine" : "exponential"; }
std::string to_string(SampleRule r) { return r == SampleRule::kCosine ? "cosine" : "constant"; }
std::string to_string(ReturnRule r) { return r == ReturnRule::kBestSample ? "best" : "mppi"; }

void SolverConfig::validate(int n_u) const {
  if (J < 1) throw std::invalid_argument("J must be at least 1");
  if (sigma.rows() != n_u || sigma.cols() != n_u) {
    throw std::invalid_argument("covariance must be " + std::to_string(n_u) + " x " + std::to_string(n_u));
  }
  if (!sigma.allFinite() || !sigma.isApprox(sigma.transpose())) {
    throw std::invalid_argument("covariance must be finite and symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("covariance is not positive definite");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (beta_rule == BetaRule::kCosine && !(beta_min > 0.0 && beta_min < 1.0)) {
    throw std::invalid_argument("beta_min must lie in (0, 1)");
  }
  if (beta_rule == BetaRule::kExponential && !(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  if (M_final < 1 || M_init < M_final) throw std::invalid_argument("need M_init >= M_final >= 1");
  if (u_lo.size() != u_hi.size()) throw std::invalid_argument("input bounds differ in size");
  if (u_lo.size() != 0) {
    if (u_lo.size() != n_u) throw std::invalid_argument("input bounds have wrong dimension");
    if (!u_lo.allFinite() || !u_hi.allFinite() || (u_lo.array() > u_hi.array()).any()) {
      throw std::invalid_argument("input bounds must be finite with lo <= hi");
    }
  }
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

namespace {

double cosine_progress(int j, int J) {
  if (J == 1) return 0.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * (j - 1) / (J - 1)));
}

}  // namespace

double beta_cosine(int j, int J, double beta_min) {
  if (j == J && J > 1) return beta_min;
  return 1.0 - (1.0 - beta_min) * cosine_progress(j, J);
}

double beta_exponential(int j, double gamma) { return std::sqrt(std::pow(gamma, j - 1)); }

int sample_count_cosine(int j, int J, int M_init, int M_final) {
  if (j == J && J > 1) return M_final;
  return static_cast<int>(std::ceil(M_init - (M_init - M_final) * cosine_progress(j, J)));
}

double beta_at(const SolverConfig& c, int j) {
  return c.beta_rule == BetaRule::kCosine ? beta_cosine(j, c.J, c.beta_min) : beta_exponential(j, c.gamma);
}

int samples_at(const SolverConfig& c, int j) {
  return c.sample_rule == SampleRule::kCosine ? sample_count_cosine(j, c.J, c.M_init, c.M_final) : c.M_init;
}

Eigen::MatrixXd effective_input_weight(double beta, double lambda, const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd sigma_j = beta * sigma;
  return beta * beta * lambda * sigma_j.llt().solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
}

std::vector<double> softmin_weights(const std::vector<double>& ell, double temperature) {
  double lmin = std::numeric_limits<double>::infinity();
  for (double l : ell) lmin = std::min(lmin, l);
  if (!std::isfinite(lmin)) throw std::invalid_argument("softmin needs at least one finite entry");
  std::vector<double> w(ell.size(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < ell.size(); ++m) {
    if (std::isfinite(ell[m])) {
      w[m] = std::exp(-(ell[m] - lmin) / temperature);
      total += w[m];
    }
  }
  for (double& x : w) x /= total;
  return w;
}

const stl::Trace& SolveResult::trace() const {
  if (return_rule == ReturnRule::kBestSample) return best_trace;
  if (!mppi_valid) throw std::runtime_error("final MPPI input trajectory has no valid rollout");
  return mppi_trace;
}

const lex::ScalarCost& SolveResult::cost() const {
  if (return_rule == ReturnRule::kBestSample) return best_cost;
  if (!mppi_valid) throw std::runtime_error("final MPPI input trajectory has no valid rollout");
  return mppi_cost;
}

const Eigen::MatrixXd& SolveResult::inputs() const {
  return return_rule == ReturnRule::kBestSample ? best_inputs : mppi_inputs;
}

namespace {

struct Sample {
  Eigen::MatrixXd u;    // clipped inputs
  Eigen::MatrixXd eps;  // clipped - nominal
  stl::Trace trace;
  lex::ScalarCost cost;
  double correction = 0.0;
  bool valid = false;
};

double to_double_saturating(const lex::ScalarCost& v) {
  if (v == 0) return 0.0;
  if (boost::multiprecision::msb(v) >= 1000) return std::numeric_limits<double>::infinity();
  return v.convert_to<double>();
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SolveResult solve(const sys::System& system, const CostFunction& cost, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& u_init, const SolverConfig& config, const Observer& observer) {
  const int n_u = system.n_u();
  config.validate(n_u);
  const Eigen::VectorXd lo = config.u_lo.size() ? config.u_lo : system.u_lo();
  const Eigen::VectorXd hi = config.u_hi.size() ? config.u_hi : system.u_hi();
  if (u_init.rows() != n_u || u_init.cols() < 2) {
    throw std::invalid_argument("initial inputs must be n_u x (K+1) with K >= 1");
  }
  for (Eigen::Index k = 0; k < u_init.cols(); ++k) {
    if (!u_init.col(k).allFinite() || (u_init.col(k).array() < lo.array()).any() ||
        (u_init.col(k).array() > hi.array()).any()) {
      throw std::invalid_argument("initial input at k = " + std::to_string(k) + " outside the bounds");
    }
  }
  if (x0.size() != system.n_x() || !x0.allFinite()) throw std::invalid_argument("initial state invalid");

  const Eigen::Index cols = u_init.cols();
  const Eigen::MatrixXd chol = config.sigma.llt().matrixL();
  Eigen::MatrixXd u_hat = u_init;

  SolveResult result;
  result.return_rule = config.return_rule;
  bool have_best = false;

  for (int j = 1; j <= config.J; ++j) {
    const auto t_start = std::chrono::steady_clock::now();
    const double beta = beta_at(config, j);
    const double lambda_j = beta * beta * config.lambda;
    const Eigen::MatrixXd sigma_j = beta * config.sigma;
    const Eigen::MatrixXd sigma_j_inv =
        sigma_j.llt().solve(Eigen::MatrixXd::Identity(n_u, n_u));
    const Eigen::MatrixXd scaled_chol = std::sqrt(beta) * chol;
    const int M = samples_at(config, j);

    std::vector<Sample> samples(static_cast<std::size_t>(M));
    parallel_for(M, config.threads, [&](int m) {
      Sample& s = samples[static_cast<std::size_t>(m)];
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(m)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal;
      s.u.resize(n_u, cols);
      s.eps.resize(n_u, cols);
      Eigen::VectorXd z(n_u);
      for (Eigen::Index k = 0; k < cols; ++k) {
        for (int i = 0; i < n_u; ++i) z[i] = normal(rng);
        const Eigen::VectorXd eps = config.sample_noise ? Eigen::VectorXd(scaled_chol * z)
                                                        : Eigen::VectorXd::Zero(n_u);
        s.u.col(k) = (u_hat.col(k) + eps).cwiseMax(lo).cwiseMin(hi);
        s.eps.col(k) = s.u.col(k) - u_hat.col(k);
      }
      try {
        s.trace = sys::rollout(system, x0, s.u).trace;
        s.cost = cost(s.trace);
        s.valid = true;
      } catch (const std::domain_error&) {
        s.valid = false;
        return;
      }
      double corr = 0.0;
      for (Eigen::Index k = 0; k < cols; ++k) {
        corr += lambda_j * s.eps.col(k).dot(sigma_j_inv * u_hat.col(k));
      }
      s.correction = corr;
    });
    result.samples_evaluated += M;

    IterationRecord rec;
    rec.j = j;
    rec.beta = beta;
    rec.M = M;
    const lex::ScalarCost* floor = nullptr;
    for (auto& s : samples) {
      if (!s.valid) {
        ++rec.invalid_samples;
        continue;
      }
      if (!floor || s.cost < *floor) floor = &s.cost;
      if (!have_best || s.cost < result.best_cost) {
        have_best = true;
        result.best_cost = s.cost;
        result.best_trace = s.trace;
        result.best_inputs = s.u;
      }
    }

    IterationDetail detail;
    if (floor) {
      rec.min_cost = *floor;
      std::vector<double> ell(samples.size(), std::numeric_limits<double>::infinity());
      for (std::size_t m = 0; m < samples.size(); ++m) {
        if (samples[m].valid) ell[m] = samples[m].correction + to_double_saturating(samples[m].cost - *floor);
      }
      const std::vector<double> w = softmin_weights(ell, lambda_j);
      const Eigen::MatrixXd u_before = u_hat;
      for (std::size_t m = 0; m < samples.size(); ++m) {
        if (w[m] > 0.0) {
          u_hat += w[m] * samples[m].eps;
          rec.weight_entropy -= w[m] * std::log(w[m]);
        }
      }
      // keep the nominal inside the box despite rounding in the weighted sum
      for (Eigen::Index k = 0; k < cols; ++k) u_hat.col(k) = u_hat.col(k).cwiseMax(lo).cwiseMin(hi);
      if (observer) {
        detail.u_nominal = u_before;
        detail.ell = std::move(ell);
        detail.weights = w;
      }
    } else if (observer) {
      detail.u_nominal = u_hat;
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    result.per_iteration.push_back(rec);

    if (observer) {
      detail.j = j;
      detail.beta = beta;
      detail.lambda_j = lambda_j;
      detail.sigma_j = sigma_j;
      detail.sigma_j_inv = sigma_j_inv;
      for (const auto& s : samples) {
        detail.sample_inputs.push_back(s.u);
        detail.valid.push_back(s.valid);
      }
      detail.u_updated = u_hat;
      observer(detail);
    }
  }

  if (!have_best) throw std::runtime_error("solver produced no valid sample");

  result.mppi_inputs = u_hat;
  try {
    result.mppi_trace = sys::rollout(system, x0, u_hat).trace;
    result.mppi_cost = cost(result.mppi_trace);
    result.mppi_valid = true;
  } catch (const std::domain_error&) {
    result.mppi_valid = false;
  }
  if (config.return_rule == ReturnRule::kFinalMppi && !result.mppi_valid) {
    throw std::runtime_error("final MPPI input trajectory has no valid rollout");
  }
  return result;
}

SolveResult solve(const sys::System& system, const lex::SpecSet& specs, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& u_init, const SolverConfig& config, const Observer& observer) {
  return solve(
      system, [&specs](const stl::Trace& t) { return specs.scalar_cost(t); }, x0, u_init, config, observer);
}

}  // namespace lexplan::solver
