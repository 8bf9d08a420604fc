#include "doctest.h"

#include "lexplan/oracle.hpp"
#include "lexplan/solver.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <random>

using namespace lexplan;
using namespace lexplan::solver;

namespace {

SolverConfig small_config(int n_u = 1) {
  SolverConfig c;
  c.J = 8;
  c.sigma = Eigen::MatrixXd::Identity(n_u, n_u) * 0.5;
  c.M_init = 60;
  c.M_final = 30;
  c.seed = 11;
  return c;
}

oracle::LinearBenchmark bench_k3(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return oracle::LinearBenchmark::alternating(oracle::random_thresholds(rng, 3), {5, 5, 5}, 3);
}

}  // namespace

TEST_CASE("decay schedules") {
  CHECK(beta_cosine(1, 20, 1e-6) == 1.0);
  CHECK(beta_cosine(20, 20, 1e-6) == 1e-6);
  CHECK(beta_cosine(1, 1, 1e-6) == 1.0);
  CHECK(beta_cosine(3, 5, 0.0) == doctest::Approx(0.5));
  CHECK(beta_exponential(1, 0.6) == 1.0);
  CHECK(beta_exponential(3, 0.6) == doctest::Approx(0.6));
  CHECK(beta_exponential(2, 0.64) == doctest::Approx(0.8));

  CHECK(sample_count_cosine(1, 20, 400, 250) == 400);
  CHECK(sample_count_cosine(20, 20, 400, 250) == 250);
  CHECK(sample_count_cosine(1, 1, 400, 250) == 400);
  CHECK(sample_count_cosine(3, 5, 400, 250) == 325);
  int prev = 401;
  double prev_beta = 2.0;
  for (int j = 1; j <= 20; ++j) {
    const int M = sample_count_cosine(j, 20, 400, 250);
    const double b = beta_cosine(j, 20, 1e-6);
    CHECK(M <= prev);
    CHECK(M >= 250);
    CHECK(b < prev_beta);
    prev = M;
    prev_beta = b;
  }

  SolverConfig c = small_config();
  c.sample_rule = SampleRule::kConstant;
  c.beta_rule = BetaRule::kExponential;
  CHECK(samples_at(c, 5) == c.M_init);
  CHECK(beta_at(c, 2) == doctest::Approx(std::sqrt(0.6)));
}

TEST_CASE("effective input weight is beta lambda Sigma^-1") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd w = effective_input_weight(0.3, 1.5, sigma);
  const Eigen::MatrixXd expected = 0.3 * 1.5 * sigma.inverse();
  CHECK((w - expected).norm() < 1e-12);
}

TEST_CASE("softmin weights") {
  const auto w = softmin_weights({1.0, 2.0, std::numeric_limits<double>::infinity(), 1.0}, 1.0);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
  CHECK(w[2] == 0.0);
  CHECK(w[0] == doctest::Approx(w[3]));
  CHECK(w[0] / w[1] == doctest::Approx(std::exp(1.0)));
  // shift invariance and huge spreads without overflow
  const auto a = softmin_weights({1e300, 1e300 + 1e285}, 1e-3);
  CHECK(a[0] == 1.0);
  const auto b = softmin_weights({5.0, 6.0}, 2.0), c = softmin_weights({105.0, 106.0}, 2.0);
  CHECK(b[0] == doctest::Approx(c[0]));
  CHECK_THROWS_AS(softmin_weights({std::numeric_limits<double>::infinity()}, 1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  SolverConfig c = small_config(2);
  CHECK_NOTHROW(c.validate(2));
  CHECK_THROWS_AS(c.validate(1), std::invalid_argument);
  auto bad = c;
  bad.J = 0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = c;
  bad.sigma(0, 0) = -1.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = c;
  bad.M_final = bad.M_init + 1;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = c;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = c;
  bad.beta_min = 1.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = c;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);

  const sys::Integrator sys;
  const auto specs = bench_k3(1).spec_set(rob::measure_preset("space"));
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(solve(sys, specs, x0, Eigen::MatrixXd::Constant(1, 4, 2.0), small_config()), std::invalid_argument);
  CHECK_THROWS_AS(solve(sys, specs, x0, Eigen::MatrixXd::Zero(2, 4), small_config()), std::invalid_argument);
}

TEST_CASE("one iteration recomputed from the observer") {
  const auto bm = bench_k3(3);
  const auto specs = bm.spec_set(rob::measure_preset("space"));
  const auto sys = bm.system();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  SolverConfig c = small_config();
  c.J = 5;
  int seen = 0;
  const auto res = solve(sys, specs, x0, Eigen::MatrixXd::Constant(1, 4, 0.3), c, [&](const IterationDetail& d) {
    ++seen;
    const double beta = beta_cosine(d.j, c.J, c.beta_min);
    CHECK(d.beta == beta);
    CHECK(d.lambda_j == doctest::Approx(beta * beta * c.lambda));
    CHECK(d.sigma_j(0, 0) == doctest::Approx(beta * 0.5));
    REQUIRE(d.sample_inputs.size() == static_cast<std::size_t>(sample_count_cosine(d.j, c.J, c.M_init, c.M_final)));

    // correction term and sample cost, then softmin with the minimum shift
    std::vector<double> ell;
    std::vector<lex::ScalarCost> costs;
    for (const auto& u : d.sample_inputs) {
      CHECK(u.maxCoeff() <= 1.35);
      CHECK(u.minCoeff() >= -1.35);
      costs.push_back(specs.scalar_cost(sys::rollout(sys, x0, u).trace));
    }
    const lex::ScalarCost floor = *std::min_element(costs.begin(), costs.end());
    for (std::size_t m = 0; m < costs.size(); ++m) {
      const Eigen::MatrixXd eps = d.sample_inputs[m] - d.u_nominal;
      double corr = 0.0;
      for (int k = 0; k < 4; ++k) corr += d.lambda_j * eps(0, k) * (1.0 / (beta * 0.5)) * d.u_nominal(0, k);
      ell.push_back(corr + (costs[m] - floor).convert_to<double>());
    }
    const double lmin = *std::min_element(ell.begin(), ell.end());
    double total = 0.0;
    std::vector<double> w;
    for (double l : ell) {
      w.push_back(std::exp(-(l - lmin) / d.lambda_j));
      total += w.back();
    }
    Eigen::MatrixXd updated = d.u_nominal;
    for (std::size_t m = 0; m < w.size(); ++m) {
      CHECK(d.weights[m] == doctest::Approx(w[m] / total).epsilon(1e-9));
      updated += (w[m] / total) * (d.sample_inputs[m] - d.u_nominal);
    }
    updated = updated.cwiseMax(-1.35).cwiseMin(1.35);
    CHECK((updated - d.u_updated).norm() < 1e-9);
  });
  CHECK(seen == 5);
  CHECK(res.per_iteration.size() == 5);
}

TEST_CASE("perturbations follow N(0, beta Sigma) when no clipping occurs") {
  const sys::Integrator wide(1e6, 1.0);
  SolverConfig c;
  c.J = 1;
  c.sigma = Eigen::MatrixXd::Constant(1, 1, 0.5);
  c.M_init = c.M_final = 4000;
  c.seed = 5;
  double sum = 0.0, sq = 0.0;
  long n = 0;
  const auto cost = [](const stl::Trace&) { return lex::ScalarCost(0); };
  (void)solve(wide, cost, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 5), c, [&](const IterationDetail& d) {
    for (const auto& u : d.sample_inputs) {
      for (int k = 0; k < 5; ++k) {
        sum += u(0, k);
        sq += u(0, k) * u(0, k);
        ++n;
      }
    }
  });
  const double mean = sum / static_cast<double>(n);
  CHECK(std::abs(mean) < 0.02);
  CHECK(sq / static_cast<double>(n) - mean * mean == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("determinism and thread independence") {
  const auto bm = bench_k3(9);
  const auto specs = bm.spec_set(rob::measure_preset("space"));
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd u0 = Eigen::MatrixXd::Zero(1, 4);
  SolverConfig c = small_config();
  const auto a = solve(bm.system(), specs, x0, u0, c);
  const auto b = solve(bm.system(), specs, x0, u0, c);
  c.threads = 3;
  const auto t = solve(bm.system(), specs, x0, u0, c);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.best_inputs == b.best_inputs);
  CHECK(a.mppi_inputs == t.mppi_inputs);
  CHECK(a.best_inputs == t.best_inputs);
  c.seed = 12;
  const auto other = solve(bm.system(), specs, x0, u0, c);
  CHECK(other.best_inputs != a.best_inputs);
}

TEST_CASE("best sample is the minimum over all iterations") {
  const auto bm = bench_k3(4);
  const auto specs = bm.spec_set(rob::measure_preset("space"));
  SolverConfig c = small_config();
  const auto res = solve(bm.system(), specs, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 4), c);
  lex::ScalarCost lowest = *res.per_iteration.front().min_cost;
  long total = 0;
  for (const auto& r : res.per_iteration) {
    lowest = std::min(lowest, *r.min_cost);
    total += r.M;
  }
  CHECK(res.best_cost == lowest);
  CHECK(res.samples_evaluated == total);
  CHECK(specs.scalar_cost(res.best_trace) == res.best_cost);
  CHECK(res.cost() == res.best_cost);
  CHECK(res.mppi_valid);
  CHECK(specs.scalar_cost(res.mppi_trace) == res.mppi_cost);
  c.return_rule = ReturnRule::kFinalMppi;
  const auto m = solve(bm.system(), specs, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 4), c);
  CHECK(m.cost() == m.mppi_cost);
  CHECK(&m.inputs() == &m.mppi_inputs);
}

TEST_CASE("solver matches or beats a 5-point grid on K = 3") {
  const auto grid = oracle::scalar_grid(-1.35, 1.35, 5);
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto bm = bench_k3(100 + s);
    const auto specs = bm.spec_set(rob::measure_preset("space"));
    const auto g = oracle::brute_force_optimum(
        bm.system(), [&](const stl::Trace& t) { return specs.scalar_cost(t); }, Eigen::VectorXd::Zero(1), grid, 3);
    CHECK(g.rollouts == 125);
    SolverConfig c = small_config();
    c.seed = s;
    const auto res = solve(bm.system(), specs, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 4), c);
    if (res.best_cost <= g.cost) ++wins;
  }
  CHECK(wins >= 19);
}

TEST_CASE("rollout failures get zero weight") {
  const sys::SingleTrack car;
  SolverConfig c;
  c.J = 2;
  c.sigma = Eigen::MatrixXd::Identity(2, 2);
  c.M_init = c.M_final = 40;
  c.u_lo = Eigen::Vector2d(-20.0, -1.0);
  c.u_hi = Eigen::Vector2d(20.0, 1.0);
  // steering close to the singularity: large steering rates push some samples past pi/2
  Eigen::VectorXd x0(5);
  x0 << 0, 0, 0, 1.5, 5;
  const auto cost = [](const stl::Trace&) { return lex::ScalarCost(1); };
  int invalid = 0;
  const auto res = solve(car, cost, x0, Eigen::MatrixXd::Zero(2, 6), c, [&](const IterationDetail& d) {
    for (std::size_t m = 0; m < d.valid.size(); ++m) {
      if (!d.valid[m]) {
        ++invalid;
        CHECK(d.weights[m] == 0.0);
      }
    }
  });
  CHECK(invalid > 0);
  int recorded = 0;
  for (const auto& r : res.per_iteration) recorded += r.invalid_samples;
  CHECK(recorded == invalid);
}
