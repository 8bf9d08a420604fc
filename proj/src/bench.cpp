#include "lexplan/bench.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lexplan::bench {

namespace {

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats(const std::vector<double>& v) {
  if (v.empty()) return {};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

std::string join(const Composition& c, char sep) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(c[i]);
  }
  return out;
}

}  // namespace

std::vector<Composition> sample_compositions(int m_total, int n, int count, std::uint64_t seed) {
  if (n < 1 || m_total < n) throw std::invalid_argument("need m_total >= n >= 1");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  std::mt19937_64 rng = derived_rng(seed, static_cast<std::uint64_t>(m_total), static_cast<std::uint64_t>(n));
  std::vector<int> gaps(static_cast<std::size_t>(m_total - 1));
  std::iota(gaps.begin(), gaps.end(), 1);
  std::vector<Composition> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> bars(static_cast<std::size_t>(n - 1));
  for (int c = 0; c < count; ++c) {
    // selection sampling returns the chosen gaps in increasing order
    std::sample(gaps.begin(), gaps.end(), bars.begin(), n - 1, rng);
    Composition parts;
    int prev = 0;
    for (int b : bars) {
      parts.push_back(b - prev);
      prev = b;
    }
    parts.push_back(m_total - prev);
    out.push_back(std::move(parts));
  }
  return out;
}

Composition even_composition(int m_total, int n) {
  if (n < 1 || m_total < n) throw std::invalid_argument("need m_total >= n >= 1");
  Composition c(static_cast<std::size_t>(n), m_total / n);
  for (int i = 0; i < m_total % n; ++i) ++c[static_cast<std::size_t>(i)];
  return c;
}

Composition linear_composition(int m_total, int n, bool increasing) {
  if (n < 1 || m_total < n) throw std::invalid_argument("need m_total >= n >= 1");
  const int extra = m_total - n;
  const double weight_sum = n * (n + 1) / 2.0;
  Composition c(static_cast<std::size_t>(n), 1);
  std::vector<std::pair<double, int>> remainders;
  int given = 0;
  for (int i = 0; i < n; ++i) {
    const double w = increasing ? i + 1 : n - i;
    const double share = extra * w / weight_sum;
    const int whole = static_cast<int>(std::floor(share));
    c[static_cast<std::size_t>(i)] += whole;
    given += whole;
    remainders.emplace_back(share - whole, i);
  }
  // largest remainder first; ties go to the larger weight
  std::stable_sort(remainders.begin(), remainders.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return increasing ? a.second > b.second : a.second < b.second;
  });
  for (int i = 0; i < extra - given; ++i) ++c[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
  return c;
}

DiscretizationParams::DiscretizationParams() {
  for (int m = 8; m <= 160; m += 8) m_totals.push_back(m);
}

std::vector<DiscretizationRow> discretization_study(const DiscretizationParams& params) {
  if (params.m_totals.empty()) throw std::invalid_argument("empty m_total sweep");
  if (params.scenarios < 1 || params.compositions < 0) throw std::invalid_argument("need at least one scenario");
  for (int m : params.m_totals) {
    if (m < params.K) throw std::invalid_argument("m_total must be at least the number of specs");
  }
  const int n = params.K;
  std::vector<oracle::LinearBenchmark> benches;
  std::vector<oracle::LexOptimum> continuous;
  for (int s = 0; s < params.scenarios; ++s) {
    auto rng = derived_rng(params.seed, 1, static_cast<std::uint64_t>(s));
    auto bm = oracle::LinearBenchmark::alternating(oracle::random_thresholds(rng, n),
                                                   std::vector<int>(static_cast<std::size_t>(n), 1), n);
    continuous.push_back(oracle::exact_lex_optimum(bm, oracle::CostMode::kContinuous));
    benches.push_back(std::move(bm));
  }

  auto evaluate = [&](const Composition& c) {
    std::vector<double> errors;
    errors.reserve(benches.size());
    for (std::size_t s = 0; s < benches.size(); ++s) {
      auto bm = benches[s];
      for (std::size_t i = 0; i < c.size(); ++i) bm.specs[i].m = c[i];
      errors.push_back(oracle::violation_error(continuous[s], oracle::exact_lex_optimum(bm, oracle::CostMode::kDiscretized)));
    }
    return stats(errors);
  };

  std::vector<DiscretizationRow> rows;
  for (int m_total : params.m_totals) {
    const Composition even = even_composition(m_total, n);
    const Composition inc = linear_composition(m_total, n, true);
    const Composition dec = linear_composition(m_total, n, false);
    const Stats s_even = evaluate(even), s_inc = evaluate(inc), s_dec = evaluate(dec);

    DiscretizationRow best{m_total, "best", s_even.mean, s_even.stddev, even};
    auto consider = [&](const Composition& c, const Stats& st) {
      if (st.mean < best.mean) best = {m_total, "best", st.mean, st.stddev, c};
    };
    consider(inc, s_inc);
    consider(dec, s_dec);
    for (const auto& c : sample_compositions(m_total, n, params.compositions, params.seed)) consider(c, evaluate(c));

    rows.push_back(best);
    rows.push_back({m_total, "even", s_even.mean, s_even.stddev, even});
    rows.push_back({m_total, "increase", s_inc.mean, s_inc.stddev, inc});
    rows.push_back({m_total, "decrease", s_dec.mean, s_dec.stddev, dec});
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<DiscretizationRow>& rows) {
  os << std::setprecision(10);
  os << "m_total,strategy,mean_violation_error,std_violation_error,composition\n";
  for (const auto& r : rows) {
    os << r.m_total << ',' << r.strategy << ',' << r.mean << ',' << r.stddev << ',' << join(r.composition, ' ') << '\n';
  }
}

std::vector<AblationConfig> ablation_configs() {
  using solver::BetaRule;
  using solver::ReturnRule;
  using solver::SampleRule;
  return {
      {"baseline", SampleRule::kConstant, BetaRule::kExponential, ReturnRule::kFinalMppi},
      {"config1", SampleRule::kConstant, BetaRule::kExponential, ReturnRule::kBestSample},
      {"config2", SampleRule::kConstant, BetaRule::kCosine, ReturnRule::kFinalMppi},
      {"config3", SampleRule::kConstant, BetaRule::kCosine, ReturnRule::kBestSample},
      {"config4", SampleRule::kCosine, BetaRule::kExponential, ReturnRule::kFinalMppi},
      {"config5", SampleRule::kCosine, BetaRule::kExponential, ReturnRule::kBestSample},
      {"config6", SampleRule::kCosine, BetaRule::kCosine, ReturnRule::kFinalMppi},
      {"full", SampleRule::kCosine, BetaRule::kCosine, ReturnRule::kBestSample},
  };
}

AblationParams::AblationParams() : m(8, 5), configs(ablation_configs()) {
  solver.J = 20;
  solver.sigma = Eigen::MatrixXd::Constant(1, 1, 0.5);
  solver.lambda = 1.0;
  solver.gamma = 0.6;
  solver.beta_min = 1e-6;
  solver.M_init = 400;
  solver.M_final = 250;
}

std::vector<AblationRow> solver_ablation(const AblationParams& params) {
  if (params.scenarios < 1) throw std::invalid_argument("need at least one scenario");
  const auto base_it = std::find_if(params.configs.begin(), params.configs.end(),
                                    [](const AblationConfig& c) { return c.name == "baseline"; });
  if (base_it == params.configs.end()) throw std::invalid_argument("ablation needs a baseline config");
  const std::size_t base = static_cast<std::size_t>(base_it - params.configs.begin());
  const int K = static_cast<int>(params.m.size());
  const std::size_t nc = params.configs.size();

  std::vector<lex::ScalarCost> optimum(static_cast<std::size_t>(params.scenarios));
  std::vector<std::vector<lex::ScalarCost>> cost(nc, std::vector<lex::ScalarCost>(optimum.size()));
  std::vector<double> samples(nc, 0.0);
  const auto space = rob::measure_preset("space");

  for (int s = 0; s < params.scenarios; ++s) {
    auto rng = derived_rng(params.seed, 2, static_cast<std::uint64_t>(s));
    const auto bm = oracle::LinearBenchmark::alternating(oracle::random_thresholds(rng, K), params.m, K);
    const auto specs = bm.spec_set(space);
    const auto exact = oracle::exact_lex_optimum(bm, oracle::CostMode::kDiscretized);
    optimum[static_cast<std::size_t>(s)] = lex::pack(exact.levels, specs.layout());
    const auto system = bm.system();
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, bm.x0);
    const Eigen::MatrixXd u0 = Eigen::MatrixXd::Zero(1, K + 1);
    for (std::size_t c = 0; c < nc; ++c) {
      solver::SolverConfig cfg = params.solver;
      cfg.sample_rule = params.configs[c].sample_rule;
      cfg.beta_rule = params.configs[c].beta_rule;
      cfg.return_rule = params.configs[c].return_rule;
      cfg.seed = params.seed * 1000003ULL + static_cast<std::uint64_t>(s);
      const auto res = solver::solve(system, specs, x0, u0, cfg);
      cost[c][static_cast<std::size_t>(s)] = res.cost();
      samples[c] += static_cast<double>(res.samples_evaluated);
    }
  }

  // gap in percent; nullopt when the optimum is 0 but the cost is not
  auto gap = [](const lex::ScalarCost& v, const lex::ScalarCost& opt) -> std::optional<double> {
    if (opt == 0) return v == 0 ? std::optional<double>(0.0) : std::nullopt;
    return (v - opt).convert_to<double>() / opt.convert_to<double>() * 100.0;
  };
  const double n = params.scenarios;

  auto row_for = [&](const std::string& name, const std::vector<lex::ScalarCost>& costs, double mean_samples) {
    AblationRow row;
    row.name = name;
    row.mean_samples = mean_samples;
    std::vector<double> gaps, changes;
    int optimal = 0;
    for (std::size_t s = 0; s < optimum.size(); ++s) {
      const auto c = lex::compare(costs[s], cost[base][s]);
      if (c < 0) row.p_lower += 1;
      else if (c == 0) row.p_equal += 1;
      else row.p_higher += 1;
      if (costs[s] == optimum[s]) ++optimal;
      const auto g = gap(costs[s], optimum[s]);
      const auto gb = gap(cost[base][s], optimum[s]);
      if (g) gaps.push_back(*g);
      else ++row.excluded;
      if (g && gb) changes.push_back(*g - *gb);
    }
    row.p_lower *= 100.0 / n;
    row.p_equal *= 100.0 / n;
    row.p_higher *= 100.0 / n;
    row.p_optimal = optimal * 100.0 / n;
    row.mean_gap = stats(gaps).mean;
    row.mean_gap_change = stats(changes).mean;
    return row;
  };

  std::vector<AblationRow> rows;
  for (std::size_t c = 0; c < nc; ++c) rows.push_back(row_for(params.configs[c].name, cost[c], samples[c] / n));
  rows.push_back(row_for("optimum", optimum, 0.0));
  return rows;
}

void write_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
  os << std::setprecision(10);
  os << "config,p_lower,p_equal,p_higher,mean_gap_percent,mean_gap_change,p_optimal,excluded,mean_samples\n";
  for (const auto& r : rows) {
    os << r.name << ',' << r.p_lower << ',' << r.p_equal << ',' << r.p_higher << ',' << r.mean_gap << ','
       << r.mean_gap_change << ',' << r.p_optimal << ',' << r.excluded << ',' << r.mean_samples << '\n';
  }
}

MeasureBenchParams::MeasureBenchParams() : measures(rob::measure_names()) {
  solver.J = 5;
  solver.M_init = 200;
  solver.M_final = 100;
}

std::vector<MeasureRow> measure_benchmark(const sys::Scenario& scenario, const MeasureBenchParams& params) {
  if (params.trajectories < 1 || params.repetitions < 1) throw std::invalid_argument("need trajectories and repetitions");
  const auto reg = scenario.registry(0.0);
  if (!reg.find("in_lane")) throw std::invalid_argument("scenario has no predicate with id in_lane");
  const stl::Formula spec = stl::globally(stl::pred(reg.find("in_lane")));
  const auto system = scenario.make_system();
  solver::SolverConfig solve_cfg = params.solver;
  if (solve_cfg.sigma.size() == 0) solve_cfg.sigma = scenario.solver.sigma;
  const Eigen::MatrixXd chol = solve_cfg.sigma.llt().matrixL();

  // one fixed workload shared by every measure
  std::vector<stl::Trace> traces;
  auto rng = derived_rng(params.seed, 3);
  std::normal_distribution<double> normal;
  while (static_cast<int>(traces.size()) < params.trajectories) {
    Eigen::MatrixXd u(system->n_u(), scenario.K + 1);
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      Eigen::VectorXd z(system->n_u());
      for (auto& x : z) x = normal(rng);
      u.col(k) = (chol * z).cwiseMax(system->u_lo()).cwiseMin(system->u_hi());
    }
    try {
      traces.push_back(sys::rollout(*system, scenario.initial_state, u).trace);
    } catch (const std::domain_error&) {
    }
  }

  using clock = std::chrono::steady_clock;
  std::vector<MeasureRow> rows;
  for (const auto& name : params.measures) {
    const auto cfg = rob::measure_preset(name, scenario.nu);
    MeasureRow row;
    row.measure = name;
    const rob::Evaluator cached(cfg, spec, true);
    const rob::Evaluator uncached(cfg, spec, false);

    std::vector<double> calls;
    double cached_total = 0.0;
    for (const auto& t : traces) {
      rob::EvalStats a, b;
      (void)uncached.robustness(t, 0, &a);
      (void)cached.robustness(t, 0, &b);
      calls.push_back(static_cast<double>(a.predicate_calls));
      cached_total += static_cast<double>(b.predicate_calls);
    }
    const Stats cs = stats(calls);
    row.calls_mean = cs.mean;
    row.calls_std = cs.stddev;
    row.cached_calls_mean = cached_total / static_cast<double>(traces.size());

    std::vector<double> t_rob;
    volatile double sink = 0.0;
    for (int rep = 0; rep <= params.repetitions; ++rep) {
      const auto start = clock::now();
      for (const auto& t : traces) sink = sink + cached.robustness(t, 0).to_double();
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
      if (rep > 0) t_rob.push_back(ms);  // the first pass is warmup
    }
    const Stats rs = stats(t_rob);
    row.t_rob_mean_ms = rs.mean;
    row.t_rob_std_ms = rs.stddev;

    std::vector<double> t_sol;
    for (int rep = 0; rep < params.solve_repetitions; ++rep) {
      const auto specs = scenario.spec_set(0.0, name);
      solver::SolverConfig c = solve_cfg;
      c.seed = params.seed + static_cast<std::uint64_t>(rep);
      const auto start = clock::now();
      (void)solver::solve(*system, specs, scenario.initial_state, scenario.initial_inputs(), c);
      t_sol.push_back(std::chrono::duration<double, std::milli>(clock::now() - start).count());
    }
    const Stats ss = stats(t_sol);
    row.t_sol_mean_ms = ss.mean;
    row.t_sol_std_ms = ss.stddev;
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<MeasureRow>& rows) {
  os << std::setprecision(10);
  os << "measure,t_sol_mean_ms,t_sol_std_ms,t_rob_mean_ms,t_rob_std_ms,calls_mean,calls_std,cached_calls_mean\n";
  for (const auto& r : rows) {
    os << r.measure << ',' << r.t_sol_mean_ms << ',' << r.t_sol_std_ms << ',' << r.t_rob_mean_ms << ','
       << r.t_rob_std_ms << ',' << r.calls_mean << ',' << r.calls_std << ',' << r.cached_calls_mean << '\n';
  }
}

TrajectoryFan overtaking_fan(int planning_time) {
  if (planning_time != 1 && planning_time != 2) throw std::invalid_argument("planning time must be 1 or 2");
  constexpr int K = 15;
  constexpr double dt = 0.2, v = 10.0;
  auto lane = std::make_shared<const sys::Lane>(
      std::vector<Eigen::Vector2d>{{-50.0, 0.0}, {250.0, 0.0}}, 6.0);
  const sys::Footprint fp{};
  TrajectoryFan fan;
  fan.lane_spec = stl::globally(stl::conj(stl::pred(sys::left_bound("left_bound", lane, fp)),
                                          stl::pred(sys::right_bound("right_bound", lane, fp))));
  // at t1 the ego is centered in its lane, at t2 it is beside the obstacle
  const double y0 = planning_time == 1 ? 0.0 : 3.6;
  for (int i = 0; i <= 20; ++i) {
    const double target = planning_time == 1 ? (i - 10) * 0.45 : y0 + (10 - i) * 0.36;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(7, K + 1);
    for (int k = 0; k <= K; ++k) {
      y(sys::st::kX, k) = v * dt * k;
      y(sys::st::kY, k) = y0 + (target - y0) * 0.5 * (1.0 - std::cos(std::numbers::pi * k / K));
      y(sys::st::kV, k) = v;
      if (k > 0) y(sys::st::kTheta, k) = std::atan2(y(sys::st::kY, k) - y(sys::st::kY, k - 1), v * dt);
    }
    fan.traces.emplace_back(std::move(y), dt);
  }
  return fan;
}

std::vector<ComparisonRow> robustness_comparison(const TrajectoryFan& fan,
                                                 const std::vector<std::string>& measures) {
  std::vector<ComparisonRow> rows;
  for (const auto& name : measures) {
    const rob::Evaluator ev(rob::measure_preset(name), fan.lane_spec);
    std::vector<rob::ExtReal> values;
    double scale = 0.0;
    for (const auto& t : fan.traces) {
      values.push_back(ev.robustness(t, 0));
      if (values.back().is_finite()) scale = std::max(scale, std::abs(values.back().to_double()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      ComparisonRow row;
      row.measure = name;
      row.sample = static_cast<int>(i);
      row.value = values[i];
      row.normalization_skipped = scale == 0.0;
      if (values[i].is_finite()) {
        row.normalized = scale == 0.0 ? values[i].to_double() : values[i].to_double() / scale;
      } else {
        row.normalized = values[i].is_pos_inf() ? 1.0 : -1.0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << std::setprecision(17);
  os << "measure,sample,robustness,normalized,normalization_skipped\n";
  for (const auto& r : rows) {
    os << r.measure << ',' << r.sample << ',' << rob::to_string(r.value) << ',' << r.normalized << ','
       << (r.normalization_skipped ? 1 : 0) << '\n';
  }
}

}  // namespace lexplan::bench
