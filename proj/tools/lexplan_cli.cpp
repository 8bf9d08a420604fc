// lexplan: plan, bench, eval, oracle.
//
// Exit codes: 0 ok, 2 usage or input error, 3 runtime failure.

#include "lexplan/bench.hpp"
#include "lexplan/oracle.hpp"
#include "lexplan/robustness.hpp"
#include "lexplan/scenario.hpp"
#include "lexplan/solver.hpp"
#include "lexplan/stl_parser.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lexplan;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Input problems: bad files, bad flags, unknown names. Maps to exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = ".";
  std::string format = "csv";
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv, const Globals& g) {
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["seed"] = g.seed;
    doc_["threads"] = g.threads;
    doc_["format"] = g.format;
    doc_["versions"] = {{"lexplan", kVersion},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                      "." + std::to_string(EIGEN_MINOR_VERSION)},
                        {"boost", BOOST_LIB_VERSION},
                        {"compiler", __VERSION__}};
    doc_["started"] = utc_now();
    doc_["outputs"] = json::array();
    doc_["config"] = nullptr;
  }
  void config(const std::string& path) { doc_["config"] = path; }
  void param(const std::string& key, json value) { doc_["params"][key] = std::move(value); }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.string()); }
  void write(const fs::path& dir) {
    doc_["finished"] = utc_now();
    const fs::path p = dir / "manifest.json";
    std::ofstream out(p);
    out << doc_.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + p.string());
  }

 private:
  json doc_;
};

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& p, const std::string& text, Manifest& manifest) {
  std::ofstream out(p);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
  manifest.output(p);
}

std::vector<int> parse_sweep(const std::string& text) {
  std::vector<int> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<int> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stoi(item));
      if (parts.size() != 3 || parts[2] <= 0) throw InputError("sweep must be start:stop:step with step > 0");
      for (int m = parts[0]; m <= parts[1]; m += parts[2]) out.push_back(m);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
      }
    }
  } catch (const std::logic_error&) {
    throw InputError("cannot parse sweep '" + text + "'");
  }
  if (out.empty()) throw InputError("sweep '" + text + "' is empty");
  return out;
}

rob::MeasureConfig measure_or_fail(const std::string& name, const rob::Nus& nu = {}) {
  try {
    return rob::measure_preset(name, nu);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json to_json(const rob::ExtReal& x) {
  if (x.is_finite()) return x.to_double();
  return rob::to_string(x);
}

json to_json(const lex::CostBreakdown& b) {
  json j;
  j["robustness"] = json::array();
  j["continuous"] = json::array();
  for (const auto& r : b.robustness) j["robustness"].push_back(to_json(r));
  for (const auto& c : b.continuous) j["continuous"].push_back(to_json(c));
  j["discrete"] = b.discrete;
  j["scalar"] = lex::to_decimal(b.scalar);
  return j;
}

template <class Row, class ToJson>
std::string render(const std::vector<Row>& rows, const std::string& format, ToJson to_json_row) {
  std::ostringstream os;
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json_row(r));
    os << arr.dump(2) << '\n';
  } else {
    bench::write_csv(os, rows);
  }
  return os.str();
}

// ---------------------------------------------------------------- plan

struct PlanOptions {
  std::string scenario;
  std::optional<std::string> measure;
  std::optional<int> iterations, J, M_init, M_final;
  std::optional<std::string> return_rule, beta_rule, sample_rule;
};

int cmd_plan(const PlanOptions& o, const Globals& g, const std::vector<std::string>& argv) {
  Manifest manifest("plan", argv, g);
  manifest.config(o.scenario);
  const sys::Scenario sc = sys::load_scenario(o.scenario);
  if (o.measure) (void)measure_or_fail(*o.measure);
  solver::SolverConfig cfg = sc.solver;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  if (o.J) cfg.J = *o.J;
  if (o.M_init) cfg.M_init = *o.M_init;
  if (o.M_final) cfg.M_final = *o.M_final;
  if (o.return_rule) cfg.return_rule = *o.return_rule == "mppi" ? solver::ReturnRule::kFinalMppi : solver::ReturnRule::kBestSample;
  if (o.beta_rule) cfg.beta_rule = *o.beta_rule == "exponential" ? solver::BetaRule::kExponential : solver::BetaRule::kCosine;
  if (o.sample_rule) cfg.sample_rule = *o.sample_rule == "constant" ? solver::SampleRule::kConstant : solver::SampleRule::kCosine;
  try {
    cfg.validate(static_cast<int>(sc.make_system()->n_u()));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const int H = o.iterations.value_or(sc.mpc_iterations);
  if (H < 1) throw InputError("iterations must be at least 1");
  manifest.param("iterations", H);
  manifest.param("measure", o.measure ? json(*o.measure) : json(nullptr));
  manifest.param("J", cfg.J);
  manifest.param("M_init", cfg.M_init);
  manifest.param("M_final", cfg.M_final);
  manifest.param("return_rule", solver::to_string(cfg.return_rule));
  manifest.param("beta_rule", solver::to_string(cfg.beta_rule));
  manifest.param("sample_rule", solver::to_string(cfg.sample_rule));

  const fs::path dir = prepare_dir(g.output_dir);
  const sys::MpcResult run = sys::mpc_loop(sc, cfg, H, o.measure);

  write_file(dir / "executed.csv", sys::executed_csv(sc, run), manifest);

  json diag;
  diag["scenario"] = sc.name;
  diag["specs"] = json::array();
  for (const auto& s : sc.specs) diag["specs"].push_back(s.name);
  diag["executed"] = to_json(sys::evaluate_executed(sc, run, o.measure));
  diag["iterations"] = json::array();
  for (const auto& p : run.plans) {
    json it;
    it["iteration"] = p.iteration;
    it["plan"] = to_json(p.breakdown);
    it["samples_evaluated"] = p.result.samples_evaluated;
    it["solver"] = json::array();
    for (const auto& r : p.result.per_iteration) {
      it["solver"].push_back({{"j", r.j},
                              {"beta", r.beta},
                              {"M", r.M},
                              {"min_cost", r.min_cost ? json(lex::to_decimal(*r.min_cost)) : json(nullptr)},
                              {"weight_entropy", r.weight_entropy},
                              {"invalid_samples", r.invalid_samples},
                              {"wall_ms", r.wall_ms}});
    }
    diag["iterations"].push_back(std::move(it));
  }
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n", manifest);
  manifest.write(dir);

  const auto& exec = diag["executed"];
  std::cout << "executed discrete cost vector:";
  for (int d : exec["discrete"]) std::cout << ' ' << d;
  std::cout << "\nwrote " << (dir / "executed.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string study;
  int scenarios = -1;
  int compositions = 100;
  std::string m_total = "8:160:8";
  int K = 8;
  int m = 5;
  std::vector<std::string> configs;
  std::string scenario;
  std::vector<std::string> measures;
  int trajectories = 2000;
  int repetitions = 5;
  int solve_repetitions = 1;
  int planning_time = 2;
};

int cmd_bench(const BenchOptions& o, const Globals& g, const std::vector<std::string>& argv) {
  Manifest manifest("bench " + o.study, argv, g);
  std::string text;
  std::string stem = o.study;

  if (o.study == "discretization") {
    bench::DiscretizationParams p;
    p.m_totals = parse_sweep(o.m_total);
    if (o.scenarios > 0) p.scenarios = o.scenarios;
    p.compositions = o.compositions;
    p.K = o.K;
    p.seed = g.seed;
    for (int m : p.m_totals) {
      if (m < p.K) throw InputError("m_total " + std::to_string(m) + " is below the number of specs");
    }
    manifest.param("scenarios", p.scenarios);
    manifest.param("compositions", p.compositions);
    manifest.param("m_total", p.m_totals);
    const fs::path dir = prepare_dir(g.output_dir);
    text = render(bench::discretization_study(p), g.format, [](const bench::DiscretizationRow& r) {
      return json{{"m_total", r.m_total}, {"strategy", r.strategy}, {"mean", r.mean}, {"std", r.stddev},
                  {"composition", r.composition}};
    });
    write_file(dir / (stem + "." + g.format), text, manifest);
    manifest.write(dir);
  } else if (o.study == "ablation") {
    bench::AblationParams p;
    if (o.scenarios > 0) p.scenarios = o.scenarios;
    if (o.K < 1 || o.m < 1) throw InputError("K and m must be positive");
    p.m.assign(static_cast<std::size_t>(o.K), o.m);
    p.seed = g.seed;
    p.solver.threads = g.threads;
    if (!o.configs.empty()) {
      std::vector<bench::AblationConfig> chosen;
      for (const auto& name : o.configs) {
        const auto all = bench::ablation_configs();
        auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.name == name; });
        if (it == all.end()) throw InputError("unknown ablation config " + name);
        chosen.push_back(*it);
      }
      if (std::none_of(chosen.begin(), chosen.end(), [](const auto& c) { return c.name == "baseline"; })) {
        chosen.insert(chosen.begin(), bench::ablation_configs().front());
      }
      p.configs = chosen;
    }
    manifest.param("scenarios", p.scenarios);
    manifest.param("K", o.K);
    manifest.param("m", o.m);
    const fs::path dir = prepare_dir(g.output_dir);
    text = render(bench::solver_ablation(p), g.format, [](const bench::AblationRow& r) {
      return json{{"config", r.name},       {"p_lower", r.p_lower},   {"p_equal", r.p_equal},
                  {"p_higher", r.p_higher}, {"mean_gap", r.mean_gap}, {"mean_gap_change", r.mean_gap_change},
                  {"p_optimal", r.p_optimal}, {"excluded", r.excluded}, {"mean_samples", r.mean_samples}};
    });
    write_file(dir / (stem + "." + g.format), text, manifest);
    manifest.write(dir);
  } else if (o.study == "measures") {
    if (o.scenario.empty()) throw InputError("bench measures needs --scenario");
    manifest.config(o.scenario);
    const sys::Scenario sc = sys::load_scenario(o.scenario);
    bench::MeasureBenchParams p;
    if (!o.measures.empty()) p.measures = o.measures;
    for (const auto& m : p.measures) (void)measure_or_fail(m);
    p.trajectories = o.trajectories;
    p.repetitions = o.repetitions;
    p.solve_repetitions = o.solve_repetitions;
    p.solver.threads = g.threads;
    p.seed = g.seed;
    manifest.param("measures", p.measures);
    manifest.param("trajectories", p.trajectories);
    const fs::path dir = prepare_dir(g.output_dir);
    std::vector<bench::MeasureRow> rows;
    try {
      rows = bench::measure_benchmark(sc, p);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    text = render(rows, g.format, [](const bench::MeasureRow& r) {
      return json{{"measure", r.measure},          {"t_sol_mean_ms", r.t_sol_mean_ms},
                  {"t_sol_std_ms", r.t_sol_std_ms}, {"t_rob_mean_ms", r.t_rob_mean_ms},
                  {"t_rob_std_ms", r.t_rob_std_ms}, {"calls_mean", r.calls_mean},
                  {"calls_std", r.calls_std},       {"cached_calls_mean", r.cached_calls_mean}};
    });
    write_file(dir / (stem + "." + g.format), text, manifest);
    manifest.write(dir);
  } else if (o.study == "comparison") {
    if (o.planning_time != 1 && o.planning_time != 2) throw InputError("planning time must be 1 or 2");
    std::vector<std::string> measures = o.measures.empty() ? rob::measure_names() : o.measures;
    for (const auto& m : measures) (void)measure_or_fail(m);
    manifest.param("planning_time", o.planning_time);
    manifest.param("measures", measures);
    const fs::path dir = prepare_dir(g.output_dir);
    text = render(bench::robustness_comparison(bench::overtaking_fan(o.planning_time), measures), g.format,
                  [](const bench::ComparisonRow& r) {
                    return json{{"measure", r.measure}, {"sample", r.sample}, {"robustness", to_json(r.value)},
                                {"normalized", r.normalized}, {"normalization_skipped", r.normalization_skipped}};
                  });
    write_file(dir / (stem + "." + g.format), text, manifest);
    manifest.write(dir);
  } else {
    throw InputError("unknown study '" + o.study + "' (discretization, ablation, measures, comparison)");
  }
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------- eval

struct CsvTrace {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // one row per column of the file
  double dt = 1.0;
};

CsvTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  CsvTrace out;
  std::string line;
  int line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) {
      c.erase(0, c.find_first_not_of(" \t\r"));
      c.erase(c.find_last_not_of(" \t\r") + 1);
      cells.push_back(c);
    }
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (out.columns.empty()) {
      for (const auto& c : cells) {
        if (c.empty()) throw InputError(path + ":" + std::to_string(line_no) + ": empty column name");
      }
      out.columns = cells;
      continue;
    }
    if (cells.size() != out.columns.size()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(out.columns.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::logic_error&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) {
        throw InputError(path + ":" + std::to_string(line_no) + ": not a number: '" + c + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (out.columns.empty() || rows.empty()) throw InputError(path + ": no header or no data rows");
  out.values.resize(static_cast<Eigen::Index>(out.columns.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < out.columns.size(); ++c) out.values(c, k) = rows[k][c];
  }
  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    if (out.columns[c] == "t" && rows.size() > 1) out.dt = rows[1][c] - rows[0][c];
  }
  if (!(out.dt > 0.0)) throw InputError(path + ": column t must increase");
  return out;
}

struct EvalOptions {
  std::string formula;
  std::string trace;
  std::string measure = "space";
  int k = 0;
  rob::Nus nu;
};

int cmd_eval(const EvalOptions& o, const Globals& g) {
  const auto cfg = measure_or_fail(o.measure, o.nu);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const CsvTrace csv = read_trace_csv(o.trace);
  stl::PredicateRegistry reg;
  for (std::size_t c = 0; c < csv.columns.size(); ++c) {
    const int row = static_cast<int>(c);
    reg.add(stl::make_predicate(csv.columns[c], [row](const stl::Trace& t, int k) { return t(row, k); }));
  }
  stl::Formula f;
  try {
    f = stl::parse_formula(o.formula, reg);
  } catch (const stl::ParseError& e) {
    throw InputError(std::string("formula: ") + e.what());
  }
  const stl::Trace trace(csv.values, csv.dt);
  if (o.k < 0 || o.k > trace.K()) throw InputError("k outside the trace");
  const rob::ExtReal rho = rob::Evaluator(cfg, f).robustness(trace, o.k);
  const bool verdict = stl::boolean_sat(f, trace, o.k);
  if (g.format == "json") {
    std::cout << json{{"formula", stl::to_string(f)}, {"measure", cfg.name}, {"k", o.k}, {"robustness", to_json(rho)},
                      {"satisfied", verdict}}
                     .dump()
              << '\n';
  } else {
    std::cout << std::setprecision(17) << "robustness," << rob::to_string(rho) << "\nsatisfied,"
              << (verdict ? "true" : "false") << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- oracle

struct OracleOptions {
  int scenarios = 10;
  int K = 8;
  int m = 5;
};

int cmd_oracle(const OracleOptions& o, const Globals& g, const std::vector<std::string>& argv) {
  if (o.scenarios < 1 || o.K < 1 || o.m < 1) throw InputError("scenarios, K and m must be positive");
  Manifest manifest("oracle", argv, g);
  manifest.param("scenarios", o.scenarios);
  manifest.param("K", o.K);
  manifest.param("m", o.m);
  const fs::path dir = prepare_dir(g.output_dir);
  std::mt19937_64 rng(g.seed);
  json records = json::array();
  for (int s = 0; s < o.scenarios; ++s) {
    const auto bm = oracle::LinearBenchmark::alternating(oracle::random_thresholds(rng, o.K),
                                                         std::vector<int>(static_cast<std::size_t>(o.K), o.m), o.K);
    const auto cont = oracle::exact_lex_optimum(bm, oracle::CostMode::kContinuous);
    const auto disc = oracle::exact_lex_optimum(bm, oracle::CostMode::kDiscretized);
    json thresholds = json::array();
    for (const auto& sp : bm.specs) thresholds.push_back(sp.r);
    records.push_back({{"scenario", s},
                       {"thresholds", thresholds},
                       {"continuous_optimal_costs", cont.min_cost},
                       {"discrete_optimal_levels", disc.levels},
                       {"discrete_worst_costs", disc.max_cost},
                       {"witness_inputs", disc.witness_inputs},
                       {"violation_error", oracle::violation_error(cont, disc)}});
  }
  write_file(dir / "oracle.json", records.dump(2) + "\n", manifest);
  manifest.write(dir);
  std::cout << records.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Lexicographic STL motion planning"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for sample rollouts")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", g.output_dir, "Directory for outputs and manifest.json");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  PlanOptions plan;
  auto* plan_cmd = app.add_subcommand("plan", "Run the receding-horizon planner on a scenario file");
  plan_cmd->add_option("scenario", plan.scenario, "Scenario JSON")->required();
  plan_cmd->add_option("--measure", plan.measure, "Robustness measure for every spec");
  plan_cmd->add_option("--iterations", plan.iterations, "MPC iterations");
  plan_cmd->add_option("--J", plan.J, "Solver iterations");
  plan_cmd->add_option("--M-init", plan.M_init, "Samples in the first iteration");
  plan_cmd->add_option("--M-final", plan.M_final, "Samples in the last iteration");
  plan_cmd->add_option("--return-rule", plan.return_rule)->check(CLI::IsMember({"best", "mppi"}));
  plan_cmd->add_option("--beta-rule", plan.beta_rule)->check(CLI::IsMember({"cosine", "exponential"}));
  plan_cmd->add_option("--sample-rule", plan.sample_rule)->check(CLI::IsMember({"cosine", "constant"}));

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Run a study: discretization, ablation, measures, comparison");
  bench_cmd->add_option("study", bo.study, "Study name")->required();
  bench_cmd->add_option("--scenarios", bo.scenarios, "Random scenarios");
  bench_cmd->add_option("--compositions", bo.compositions, "Sampled compositions per m_total");
  bench_cmd->add_option("--m-total", bo.m_total, "Sweep start:stop:step or a comma list");
  bench_cmd->add_option("--K", bo.K, "Benchmark horizon (one spec per step)");
  bench_cmd->add_option("--m", bo.m, "Intervals per spec (ablation)");
  bench_cmd->add_option("--configs", bo.configs, "Ablation configs (baseline is always included)");
  bench_cmd->add_option("--scenario", bo.scenario, "Scenario JSON (measures)");
  bench_cmd->add_option("--measures", bo.measures, "Measures to compare");
  bench_cmd->add_option("--trajectories", bo.trajectories, "Rollouts per timing pass")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repetitions", bo.repetitions, "Timing passes")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--solve-repetitions", bo.solve_repetitions, "Timed solves per measure");
  bench_cmd->add_option("--planning-time", bo.planning_time, "Fan at the first or second planning time");

  EvalOptions eo;
  auto* eval_cmd = app.add_subcommand("eval", "Robustness of a formula on a trace CSV");
  eval_cmd->add_option("formula", eo.formula, "Formula, columns of the CSV are predicate values")->required();
  eval_cmd->add_option("trace", eo.trace, "CSV with one column per predicate id")->required();
  eval_cmd->add_option("--measure", eo.measure)->capture_default_str();
  eval_cmd->add_option("--k", eo.k, "Evaluation time step");
  eval_cmd->add_option("--nu1", eo.nu.nu1);
  eval_cmd->add_option("--nu2", eo.nu.nu2);
  eval_cmd->add_option("--nu3", eo.nu.nu3);
  eval_cmd->add_option("--nu4", eo.nu.nu4);
  eval_cmd->add_option("--nu5", eo.nu.nu5);

  OracleOptions oo;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact lexicographic optima of random linear benchmarks");
  oracle_cmd->add_option("--scenarios", oo.scenarios);
  oracle_cmd->add_option("--K", oo.K);
  oracle_cmd->add_option("--m", oo.m);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan, g, args);
    if (*bench_cmd) return cmd_bench(bo, g, args);
    if (*eval_cmd) return cmd_eval(eo, g);
    if (*oracle_cmd) return cmd_oracle(oo, g, args);
  } catch (const sys::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
