#include "lexplan/scenario.hpp"

#include "lexplan/stl_parser.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace lexplan::sys {

using nlohmann::json;

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Walks a JSON document and reports errors against the source text.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string where;
    for (const auto& p : path) where += "/" + p;
    throw ScenarioError(source_, locate(path), (where.empty() ? "" : where + ": ") + message);
  }

  // best effort: find the object keys of the path in order
  int locate(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& p : path) {
      if (!p.empty() && std::isdigit(static_cast<unsigned char>(p[0]))) continue;
      const auto at = text_.find("\"" + p + "\"", pos);
      if (at == std::string::npos) break;
      pos = at + 1;
      found = true;
    }
    return found ? line_of_offset(text_, pos) : 0;
  }

  const json& need(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing key \"" + key + "\"");
    return *it;
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], extend(path, std::to_string(i))));
    return out;
  }

  void only(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& keys) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!keys.count(it.key())) fail(extend(path, it.key()), "unknown key");
    }
  }

  static std::vector<std::string> extend(std::vector<std::string> path, const std::string& key) {
    path.push_back(key);
    return path;
  }

  const std::string& source() const { return source_; }

 private:
  const std::string& text_;
  std::string source_;
};

using Path = std::vector<std::string>;

const std::map<std::string, std::vector<std::string>>& predicate_kinds() {
  static const std::map<std::string, std::vector<std::string>> kinds{
      {"state_limits", {"v_min", "v_max", "delta_max"}},
      {"collision", {}},
      {"speed_limit", {"v_max"}},
      {"preserves_flow", {"v_min"}},
      {"longitudinal_acceleration", {"a_max"}},
      {"lateral_acceleration", {"a_max"}},
      {"at_position", {"s_target", "tolerance"}},
      {"make_progress", {"distance"}},
      {"left_bound", {}},
      {"right_bound", {}},
      {"in_lane", {}},
      {"upper_threshold", {"row", "r"}},
      {"lower_threshold", {"row", "r"}},
  };
  return kinds;
}

bool needs_lane(const std::string& kind) {
  return kind == "at_position" || kind == "make_progress" || kind == "left_bound" || kind == "right_bound" ||
         kind == "in_lane";
}

solver::SolverConfig read_solver(const Reader& r, const json& j, const Path& path, int n_u) {
  r.only(j, path,
         {"J", "sigma", "lambda", "beta_rule", "beta_min", "gamma", "sample_rule", "M_init", "M_final",
          "return_rule", "seed", "threads"});
  solver::SolverConfig c;
  c.sigma = Eigen::MatrixXd::Identity(n_u, n_u);
  if (j.contains("J")) c.J = r.integer(j["J"], Reader::extend(path, "J"));
  if (j.contains("sigma")) {
    const auto p = Reader::extend(path, "sigma");
    const json& s = j["sigma"];
    if (!s.is_array() || static_cast<int>(s.size()) != n_u) {
      r.fail(p, "expected " + std::to_string(n_u) + " rows");
    }
    for (int i = 0; i < n_u; ++i) {
      const auto row = r.numbers(s[static_cast<std::size_t>(i)], Reader::extend(p, std::to_string(i)));
      if (static_cast<int>(row.size()) != n_u) r.fail(p, "expected " + std::to_string(n_u) + " columns");
      for (int k = 0; k < n_u; ++k) c.sigma(i, k) = row[static_cast<std::size_t>(k)];
    }
  }
  if (j.contains("lambda")) c.lambda = r.number(j["lambda"], Reader::extend(path, "lambda"));
  if (j.contains("beta_rule")) {
    const auto v = r.string(j["beta_rule"], Reader::extend(path, "beta_rule"));
    if (v == "cosine") c.beta_rule = solver::BetaRule::kCosine;
    else if (v == "exponential") c.beta_rule = solver::BetaRule::kExponential;
    else r.fail(Reader::extend(path, "beta_rule"), "expected \"cosine\" or \"exponential\"");
  }
  if (j.contains("beta_min")) c.beta_min = r.number(j["beta_min"], Reader::extend(path, "beta_min"));
  if (j.contains("gamma")) c.gamma = r.number(j["gamma"], Reader::extend(path, "gamma"));
  if (j.contains("sample_rule")) {
    const auto v = r.string(j["sample_rule"], Reader::extend(path, "sample_rule"));
    if (v == "cosine") c.sample_rule = solver::SampleRule::kCosine;
    else if (v == "constant") c.sample_rule = solver::SampleRule::kConstant;
    else r.fail(Reader::extend(path, "sample_rule"), "expected \"cosine\" or \"constant\"");
  }
  if (j.contains("M_init")) c.M_init = r.integer(j["M_init"], Reader::extend(path, "M_init"));
  if (j.contains("M_final")) c.M_final = r.integer(j["M_final"], Reader::extend(path, "M_final"));
  if (j.contains("return_rule")) {
    const auto v = r.string(j["return_rule"], Reader::extend(path, "return_rule"));
    if (v == "best") c.return_rule = solver::ReturnRule::kBestSample;
    else if (v == "mppi") c.return_rule = solver::ReturnRule::kFinalMppi;
    else r.fail(Reader::extend(path, "return_rule"), "expected \"best\" or \"mppi\"");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) r.fail(Reader::extend(path, "seed"), "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) c.threads = r.integer(j["threads"], Reader::extend(path, "threads"));
  try {
    c.validate(n_u);
  } catch (const std::invalid_argument& e) {
    r.fail(path, e.what());
  }
  return c;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), std::string("syntax error: ") + e.what());
  }
  const Reader r(text, source);
  const Path root;
  if (!doc.is_object()) r.fail(root, "expected a JSON object");
  r.only(doc, root,
         {"schema_version", "name", "system", "footprint", "initial_state", "horizon", "lane", "obstacles",
          "predicates", "specs", "nu", "solver", "mpc"});

  Scenario sc;
  sc.schema_version = r.integer(r.need(doc, root, "schema_version"), {"schema_version"});
  if (sc.schema_version != kScenarioSchemaVersion) {
    r.fail({"schema_version"}, "unsupported version " + std::to_string(sc.schema_version) + ", expected " +
                                   std::to_string(kScenarioSchemaVersion));
  }
  if (doc.contains("name")) sc.name = r.string(doc["name"], {"name"});

  const json& sys_j = r.need(doc, root, "system");
  const Path sp{"system"};
  sc.system = r.string(r.need(sys_j, sp, "type"), {"system", "type"});
  int n_x = 0, n_u = 0;
  if (sc.system == "single_track") {
    r.only(sys_j, sp, {"type", "wheelbase", "dt", "u_lo", "u_hi"});
    if (sys_j.contains("wheelbase")) sc.single_track.wheelbase = r.number(sys_j["wheelbase"], {"system", "wheelbase"});
    if (sys_j.contains("dt")) sc.single_track.dt = r.number(sys_j["dt"], {"system", "dt"});
    for (const char* key : {"u_lo", "u_hi"}) {
      if (!sys_j.contains(key)) continue;
      const auto v = r.numbers(sys_j[key], {"system", key});
      if (v.size() != 2) r.fail({"system", key}, "expected two entries");
      auto& dst = std::string(key) == "u_lo" ? sc.single_track.u_lo : sc.single_track.u_hi;
      dst = {v[0], v[1]};
    }
    sc.dt = sc.single_track.dt;
    n_x = 5;
    n_u = 2;
  } else if (sc.system == "integrator") {
    r.only(sys_j, sp, {"type", "u_bound", "dt"});
    if (sys_j.contains("u_bound")) sc.integrator_bound = r.number(sys_j["u_bound"], {"system", "u_bound"});
    sc.dt = sys_j.contains("dt") ? r.number(sys_j["dt"], {"system", "dt"}) : 1.0;
    n_x = 1;
    n_u = 1;
  } else {
    r.fail({"system", "type"}, "unknown system \"" + sc.system + "\"");
  }

  if (doc.contains("footprint")) {
    const Path p{"footprint"};
    r.only(doc["footprint"], p, {"length", "width"});
    if (doc["footprint"].contains("length")) sc.footprint.length = r.number(doc["footprint"]["length"], {"footprint", "length"});
    if (doc["footprint"].contains("width")) sc.footprint.width = r.number(doc["footprint"]["width"], {"footprint", "width"});
    if (!(sc.footprint.length > 0.0) || !(sc.footprint.width > 0.0)) r.fail(p, "extents must be positive");
  }
  sc.single_track.length = sc.footprint.length;
  sc.single_track.width = sc.footprint.width;

  const auto x0 = r.numbers(r.need(doc, root, "initial_state"), {"initial_state"});
  if (static_cast<int>(x0.size()) != n_x) {
    r.fail({"initial_state"}, "expected " + std::to_string(n_x) + " entries");
  }
  sc.initial_state = Eigen::Map<const Eigen::VectorXd>(x0.data(), n_x);
  sc.K = r.integer(r.need(doc, root, "horizon"), {"horizon"});
  if (sc.K < 1) r.fail({"horizon"}, "must be at least 1");

  if (doc.contains("lane")) {
    const json& lj = doc["lane"];
    const Path p{"lane"};
    r.only(lj, p, {"path", "width"});
    const json& pts = r.need(lj, p, "path");
    if (!pts.is_array()) r.fail({"lane", "path"}, "expected an array of [x, y] points");
    std::vector<Eigen::Vector2d> path;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto xy = r.numbers(pts[i], {"lane", "path", std::to_string(i)});
      if (xy.size() != 2) r.fail({"lane", "path", std::to_string(i)}, "expected [x, y]");
      path.emplace_back(xy[0], xy[1]);
    }
    try {
      sc.lane = std::make_shared<const Lane>(std::move(path), r.number(r.need(lj, p, "width"), {"lane", "width"}));
    } catch (const std::invalid_argument& e) {
      r.fail(p, e.what());
    }
  }

  if (doc.contains("obstacles")) {
    const json& oj = doc["obstacles"];
    if (!oj.is_array()) r.fail({"obstacles"}, "expected an array");
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const Path p{"obstacles", std::to_string(i)};
      r.only(oj[i], p, {"id", "x", "y", "theta", "length", "width", "velocity"});
      Obstacle o;
      o.id = r.string(r.need(oj[i], p, "id"), Reader::extend(p, "id"));
      o.x = r.number(r.need(oj[i], p, "x"), Reader::extend(p, "x"));
      o.y = r.number(r.need(oj[i], p, "y"), Reader::extend(p, "y"));
      if (oj[i].contains("theta")) o.theta = r.number(oj[i]["theta"], Reader::extend(p, "theta"));
      if (oj[i].contains("length")) o.length = r.number(oj[i]["length"], Reader::extend(p, "length"));
      if (oj[i].contains("width")) o.width = r.number(oj[i]["width"], Reader::extend(p, "width"));
      if (oj[i].contains("velocity")) o.velocity = r.number(oj[i]["velocity"], Reader::extend(p, "velocity"));
      if (!(o.length > 0.0) || !(o.width > 0.0)) r.fail(p, "extents must be positive");
      for (const auto& other : sc.obstacles) {
        if (other.id == o.id) r.fail(Reader::extend(p, "id"), "duplicate obstacle id \"" + o.id + "\"");
      }
      sc.obstacles.push_back(o);
    }
  }

  const json& pj = r.need(doc, root, "predicates");
  if (!pj.is_array() || pj.empty()) r.fail({"predicates"}, "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const Path p{"predicates", std::to_string(i)};
    PredicateEntry e;
    e.id = r.string(r.need(pj[i], p, "id"), Reader::extend(p, "id"));
    e.kind = r.string(r.need(pj[i], p, "kind"), Reader::extend(p, "kind"));
    if (!ids.insert(e.id).second) r.fail(Reader::extend(p, "id"), "duplicate predicate id \"" + e.id + "\"");
    const auto kind = predicate_kinds().find(e.kind);
    if (kind == predicate_kinds().end()) r.fail(Reader::extend(p, "kind"), "unknown predicate kind \"" + e.kind + "\"");
    std::set<std::string> allowed{"id", "kind"};
    for (const auto& param : kind->second) {
      allowed.insert(param);
      e.params[param] = r.number(r.need(pj[i], p, param), Reader::extend(p, param));
    }
    if (e.kind == "collision") {
      allowed.insert("obstacle");
      e.obstacle = r.string(r.need(pj[i], p, "obstacle"), Reader::extend(p, "obstacle"));
      const bool known = std::any_of(sc.obstacles.begin(), sc.obstacles.end(),
                                     [&](const Obstacle& o) { return o.id == e.obstacle; });
      if (!known) r.fail(Reader::extend(p, "obstacle"), "unknown obstacle \"" + e.obstacle + "\"");
    }
    r.only(pj[i], p, allowed);
    if (sc.system != "single_track" && e.kind != "upper_threshold" && e.kind != "lower_threshold") {
      r.fail(Reader::extend(p, "kind"), "predicate kind needs a single-track system");
    }
    if (needs_lane(e.kind) && !sc.lane) r.fail(Reader::extend(p, "kind"), "predicate kind needs a lane");
    if (e.params.count("row")) {
      const double row = e.params["row"];
      const int n_y = sc.system == "single_track" ? 7 : 1;
      if (row != std::floor(row) || row < 0 || row >= n_y) r.fail(Reader::extend(p, "row"), "output row out of range");
    }
    sc.predicates.push_back(std::move(e));
  }

  if (doc.contains("nu")) {
    const Path p{"nu"};
    r.only(doc["nu"], p, {"nu1", "nu2", "nu3", "nu4", "nu5"});
    double* fields[] = {&sc.nu.nu1, &sc.nu.nu2, &sc.nu.nu3, &sc.nu.nu4, &sc.nu.nu5};
    const char* names[] = {"nu1", "nu2", "nu3", "nu4", "nu5"};
    for (int i = 0; i < 5; ++i) {
      if (doc["nu"].contains(names[i])) *fields[i] = r.number(doc["nu"][names[i]], {"nu", names[i]});
    }
  }

  const json& sj = r.need(doc, root, "specs");
  if (!sj.is_array() || sj.empty()) r.fail({"specs"}, "expected a non-empty array");
  for (std::size_t i = 0; i < sj.size(); ++i) {
    const Path p{"specs", std::to_string(i)};
    r.only(sj[i], p, {"name", "formula", "measure", "c_bar", "m", "thresholds"});
    SpecEntry e;
    e.name = r.string(r.need(sj[i], p, "name"), Reader::extend(p, "name"));
    e.formula = r.string(r.need(sj[i], p, "formula"), Reader::extend(p, "formula"));
    e.measure = r.string(r.need(sj[i], p, "measure"), Reader::extend(p, "measure"));
    if (sj[i].contains("c_bar")) e.c_bar = r.number(sj[i]["c_bar"], Reader::extend(p, "c_bar"));
    if (sj[i].contains("m")) e.m = r.integer(sj[i]["m"], Reader::extend(p, "m"));
    if (sj[i].contains("thresholds")) e.thresholds = r.numbers(sj[i]["thresholds"], Reader::extend(p, "thresholds"));
    try {
      (void)rob::measure_preset(e.measure, sc.nu);
      if (e.thresholds.empty()) (void)lex::uniform_thresholds(e.c_bar, e.m);
      else (void)lex::DiscretizationScheme(e.thresholds);
    } catch (const std::invalid_argument& ex) {
      r.fail(p, ex.what());
    }
    sc.specs.push_back(std::move(e));
  }

  sc.solver = read_solver(r, doc.contains("solver") ? doc["solver"] : json::object(), {"solver"}, n_u);
  if (doc.contains("mpc")) {
    r.only(doc["mpc"], {"mpc"}, {"iterations"});
    if (doc["mpc"].contains("iterations")) {
      sc.mpc_iterations = r.integer(doc["mpc"]["iterations"], {"mpc", "iterations"});
      if (sc.mpc_iterations < 1) r.fail({"mpc", "iterations"}, "must be at least 1");
    }
  }

  // compile once so formula errors surface at load time
  try {
    (void)sc.spec_set(0.0);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(source, 0, e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::unique_ptr<System> Scenario::make_system() const {
  if (system == "single_track") return std::make_unique<SingleTrack>(single_track);
  return std::make_unique<Integrator>(integrator_bound, dt);
}

stl::PredicateRegistry Scenario::registry(double t0) const {
  stl::PredicateRegistry reg;
  for (const auto& e : predicates) {
    const auto& p = e.params;
    auto obstacle = [&] {
      return *std::find_if(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) { return o.id == e.obstacle; });
    };
    stl::PredicatePtr pred;
    if (e.kind == "state_limits") pred = state_limits(e.id, p.at("v_min"), p.at("v_max"), p.at("delta_max"));
    else if (e.kind == "collision") pred = collision(e.id, obstacle(), footprint, t0);
    else if (e.kind == "speed_limit") pred = speed_limit(e.id, p.at("v_max"));
    else if (e.kind == "preserves_flow") pred = preserves_flow(e.id, p.at("v_min"));
    else if (e.kind == "longitudinal_acceleration") pred = longitudinal_acceleration(e.id, p.at("a_max"));
    else if (e.kind == "lateral_acceleration") pred = lateral_acceleration(e.id, p.at("a_max"), single_track.wheelbase);
    else if (e.kind == "at_position") pred = at_position(e.id, lane, p.at("s_target"), p.at("tolerance"));
    else if (e.kind == "make_progress") pred = make_progress(e.id, lane, p.at("distance"));
    else if (e.kind == "left_bound") pred = left_bound(e.id, lane, footprint);
    else if (e.kind == "right_bound") pred = right_bound(e.id, lane, footprint);
    else if (e.kind == "in_lane") pred = in_lane(e.id, lane, footprint);
    else if (e.kind == "upper_threshold") pred = upper_threshold(e.id, static_cast<int>(p.at("row")), p.at("r"));
    else if (e.kind == "lower_threshold") pred = lower_threshold(e.id, static_cast<int>(p.at("row")), p.at("r"));
    else throw std::logic_error("unhandled predicate kind " + e.kind);
    reg.add(pred);
  }
  return reg;
}

lex::SpecSet Scenario::spec_set(double t0, const std::optional<std::string>& measure) const {
  const auto reg = registry(t0);
  std::vector<lex::Spec> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& e = specs[i];
    stl::Formula f;
    try {
      f = stl::parse_formula(e.formula, reg);
    } catch (const stl::ParseError& err) {
      throw ScenarioError("specs/" + std::to_string(i) + "/formula", 0, err.what());
    }
    auto scheme = e.thresholds.empty() ? lex::uniform_thresholds(e.c_bar, e.m) : lex::DiscretizationScheme(e.thresholds);
    out.push_back({e.name, f, rob::measure_preset(measure ? *measure : e.measure, nu), std::move(scheme)});
  }
  return lex::SpecSet(std::move(out));
}

Eigen::MatrixXd Scenario::initial_inputs() const {
  const auto sys = make_system();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(sys->n_u(), K + 1);
  for (Eigen::Index k = 0; k <= K; ++k) u.col(k) = u.col(k).cwiseMax(sys->u_lo()).cwiseMin(sys->u_hi());
  return u;
}

Eigen::MatrixXd shift_inputs(const Eigen::MatrixXd& plan) {
  Eigen::MatrixXd out(plan.rows(), plan.cols());
  if (plan.cols() == 0) return out;
  out.leftCols(plan.cols() - 1) = plan.rightCols(plan.cols() - 1);
  out.col(plan.cols() - 1) = plan.col(plan.cols() - 1);
  return out;
}

MpcResult mpc_loop(const Scenario& scenario, const solver::SolverConfig& config, int H,
                   const std::optional<std::string>& measure) {
  if (H < 1) throw std::invalid_argument("need at least one MPC iteration");
  const auto system = scenario.make_system();
  MpcResult run;
  run.states.resize(system->n_x(), H + 1);
  run.inputs.resize(system->n_u(), H);
  run.states.col(0) = scenario.initial_state;
  Eigen::MatrixXd warm = scenario.initial_inputs();
  for (int h = 0; h < H; ++h) {
    const double t0 = h * scenario.dt;
    const auto specs = scenario.spec_set(t0, measure);
    solver::SolverConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(h);
    PlanRecord rec;
    rec.iteration = h;
    try {
      rec.result = solver::solve(*system, specs, run.states.col(h), warm, c);
    } catch (const std::exception& e) {
      throw std::runtime_error("MPC iteration " + std::to_string(h) + ": " + e.what());
    }
    rec.breakdown = specs.evaluate(rec.result.trace());
    const Eigen::MatrixXd& plan = rec.result.inputs();
    run.inputs.col(h) = plan.col(0);
    run.states.col(h + 1) = system->step(run.states.col(h), plan.col(0));
    warm = shift_inputs(plan);
    run.plans.push_back(std::move(rec));
  }
  Eigen::MatrixXd out(system->n_y(), H + 1);
  for (int h = 0; h <= H; ++h) {
    out.col(h) = system->output(run.states.col(h), run.inputs.col(std::min(h, H - 1)));
  }
  run.executed = stl::Trace(std::move(out), scenario.dt);
  return run;
}

lex::CostBreakdown evaluate_executed(const Scenario& scenario, const MpcResult& run,
                                     const std::optional<std::string>& measure) {
  return scenario.spec_set(0.0, measure).evaluate(run.executed);
}

std::string executed_csv(const Scenario& scenario, const MpcResult& run) {
  std::ostringstream os;
  os << std::setprecision(17);
  const int n_x = static_cast<int>(run.states.rows());
  const int n_u = static_cast<int>(run.inputs.rows());
  os << "k,t";
  for (int i = 0; i < n_x; ++i) os << ",x" << i;
  for (int i = 0; i < n_u; ++i) os << ",u" << i;
  for (const auto& s : scenario.specs) os << ",rho_" << s.name;
  os << ",scalar_cost\n";
  const int H = static_cast<int>(run.inputs.cols());
  for (int k = 0; k <= H; ++k) {
    os << k << ',' << k * scenario.dt;
    for (int i = 0; i < n_x; ++i) os << ',' << run.states(i, k);
    for (int i = 0; i < n_u; ++i) {
      os << ',';
      if (k < H) os << run.inputs(i, k);
    }
    for (std::size_t i = 0; i < scenario.specs.size(); ++i) {
      os << ',';
      if (k < H) os << rob::to_string(run.plans[static_cast<std::size_t>(k)].breakdown.robustness[i]);
    }
    os << ',';
    if (k < H) os << lex::to_decimal(run.plans[static_cast<std::size_t>(k)].breakdown.scalar);
    os << '\n';
  }
  return os.str();
}

}  // namespace lexplan::sys
