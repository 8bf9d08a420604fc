#include "lexplan/robustness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace lexplan::rob {

// ---------------------------------------------------------------- ExtReal

ExtReal::ExtReal(double v) {
  if (std::isnan(v)) throw std::invalid_argument("extended real cannot be NaN");
  if (std::isinf(v)) {
    kind_ = v > 0 ? Kind::kPosInf : Kind::kNegInf;
  } else {
    v_ = v;
  }
}

bool ExtReal::nonnegative() const {
  return kind_ == Kind::kPosInf || (kind_ == Kind::kFinite && !std::signbit(v_));
}

double ExtReal::to_double() const {
  switch (kind_) {
    case Kind::kNegInf: return -std::numeric_limits<double>::infinity();
    case Kind::kPosInf: return std::numeric_limits<double>::infinity();
    default: return v_;
  }
}

ExtReal ExtReal::operator-() const {
  switch (kind_) {
    case Kind::kNegInf: return pos_inf();
    case Kind::kPosInf: return neg_inf();
    default: return ExtReal(-v_);
  }
}

std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  if (a.kind_ != ExtReal::Kind::kFinite) return std::strong_ordering::equal;
  if (a.v_ < b.v_) return std::strong_ordering::less;
  if (a.v_ > b.v_) return std::strong_ordering::greater;
  const bool sa = std::signbit(a.v_);
  const bool sb = std::signbit(b.v_);
  if (sa == sb) return std::strong_ordering::equal;
  return sa ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string to_string(const ExtReal& x) {
  if (x.is_pos_inf()) return "inf";
  if (x.is_neg_inf()) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x.to_double());
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- presets

void MeasureConfig::validate() const {
  for (double v : {nu.nu1, nu.nu2, nu.nu3, nu.nu4, nu.nu5}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("measure '" + name + "': tuning constants must be positive");
    }
  }
}

namespace {

struct Preset {
  const char* name;
  PredicateMeasure predicate;
  OpFamily family;
};

constexpr Preset kPresets[] = {
    {"space", PredicateMeasure::kSpace, OpFamily::kStd},
    {"left-time", PredicateMeasure::kLeftTime, OpFamily::kStd},
    {"right-time", PredicateMeasure::kRightTime, OpFamily::kStd},
    {"comb-time", PredicateMeasure::kCombTime, OpFamily::kStd},
    {"dur", PredicateMeasure::kSpace, OpFamily::kDur},
    {"dur-sev", PredicateMeasure::kSpace, OpFamily::kDurSev},
    {"smooth", PredicateMeasure::kSpace, OpFamily::kSmooth},
    {"agm", PredicateMeasure::kSpace, OpFamily::kAgm},
    {"new", PredicateMeasure::kSpace, OpFamily::kNew},
    {"pm", PredicateMeasure::kSpace, OpFamily::kPm},
    {"space-left-time", PredicateMeasure::kSpaceLeftTime, OpFamily::kStd},
};

const std::unordered_map<std::string_view, std::string_view>& aliases() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"combined-time", "comb-time"}, {"duration", "dur"},  {"duration-severity", "dur-sev"},
      {"power-mean", "pm"},           {"space-time", "space-left-time"},
  };
  return table;
}

}  // namespace

MeasureConfig measure_preset(std::string_view name, Nus nu) {
  if (auto it = aliases().find(name); it != aliases().end()) name = it->second;
  for (const auto& p : kPresets) {
    if (name == p.name) {
      MeasureConfig c{p.name, p.predicate, p.family, p.family, nu};
      c.validate();
      return c;
    }
  }
  throw std::invalid_argument("unknown robustness measure '" + std::string(name) + "'");
}

const std::vector<std::string>& measure_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

bool reverse_sound(const MeasureConfig& c) {
  if (c.min_op != c.max_op) return false;
  return c.min_op == OpFamily::kStd || c.min_op == OpFamily::kDur ||
         c.min_op == OpFamily::kDurSev;
}

std::string to_string(PredicateMeasure m) {
  switch (m) {
    case PredicateMeasure::kSpace: return "space";
    case PredicateMeasure::kLeftTime: return "left-time";
    case PredicateMeasure::kRightTime: return "right-time";
    case PredicateMeasure::kCombTime: return "comb-time";
    case PredicateMeasure::kSpaceLeftTime: return "space-left-time";
  }
  return "?";
}

std::string to_string(OpFamily f) {
  switch (f) {
    case OpFamily::kStd: return "std";
    case OpFamily::kDur: return "dur";
    case OpFamily::kDurSev: return "dur-sev";
    case OpFamily::kSmooth: return "smooth";
    case OpFamily::kAgm: return "agm";
    case OpFamily::kNew: return "new";
    case OpFamily::kPm: return "pm";
  }
  return "?";
}

// ---------------------------------------------------------------- operators

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool any_signbit(std::span<const ExtReal> k) {
  return std::any_of(k.begin(), k.end(), [](const ExtReal& x) { return x.negative(); });
}

// A zero coming out of a min-type formula is negative iff some input is.
ExtReal min_zero_sign(double r, std::span<const ExtReal> k) {
  if (r == 0.0) return any_signbit(k) ? ExtReal(-0.0) : ExtReal(0.0);
  return ExtReal(r);
}

ExtReal min_of(std::span<const ExtReal> k) { return *std::min_element(k.begin(), k.end()); }

bool positive(const ExtReal& x) { return x > ExtReal(0.0); }  // strictly above +0

ExtReal amin_dur(std::span<const ExtReal> k) {
  const ExtReal kmin = min_of(k);
  if (positive(kmin)) return kmin;
  double count = 0;
  for (const auto& x : k) count += x.negative() ? 1.0 : 0.0;
  return min_zero_sign(-count / static_cast<double>(k.size()), k);
}

ExtReal amin_dur_sev(std::span<const ExtReal> k) {
  const ExtReal kmin = min_of(k);
  if (positive(kmin)) return kmin;
  double sum = 0;
  for (const auto& x : k) sum += std::min(x.to_double(), 0.0);
  return min_zero_sign(sum / static_cast<double>(k.size()), k);
}

ExtReal amin_smooth(std::span<const ExtReal> k, double nu1) {
  // -1/nu1 * log(sum exp(-nu1 k_i)), shifted by the largest exponent.
  double shift = -kInf;
  for (const auto& x : k) {
    if (x.is_finite()) shift = std::max(shift, -nu1 * x.to_double());
  }
  double sum = 0;
  for (const auto& x : k) {
    if (x.is_finite()) sum += std::exp(-nu1 * x.to_double() - shift);
  }
  return min_zero_sign(-(shift + std::log(sum)) / nu1, k);
}

ExtReal amax_smooth(std::span<const ExtReal> k, double nu2) {
  double shift = -kInf;
  for (const auto& x : k) {
    if (x.is_finite()) shift = std::max(shift, nu2 * x.to_double());
  }
  double num = 0;
  double den = 0;
  for (const auto& x : k) {
    if (!x.is_finite()) continue;
    const double w = std::exp(nu2 * x.to_double() - shift);
    num += x.to_double() * w;
    den += w;
  }
  const double r = num / den;
  if (r == 0.0) {
    const bool some_nonneg =
        std::any_of(k.begin(), k.end(), [](const ExtReal& x) { return x.nonnegative(); });
    return some_nonneg ? ExtReal(0.0) : ExtReal(-0.0);
  }
  return ExtReal(r);
}

ExtReal amin_agm(std::span<const ExtReal> k) {
  const ExtReal kmin = min_of(k);
  const double z = static_cast<double>(k.size());
  if (!positive(kmin)) {
    double sum = 0;
    for (const auto& x : k) sum += std::min(x.to_double(), 0.0);
    return min_zero_sign(sum / z, k);
  }
  // z-th root of prod(1 + k_i), minus one
  double log_sum = 0;
  for (const auto& x : k) log_sum += std::log1p(x.to_double());
  return min_zero_sign(std::expm1(log_sum / z), k);
}

ExtReal amin_new(std::span<const ExtReal> k, double nu3) {
  const ExtReal kmin = min_of(k);
  if (kmin.is_zero()) return kmin;
  const double m = kmin.to_double();
  double num = 0;
  double den = 0;
  if (kmin.negative()) {
    for (const auto& x : k) {
      if (x.is_pos_inf()) continue;  // tilde = -inf, weight 0
      const double t = (x.to_double() - m) / m;
      const double w = std::exp(nu3 * t);
      num += m * std::exp(t) * w;
      den += w;
    }
  } else {
    for (const auto& x : k) {
      if (x.is_pos_inf()) continue;  // tilde = +inf, weight 0
      const double t = (x.to_double() - m) / m;
      const double w = std::exp(-nu3 * t);
      num += x.to_double() * w;
      den += w;
    }
  }
  return min_zero_sign(num / den, k);
}

ExtReal amin_pm(std::span<const ExtReal> k, double nu4, double nu5) {
  const ExtReal kmin = min_of(k);
  const double z = static_cast<double>(k.size());
  double sum = 0;
  if (positive(kmin)) {
    for (const auto& x : k) sum += std::pow(x.to_double(), nu4);
    return min_zero_sign(std::pow(sum / z, 1.0 / nu4), k);
  }
  for (const auto& x : k) sum += std::pow(-std::min(x.to_double(), 0.0), nu5);
  return min_zero_sign(-std::pow(sum / z, 1.0 / nu5), k);
}

void require_nonempty(std::span<const ExtReal> k) {
  if (k.empty()) throw std::invalid_argument("min/max operator needs at least one value");
}

}  // namespace

ExtReal amin(OpFamily family, std::span<const ExtReal> k, const Nus& nu) {
  require_nonempty(k);
  if (family == OpFamily::kStd) return min_of(k);
  if (family == OpFamily::kDur) return amin_dur(k);

  if (std::any_of(k.begin(), k.end(), [](const ExtReal& x) { return x.is_neg_inf(); })) {
    return ExtReal::neg_inf();
  }
  if (std::all_of(k.begin(), k.end(), [](const ExtReal& x) { return x.is_pos_inf(); })) {
    return ExtReal::pos_inf();
  }
  switch (family) {
    case OpFamily::kDurSev: return amin_dur_sev(k);
    case OpFamily::kSmooth: return amin_smooth(k, nu.nu1);
    case OpFamily::kAgm: return amin_agm(k);
    case OpFamily::kNew: return amin_new(k, nu.nu3);
    case OpFamily::kPm: return amin_pm(k, nu.nu4, nu.nu5);
    default: break;
  }
  throw std::logic_error("unhandled operator family");
}

ExtReal amax(OpFamily family, std::span<const ExtReal> k, const Nus& nu) {
  require_nonempty(k);
  if (family == OpFamily::kStd) return *std::max_element(k.begin(), k.end());
  if (family == OpFamily::kSmooth) {
    if (std::any_of(k.begin(), k.end(), [](const ExtReal& x) { return x.is_pos_inf(); })) {
      return ExtReal::pos_inf();
    }
    if (std::all_of(k.begin(), k.end(), [](const ExtReal& x) { return x.is_neg_inf(); })) {
      return ExtReal::neg_inf();
    }
    return amax_smooth(k, nu.nu2);
  }
  std::vector<ExtReal> negated(k.size());
  std::transform(k.begin(), k.end(), negated.begin(), [](const ExtReal& x) { return -x; });
  return -amin(family, negated, nu);
}

// ---------------------------------------------------------------- predicates

namespace {

double checked(double v) {
  if (std::isnan(v)) throw std::domain_error("predicate evaluated to NaN");
  return v;
}

bool sign_of(double v) { return v >= 0.0; }  // sign(0) = +1

ExtReal signed_count(bool pos, int tau) {
  return pos ? ExtReal(static_cast<double>(tau)) : ExtReal(-static_cast<double>(tau));
}

template <class P>
ExtReal predicate_robustness_impl(PredicateMeasure measure, P&& p, int k, int K) {
  if (k < 0 || k > K) {
    throw std::out_of_range("time index " + std::to_string(k) + " outside [0, " +
                            std::to_string(K) + "]");
  }
  const double pk = checked(p(k));
  const bool s = sign_of(pk);
  switch (measure) {
    case PredicateMeasure::kSpace:
      return ExtReal(pk + 0.0);  // -0 becomes +0: p = 0 is satisfied
    case PredicateMeasure::kLeftTime: {
      int tau = 0;
      while (k + tau + 1 <= K && sign_of(checked(p(k + tau + 1))) == s) ++tau;
      return signed_count(s, tau);
    }
    case PredicateMeasure::kRightTime: {
      int tau = 0;
      while (k - tau - 1 >= 0 && sign_of(checked(p(k - tau - 1))) == s) ++tau;
      return signed_count(s, tau);
    }
    case PredicateMeasure::kCombTime: {
      // Window [k - tau, k + tau] clipped to [0, K]; each side may clip on its own.
      int tau = 0;
      const int limit = std::max(k, K - k);
      while (tau < limit) {
        const int lo = k - tau - 1;
        const int hi = k + tau + 1;
        if (lo >= 0 && sign_of(checked(p(lo))) != s) break;
        if (hi <= K && sign_of(checked(p(hi))) != s) break;
        ++tau;
      }
      return signed_count(s, tau);
    }
    case PredicateMeasure::kSpaceLeftTime: {
      double best = std::abs(pk);
      for (int tau = 1; k + tau <= K; ++tau) {
        const double v = checked(p(k + tau));
        if (sign_of(v) != s) break;
        best = std::max(best, tau + std::abs(v));
      }
      return s ? ExtReal(best) : ExtReal(-best);
    }
  }
  throw std::logic_error("unhandled predicate measure");
}

}  // namespace

ExtReal predicate_robustness(PredicateMeasure measure, const std::function<double(int)>& p, int k,
                             int K) {
  return predicate_robustness_impl(measure, p, k, K);
}

ExtReal predicate_robustness(PredicateMeasure measure, const stl::Predicate& p,
                             const stl::Trace& trace, int k) {
  return predicate_robustness_impl(
      measure, [&](int t) { return p.evaluate(trace, t); }, k, trace.K());
}

// ---------------------------------------------------------------- evaluator

Evaluator::Evaluator(MeasureConfig config, stl::Formula formula, bool cache_predicates)
    : config_(std::move(config)), formula_(std::move(formula)), cache_predicates_(cache_predicates) {
  if (!formula_) throw std::invalid_argument("evaluator needs a formula");
  config_.validate();

  std::unordered_map<const stl::Node*, int> index;
  std::unordered_map<const stl::Predicate*, int> slots;
  // Post-order so children get smaller indices than their parents.
  std::function<int(const stl::Node*)> visit = [&](const stl::Node* n) -> int {
    if (auto it = index.find(n); it != index.end()) return it->second;
    CNode c;
    c.op = n->op;
    c.interval = n->interval;
    if (n->op == stl::Op::kPredicate) {
      auto [it, inserted] = slots.try_emplace(n->predicate.get(), static_cast<int>(predicates_.size()));
      if (inserted) predicates_.push_back(n->predicate);
      c.slot = it->second;
    }
    if (n->lhs) {
      c.lhs = visit(n->lhs.get());
      c.lhs_is_true = n->lhs->op == stl::Op::kTrue;
    }
    if (n->rhs) c.rhs = visit(n->rhs.get());
    nodes_.push_back(c);
    const int id = static_cast<int>(nodes_.size()) - 1;
    index.emplace(n, id);
    return id;
  };
  visit(formula_.get());
}

struct Evaluator::Run {
  const Evaluator& ev;
  const stl::Trace& trace;
  int K;
  long calls = 0;
  long lookups = 0;
  std::vector<ExtReal> memo;         // node * (K+1) + k
  std::vector<unsigned char> known;  // same layout
  std::vector<double> pcache;        // slot * (K+1) + k
  std::vector<unsigned char> pknown;
  std::vector<std::vector<ExtReal>> terms;  // per-node scratch
  std::vector<std::vector<ExtReal>> folds;

  Run(const Evaluator& e, const stl::Trace& t)
      : ev(e), trace(t), K(t.K()) {
    const std::size_t width = static_cast<std::size_t>(K) + 1;
    memo.resize(ev.nodes_.size() * width);
    known.assign(ev.nodes_.size() * width, 0);
    if (ev.cache_predicates_) {
      pcache.resize(ev.predicates_.size() * width);
      pknown.assign(ev.predicates_.size() * width, 0);
    }
    terms.resize(ev.nodes_.size());
    folds.resize(ev.nodes_.size());
  }

  double pval(int slot, int k) {
    ++lookups;
    if (ev.cache_predicates_) {
      const std::size_t i = static_cast<std::size_t>(slot) * (K + 1) + k;
      if (!pknown[i]) {
        ++calls;
        pcache[i] = ev.predicates_[slot]->evaluate(trace, k);
        pknown[i] = 1;
      }
      return pcache[i];
    }
    ++calls;
    return ev.predicates_[slot]->evaluate(trace, k);
  }

  ExtReal value(int node, int k) {
    const std::size_t i = static_cast<std::size_t>(node) * (K + 1) + k;
    if (!known[i]) {
      memo[i] = compute(node, k);
      known[i] = 1;
    }
    return memo[i];
  }

  ExtReal fold_min(int node, int child, int first, int last) {
    auto& buf = folds[node];
    buf.clear();
    for (int t = first; t <= last; ++t) buf.push_back(value(child, t));
    return amin(ev.config_.min_op, buf, ev.config_.nu);
  }

  // Until/Since: amax over k' of amin(rhs(k'), amin over the lhs window).
  // The lhs window is [k, k') for Until and (k', k] for Since; when it is empty
  // or lhs is True the term is rhs(k') on its own.
  ExtReal until_since(int node, int k, bool future) {
    const CNode& n = ev.nodes_[node];
    const stl::Window w = future ? stl::future_window(n.interval, k, K)
                                 : stl::past_window(n.interval, k, K);
    if (w.empty()) return ExtReal::neg_inf();
    auto& out = terms[node];
    out.clear();
    for (int kp = w.first; kp <= w.last; ++kp) {
      const ExtReal r = value(n.rhs, kp);
      const int lo = future ? k : kp + 1;
      const int hi = future ? kp - 1 : k;
      if (n.lhs_is_true || lo > hi) {
        out.push_back(r);
        continue;
      }
      const ExtReal pair[2] = {r, fold_min(node, n.lhs, lo, hi)};
      out.push_back(amin(ev.config_.min_op, pair, ev.config_.nu));
    }
    return amax(ev.config_.max_op, out, ev.config_.nu);
  }

  ExtReal window_fold(int node, int k, bool future, bool take_max) {
    const CNode& n = ev.nodes_[node];
    const stl::Window w = future ? stl::future_window(n.interval, k, K)
                                 : stl::past_window(n.interval, k, K);
    if (w.empty()) return take_max ? ExtReal::neg_inf() : ExtReal::pos_inf();
    auto& buf = terms[node];
    buf.clear();
    for (int kp = w.first; kp <= w.last; ++kp) buf.push_back(value(n.lhs, kp));
    return take_max ? amax(ev.config_.max_op, buf, ev.config_.nu)
                    : amin(ev.config_.min_op, buf, ev.config_.nu);
  }

  ExtReal compute(int node, int k) {
    const CNode& n = ev.nodes_[node];
    const auto& cfg = ev.config_;
    switch (n.op) {
      case stl::Op::kPredicate:
        return predicate_robustness_impl(
            cfg.predicate, [&](int t) { return pval(n.slot, t); }, k, K);
      case stl::Op::kTrue:
        return ExtReal::pos_inf();
      case stl::Op::kNot:
        return -value(n.lhs, k);
      case stl::Op::kAnd: {
        const ExtReal pair[2] = {value(n.lhs, k), value(n.rhs, k)};
        return amin(cfg.min_op, pair, cfg.nu);
      }
      case stl::Op::kOr: {
        const ExtReal pair[2] = {value(n.lhs, k), value(n.rhs, k)};
        return amax(cfg.max_op, pair, cfg.nu);
      }
      case stl::Op::kImplies: {
        const ExtReal pair[2] = {-value(n.lhs, k), value(n.rhs, k)};
        return amax(cfg.max_op, pair, cfg.nu);
      }
      case stl::Op::kUntil: return until_since(node, k, true);
      case stl::Op::kSince: return until_since(node, k, false);
      case stl::Op::kEventually: return window_fold(node, k, true, true);
      case stl::Op::kOnce: return window_fold(node, k, false, true);
      case stl::Op::kGlobally: return window_fold(node, k, true, false);
      case stl::Op::kHistorically: return window_fold(node, k, false, false);
    }
    throw std::logic_error("unhandled operator");
  }
};

ExtReal Evaluator::robustness(const stl::Trace& trace, int k, EvalStats* stats) const {
  if (k < 0 || k > trace.K()) {
    throw std::out_of_range("time index " + std::to_string(k) + " outside [0, " +
                            std::to_string(trace.K()) + "]");
  }
  Run run(*this, trace);
  const ExtReal r = run.value(static_cast<int>(nodes_.size()) - 1, k);
  if (stats) {
    stats->predicate_calls += run.calls;
    stats->predicate_lookups += run.lookups;
  }
  return r;
}

std::vector<ExtReal> Evaluator::all_times(const stl::Trace& trace, EvalStats* stats) const {
  Run run(*this, trace);
  std::vector<ExtReal> out;
  out.reserve(static_cast<std::size_t>(trace.K()) + 1);
  for (int k = 0; k <= trace.K(); ++k) out.push_back(run.value(static_cast<int>(nodes_.size()) - 1, k));
  if (stats) {
    stats->predicate_calls += run.calls;
    stats->predicate_lookups += run.lookups;
  }
  return out;
}

ExtReal robustness(const MeasureConfig& config, const stl::Formula& formula,
                   const stl::Trace& trace, int k) {
  return Evaluator(config, formula).robustness(trace, k);
}

std::vector<ExtReal> robustness_all_times(const MeasureConfig& config, const stl::Formula& formula,
                                          const stl::Trace& trace) {
  return Evaluator(config, formula).all_times(trace);
}

}  // namespace lexplan::rob
