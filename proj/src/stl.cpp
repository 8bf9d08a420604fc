#include "lexplan/stl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lexplan::stl {

Trace::Trace(Eigen::MatrixXd values, double dt) : values_(std::move(values)), dt_(dt) {
  if (values_.cols() < 2) {
    throw std::invalid_argument("trace needs at least two time steps (K >= 1)");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw std::invalid_argument("trace time increment must be positive");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("trace values must be finite");
  }
}

Interval::Interval(int lo_, int hi_) : lo(lo_), hi(hi_) {
  if (lo < 0 || lo > hi) {
    throw std::invalid_argument("interval requires 0 <= lo <= hi, got [" + std::to_string(lo) +
                                "," + std::to_string(hi) + "]");
  }
}

PredicatePtr make_predicate(std::string id, std::function<double(const Trace&, int)> fn) {
  return std::make_shared<const Predicate>(Predicate{std::move(id), std::move(fn)});
}

namespace {

Formula make(Op op, Formula lhs = nullptr, Formula rhs = nullptr,
             std::optional<Interval> I = std::nullopt) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->interval = I;
  return n;
}

void require(const Formula& f) {
  if (!f) throw std::invalid_argument("null formula operand");
}

}  // namespace

Formula pred(PredicatePtr p) {
  if (!p || !p->evaluate) throw std::invalid_argument("predicate needs an evaluator");
  auto n = std::make_shared<Node>();
  n->op = Op::kPredicate;
  n->predicate = std::move(p);
  return n;
}

Formula top() { return make(Op::kTrue); }

Formula neg(Formula f) {
  require(f);
  return make(Op::kNot, std::move(f));
}

Formula conj(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::kAnd, std::move(a), std::move(b));
}

Formula disj(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::kOr, std::move(a), std::move(b));
}

Formula implies(Formula a, Formula b) {
  require(a);
  require(b);
  return make(Op::kImplies, std::move(a), std::move(b));
}

Formula until(Formula a, Formula b, std::optional<Interval> I) {
  require(a);
  require(b);
  return make(Op::kUntil, std::move(a), std::move(b), I);
}

Formula since(Formula a, Formula b, std::optional<Interval> I) {
  require(a);
  require(b);
  return make(Op::kSince, std::move(a), std::move(b), I);
}

Formula eventually(Formula f, std::optional<Interval> I) {
  require(f);
  return make(Op::kEventually, std::move(f), nullptr, I);
}

Formula globally(Formula f, std::optional<Interval> I) {
  require(f);
  return make(Op::kGlobally, std::move(f), nullptr, I);
}

Formula once(Formula f, std::optional<Interval> I) {
  require(f);
  return make(Op::kOnce, std::move(f), nullptr, I);
}

Formula historically(Formula f, std::optional<Interval> I) {
  require(f);
  return make(Op::kHistorically, std::move(f), nullptr, I);
}

bool is_temporal(Op op) {
  switch (op) {
    case Op::kUntil:
    case Op::kSince:
    case Op::kEventually:
    case Op::kGlobally:
    case Op::kOnce:
    case Op::kHistorically:
      return true;
    default:
      return false;
  }
}

bool is_core(Op op) {
  switch (op) {
    case Op::kPredicate:
    case Op::kTrue:
    case Op::kNot:
    case Op::kAnd:
    case Op::kUntil:
    case Op::kSince:
      return true;
    default:
      return false;
  }
}

Formula normalize(const Formula& f) {
  require(f);
  switch (f->op) {
    case Op::kPredicate:
    case Op::kTrue:
      return f;
    case Op::kNot:
      return neg(normalize(f->lhs));
    case Op::kAnd:
      return conj(normalize(f->lhs), normalize(f->rhs));
    case Op::kOr:
      // a ∨ b := ¬(¬a ∧ ¬b)
      return neg(conj(neg(normalize(f->lhs)), neg(normalize(f->rhs))));
    case Op::kImplies: {
      // a ⇒ b := ¬a ∨ b
      auto na = neg(normalize(f->lhs));
      return neg(conj(neg(na), neg(normalize(f->rhs))));
    }
    case Op::kUntil:
      return until(normalize(f->lhs), normalize(f->rhs), f->interval);
    case Op::kSince:
      return since(normalize(f->lhs), normalize(f->rhs), f->interval);
    case Op::kEventually:
      return until(top(), normalize(f->lhs), f->interval);
    case Op::kOnce:
      return since(top(), normalize(f->lhs), f->interval);
    case Op::kGlobally:
      return neg(until(top(), neg(normalize(f->lhs)), f->interval));
    case Op::kHistorically:
      return neg(since(top(), neg(normalize(f->lhs)), f->interval));
  }
  throw std::logic_error("unhandled operator");
}

bool is_normalized(const Formula& f) {
  if (!f) return true;
  return is_core(f->op) && is_normalized(f->lhs) && is_normalized(f->rhs);
}

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->interval != b->interval) return false;
  if (a->op == Op::kPredicate) return a->predicate == b->predicate;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

namespace {

const char* op_name(Op op) {
  switch (op) {
    case Op::kNot: return "not";
    case Op::kAnd: return "and";
    case Op::kOr: return "or";
    case Op::kImplies: return "implies";
    case Op::kUntil: return "U";
    case Op::kSince: return "S";
    case Op::kEventually: return "F";
    case Op::kGlobally: return "G";
    case Op::kOnce: return "O";
    case Op::kHistorically: return "H";
    default: return "";
  }
}

void print(std::ostream& os, const Formula& f) {
  switch (f->op) {
    case Op::kPredicate:
      os << f->predicate->id;
      return;
    case Op::kTrue:
      os << "true";
      return;
    default:
      break;
  }
  os << op_name(f->op);
  if (f->interval) os << '[' << f->interval->lo << ',' << f->interval->hi << ']';
  os << '(';
  print(os, f->lhs);
  if (f->rhs) {
    os << ", ";
    print(os, f->rhs);
  }
  os << ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  require(f);
  std::ostringstream os;
  print(os, f);
  return os.str();
}

Window future_window(const std::optional<Interval>& I, int k, int K) {
  const long lo = I ? static_cast<long>(k) + I->lo : k;
  const long hi = I ? static_cast<long>(k) + I->hi : K;
  return Window{static_cast<int>(std::max<long>(lo, 0)), static_cast<int>(std::min<long>(hi, K))};
}

Window past_window(const std::optional<Interval>& I, int k, int K) {
  const long lo = I ? static_cast<long>(k) - I->hi : 0;
  const long hi = I ? static_cast<long>(k) - I->lo : k;
  return Window{static_cast<int>(std::max<long>(lo, 0)), static_cast<int>(std::min<long>(hi, K))};
}

namespace {

class BooleanMonitor {
 public:
  explicit BooleanMonitor(const Trace& trace) : trace_(trace), K_(trace.K()) {}

  bool at(const Formula& f, int k) {
    auto& row = memo_[f.get()];
    if (row.empty()) row.assign(static_cast<std::size_t>(K_ + 1), -1);
    auto& slot = row[static_cast<std::size_t>(k)];
    if (slot < 0) slot = compute(f, k) ? 1 : 0;
    return slot == 1;
  }

 private:
  bool compute(const Formula& f, int k) {
    switch (f->op) {
      case Op::kPredicate:
        return f->predicate->evaluate(trace_, k) >= 0.0;
      case Op::kTrue:
        return true;
      case Op::kNot:
        return !at(f->lhs, k);
      case Op::kAnd:
        return at(f->lhs, k) && at(f->rhs, k);
      case Op::kOr:
        return at(f->lhs, k) || at(f->rhs, k);
      case Op::kImplies:
        return !at(f->lhs, k) || at(f->rhs, k);
      case Op::kUntil: {
        const Window w = future_window(f->interval, k, K_);
        for (int kp = w.first; kp <= w.last; ++kp) {
          if (!at(f->rhs, kp)) continue;
          bool hold = true;
          for (int kpp = k; kpp < kp && hold; ++kpp) hold = at(f->lhs, kpp);
          if (hold) return true;
        }
        return false;
      }
      case Op::kSince: {
        const Window w = past_window(f->interval, k, K_);
        for (int kp = w.first; kp <= w.last; ++kp) {
          if (!at(f->rhs, kp)) continue;
          bool hold = true;
          for (int kpp = kp + 1; kpp <= k && hold; ++kpp) hold = at(f->lhs, kpp);
          if (hold) return true;
        }
        return false;
      }
      case Op::kEventually:
      case Op::kOnce: {
        const Window w = f->op == Op::kEventually ? future_window(f->interval, k, K_)
                                                  : past_window(f->interval, k, K_);
        for (int kp = w.first; kp <= w.last; ++kp) {
          if (at(f->lhs, kp)) return true;
        }
        return false;
      }
      case Op::kGlobally:
      case Op::kHistorically: {
        const Window w = f->op == Op::kGlobally ? future_window(f->interval, k, K_)
                                                : past_window(f->interval, k, K_);
        for (int kp = w.first; kp <= w.last; ++kp) {
          if (!at(f->lhs, kp)) return false;
        }
        return true;
      }
    }
    throw std::logic_error("unhandled operator");
  }

  const Trace& trace_;
  int K_;
  std::unordered_map<const Node*, std::vector<signed char>> memo_;
};

}  // namespace

bool boolean_sat(const Formula& f, const Trace& trace, int k) {
  require(f);
  if (k < 0 || k > trace.K()) {
    throw std::out_of_range("time index " + std::to_string(k) + " outside [0, " +
                            std::to_string(trace.K()) + "]");
  }
  BooleanMonitor monitor(trace);
  return monitor.at(f, k);
}

void PredicateRegistry::add(PredicatePtr p) {
  if (!p) throw std::invalid_argument("null predicate");
  by_id_[p->id] = std::move(p);
}

PredicatePtr PredicateRegistry::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

std::vector<std::string> PredicateRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(by_id_.size());
  for (const auto& [id, _] : by_id_) out.push_back(id);
  return out;
}

}  // namespace lexplan::stl
