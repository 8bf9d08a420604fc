#pragma once

// Signal temporal logic: traces, formulas, and Boolean satisfaction.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lexplan::stl {

/// Output trajectory y over discrete times 0..K. Column k holds y_k.
class Trace {
 public:
  Trace() = default;
  /// Throws std::invalid_argument unless values has at least two columns,
  /// all entries are finite, and dt > 0.
  Trace(Eigen::MatrixXd values, double dt);

  int K() const { return static_cast<int>(values_.cols()) - 1; }
  int n_y() const { return static_cast<int>(values_.rows()); }
  double dt() const { return dt_; }
  double operator()(int row, int k) const { return values_(row, k); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::VectorXd column(int k) const { return values_.col(k); }

  bool operator==(const Trace& other) const {
    return dt_ == other.dt_ && values_.rows() == other.values_.rows() &&
           values_.cols() == other.values_.cols() && values_ == other.values_;
  }

 private:
  Eigen::MatrixXd values_;
  double dt_ = 1.0;
};

/// Closed window [lo, hi] of discrete time offsets.
struct Interval {
  int lo = 0;
  int hi = 0;

  Interval() = default;
  Interval(int lo_, int hi_);  // throws std::invalid_argument unless 0 <= lo <= hi
  bool operator==(const Interval&) const = default;
};

/// Atomic proposition p(y, k) >= 0.
struct Predicate {
  std::string id;
  std::function<double(const Trace&, int)> evaluate;
};

using PredicatePtr = std::shared_ptr<const Predicate>;

PredicatePtr make_predicate(std::string id, std::function<double(const Trace&, int)> fn);

enum class Op {
  kPredicate,
  kTrue,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kUntil,
  kSince,
  kEventually,
  kGlobally,
  kOnce,
  kHistorically,
};

struct Node;
using Formula = std::shared_ptr<const Node>;

/// Immutable formula node. Temporal nodes without an interval range over the
/// full horizon [0, K] of whatever trace they are evaluated on.
struct Node {
  Op op = Op::kTrue;
  PredicatePtr predicate;            // kPredicate only
  std::optional<Interval> interval;  // temporal operators only
  Formula lhs;                       // unary operand, or left operand
  Formula rhs;                       // right operand of binary operators
};

Formula pred(PredicatePtr p);
Formula top();
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula until(Formula a, Formula b, std::optional<Interval> I = std::nullopt);
Formula since(Formula a, Formula b, std::optional<Interval> I = std::nullopt);
Formula eventually(Formula f, std::optional<Interval> I = std::nullopt);
Formula globally(Formula f, std::optional<Interval> I = std::nullopt);
Formula once(Formula f, std::optional<Interval> I = std::nullopt);
Formula historically(Formula f, std::optional<Interval> I = std::nullopt);

bool is_temporal(Op op);
bool is_core(Op op);

/// Rewrites Or, Implies, F, G, O, H into Predicate/True/Not/And/Until/Since.
Formula normalize(const Formula& f);

/// True when f only contains core-grammar nodes.
bool is_normalized(const Formula& f);

/// Structural equality (predicates compared by identity).
bool equal(const Formula& a, const Formula& b);

/// Prefix text form accepted by parse_formula().
std::string to_string(const Formula& f);

/// Time indices (k + I) ∩ [0, K] for future operators, (k - I) ∩ [0, K] for
/// past ones, in increasing order. Empty when the window misses the horizon.
struct Window {
  int first = 0;
  int last = -1;
  bool empty() const { return last < first; }
  int size() const { return empty() ? 0 : last - first + 1; }
};
Window future_window(const std::optional<Interval>& I, int k, int K);
Window past_window(const std::optional<Interval>& I, int k, int K);

/// Discrete-time Boolean satisfaction (y, k) |= f. A predicate holds iff
/// p(y, k) >= 0. An empty temporal window makes Until/Since/F/O false and
/// G/H true. Throws std::out_of_range unless 0 <= k <= K.
bool boolean_sat(const Formula& f, const Trace& trace, int k);

/// Predicates by id, consumed by the formula parser.
class PredicateRegistry {
 public:
  void add(PredicatePtr p);
  PredicatePtr find(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PredicatePtr> by_id_;
};

}  // namespace lexplan::stl
