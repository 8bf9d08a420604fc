#pragma once

// Quantitative STL semantics: extended reals, min/max operator families,
// predicate robustness functions and a compiled formula evaluator.

#include "lexplan/stl.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexplan::rob {

/// Real number extended by -inf and +inf, with an explicit kind tag.
///
/// Finite values keep their IEEE sign bit: the ordering puts -0 strictly below
/// +0, and -0 counts as negative. Time-based robustness values use -0 for
/// "violated for zero extra steps", which keeps them distinguishable from a
/// satisfied +0.
class ExtReal {
 public:
  enum class Kind : std::uint8_t { kNegInf, kFinite, kPosInf };

  constexpr ExtReal() = default;
  /// Accepts +-inf as the infinite kinds. Throws std::invalid_argument on NaN.
  ExtReal(double v);  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal pos_inf() { return ExtReal(Kind::kPosInf); }
  static constexpr ExtReal neg_inf() { return ExtReal(Kind::kNegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_pos_inf() const { return kind_ == Kind::kPosInf; }
  bool is_neg_inf() const { return kind_ == Kind::kNegInf; }
  /// +inf, or a finite value without sign bit (so +0 yes, -0 no).
  bool nonnegative() const;
  bool negative() const { return !nonnegative(); }
  bool is_zero() const { return is_finite() && v_ == 0.0; }
  /// Finite value, or +-infinity as a double.
  double to_double() const;

  ExtReal operator-() const;
  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b);
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  explicit constexpr ExtReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::kFinite;
  double v_ = 0.0;
};

std::string to_string(const ExtReal& x);

enum class PredicateMeasure { kSpace, kLeftTime, kRightTime, kCombTime, kSpaceLeftTime };
enum class OpFamily { kStd, kDur, kDurSev, kSmooth, kAgm, kNew, kPm };

/// Tuning constants of the smooth (nu1, nu2), new (nu3) and power-mean
/// (nu4, nu5) operators.
struct Nus {
  double nu1 = 10.0;
  double nu2 = 10.0;
  double nu3 = 1.0;
  double nu4 = 2.0;
  double nu5 = 2.0;
};

struct MeasureConfig {
  std::string name;
  PredicateMeasure predicate = PredicateMeasure::kSpace;
  OpFamily min_op = OpFamily::kStd;
  OpFamily max_op = OpFamily::kStd;
  Nus nu;

  /// Throws std::invalid_argument unless every nu is finite and positive.
  void validate() const;
};

/// Presets: space, left-time, right-time, comb-time, dur, dur-sev, smooth, agm,
/// new, pm, space-left-time. A few long aliases ("duration", "power-mean", ...)
/// are accepted too. Throws std::invalid_argument for unknown names.
MeasureConfig measure_preset(std::string_view name, Nus nu = {});
const std::vector<std::string>& measure_names();

/// Whether robustness < 0 implies Boolean violation for this measure.
bool reverse_sound(const MeasureConfig& config);

std::string to_string(PredicateMeasure m);
std::string to_string(OpFamily f);

/// Min/max operators. Throws std::invalid_argument on empty input.
ExtReal amin(OpFamily family, std::span<const ExtReal> values, const Nus& nu = {});
ExtReal amax(OpFamily family, std::span<const ExtReal> values, const Nus& nu = {});

/// Predicate robustness at k from the raw predicate values p(0..K).
/// p is called lazily; time measures scan only until the sign changes.
/// Throws std::out_of_range unless 0 <= k <= K, std::domain_error if p is NaN.
ExtReal predicate_robustness(PredicateMeasure measure, const std::function<double(int)>& p, int k,
                             int K);
ExtReal predicate_robustness(PredicateMeasure measure, const stl::Predicate& p,
                             const stl::Trace& trace, int k);

/// predicate_calls counts evaluations of the predicate functions;
/// predicate_lookups counts every value the semantics asked for, so the two
/// agree when caching is off.
struct EvalStats {
  long predicate_calls = 0;
  long predicate_lookups = 0;
};

/// A formula compiled against one measure. Immutable after construction, so a
/// single instance can be shared by threads; every call keeps its own memo.
///
/// Or, Implies and the unary temporal operators are evaluated directly
/// (F and O as amax over the window, G and H as amin). For every family
/// defined by duality this coincides with evaluating the normalized formula.
class Evaluator {
 public:
  /// cache_predicates: evaluate each (predicate, k) at most once per call.
  Evaluator(MeasureConfig config, stl::Formula formula, bool cache_predicates = true);

  ExtReal robustness(const stl::Trace& trace, int k, EvalStats* stats = nullptr) const;
  std::vector<ExtReal> all_times(const stl::Trace& trace, EvalStats* stats = nullptr) const;

  const MeasureConfig& config() const { return config_; }
  const stl::Formula& formula() const { return formula_; }
  int predicate_count() const { return static_cast<int>(predicates_.size()); }

 private:
  struct CNode {
    stl::Op op;
    int lhs = -1;
    int rhs = -1;
    int slot = -1;  // predicate slot
    std::optional<stl::Interval> interval;
    bool lhs_is_true = false;
  };
  struct Run;

  MeasureConfig config_;
  stl::Formula formula_;
  bool cache_predicates_;
  std::vector<CNode> nodes_;  // children precede parents; root is last
  std::vector<stl::PredicatePtr> predicates_;
};

ExtReal robustness(const MeasureConfig& config, const stl::Formula& formula,
                   const stl::Trace& trace, int k);
std::vector<ExtReal> robustness_all_times(const MeasureConfig& config, const stl::Formula& formula,
                                          const stl::Trace& trace);

}  // namespace lexplan::rob
