#pragma once

// Violation costs, quantization into violation intervals, and the bit-range
// packing that turns a prioritized cost vector into one exact integer.

#include "lexplan/robustness.hpp"
#include "lexplan/stl.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>
#include <vector>

namespace lexplan::lex {

using ScalarCost = boost::multiprecision::cpp_int;

std::string to_decimal(const ScalarCost& s);

std::strong_ordering compare(const ScalarCost& a, const ScalarCost& b);

/// c = -min(0, eta): zero when satisfied, +inf for eta = -inf.
rob::ExtReal violation_cost(const rob::ExtReal& robustness);
rob::ExtReal violation_cost(const rob::MeasureConfig& config, const stl::Formula& formula,
                            const stl::Trace& trace);

/// Violation intervals I_0 = [0, 0], I_xi = (alpha_{xi-1}, alpha_xi] and
/// I_m = (alpha_{m-1}, inf), with alpha_0 = 0.
class DiscretizationScheme {
 public:
  /// m = 1 with no thresholds: only "satisfied" vs "violated".
  DiscretizationScheme() = default;
  /// Throws std::invalid_argument unless thresholds are finite, positive and
  /// strictly increasing. m is thresholds.size() + 1.
  explicit DiscretizationScheme(std::vector<double> thresholds);

  int m() const { return static_cast<int>(alphas_.size()) + 1; }
  const std::vector<double>& thresholds() const { return alphas_; }
  bool single_interval() const { return alphas_.empty(); }

  /// Index xi of the interval containing cost; +inf maps to m. Throws
  /// std::invalid_argument for negative costs.
  int discretize(const rob::ExtReal& cost) const;

 private:
  std::vector<double> alphas_;
};

/// alpha_xi = c_bar * xi / (m - 1) for xi = 1..m-1. For m = 1 the
/// single-interval scheme is returned (check single_interval()).
/// Throws std::invalid_argument if c_bar <= 0 or m < 1.
DiscretizationScheme uniform_thresholds(double c_bar, int m);

/// Word widths b_i = ceil(log2(m_i + 1)) and offsets B_i = sum_{j>i} b_j.
struct Layout {
  std::vector<int> m;
  std::vector<int> b;
  std::vector<int> B;
  int total_bits = 0;

  std::size_t size() const { return m.size(); }
};

/// Throws std::invalid_argument if levels is empty or any m_i < 1.
Layout make_layout(const std::vector<int>& levels);

/// Exact packing. Throws std::invalid_argument on size mismatch or when a
/// component is outside [0, m_i].
ScalarCost pack(const std::vector<int>& discrete, const Layout& layout);
std::vector<int> unpack(const ScalarCost& value, const Layout& layout);

/// The plain weighted sum sum_i v_i * 2^{B_i} without range checks. Agrees
/// with pack() whenever every v_i <= m_i; above that, fields overlap.
ScalarCost weighted_sum(const std::vector<int>& discrete, const Layout& layout);

/// Lexicographic comparison; throws std::invalid_argument on length mismatch.
std::strong_ordering lex_compare(const std::vector<int>& a, const std::vector<int>& b);

struct Spec {
  std::string name;
  stl::Formula formula;
  rob::MeasureConfig measure;
  DiscretizationScheme scheme;
};

struct CostBreakdown {
  std::vector<rob::ExtReal> robustness;  // eta at k = 0
  std::vector<rob::ExtReal> continuous;
  std::vector<int> discrete;
  ScalarCost scalar;
};

/// Prioritized specifications, highest priority first. Formulas are compiled
/// once; the layout is computed once.
class SpecSet {
 public:
  explicit SpecSet(std::vector<Spec> specs, bool cache_predicates = true);

  std::size_t size() const { return specs_.size(); }
  const std::vector<Spec>& specs() const { return specs_; }
  const Layout& layout() const { return layout_; }

  CostBreakdown evaluate(const stl::Trace& trace, rob::EvalStats* stats = nullptr) const;
  ScalarCost scalar_cost(const stl::Trace& trace) const { return evaluate(trace).scalar; }

 private:
  std::vector<Spec> specs_;
  std::vector<rob::Evaluator> evaluators_;
  Layout layout_;
};

}  // namespace lexplan::lex
