#include "lexplan/lexscalar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lexplan::lex {

std::string to_decimal(const ScalarCost& s) { return s.str(); }

std::strong_ordering compare(const ScalarCost& a, const ScalarCost& b) {
  const int c = a.compare(b);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

rob::ExtReal violation_cost(const rob::ExtReal& eta) {
  if (eta.nonnegative()) return rob::ExtReal(0.0);
  if (eta.is_neg_inf()) return rob::ExtReal::pos_inf();
  // -0 (violated with zero margin) has zero cost
  return rob::ExtReal(-eta.to_double() + 0.0);
}

rob::ExtReal violation_cost(const rob::MeasureConfig& config, const stl::Formula& formula,
                            const stl::Trace& trace) {
  return violation_cost(rob::robustness(config, formula, trace, 0));
}

DiscretizationScheme::DiscretizationScheme(std::vector<double> thresholds)
    : alphas_(std::move(thresholds)) {
  double prev = 0.0;
  for (double a : alphas_) {
    if (!std::isfinite(a) || !(a > prev)) {
      throw std::invalid_argument("violation thresholds must be finite, positive and strictly increasing");
    }
    prev = a;
  }
}

int DiscretizationScheme::discretize(const rob::ExtReal& cost) const {
  if (cost.negative()) throw std::invalid_argument("violation cost must be nonnegative");
  if (cost.is_pos_inf()) return m();
  const double c = cost.to_double();
  if (c == 0.0) return 0;
  // number of thresholds strictly below c, plus one
  return 1 + static_cast<int>(std::lower_bound(alphas_.begin(), alphas_.end(), c) - alphas_.begin());
}

DiscretizationScheme uniform_thresholds(double c_bar, int m) {
  if (!(c_bar > 0.0) || !std::isfinite(c_bar)) throw std::invalid_argument("c_bar must be positive");
  if (m < 1) throw std::invalid_argument("need at least one violation interval");
  std::vector<double> alphas;
  for (int xi = 1; xi < m; ++xi) alphas.push_back(c_bar * xi / (m - 1));
  return DiscretizationScheme(std::move(alphas));
}

Layout make_layout(const std::vector<int>& levels) {
  if (levels.empty()) throw std::invalid_argument("layout needs at least one component");
  Layout L;
  L.m = levels;
  L.b.resize(levels.size());
  L.B.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw std::invalid_argument("every component needs m >= 1");
    L.b[i] = static_cast<int>(std::bit_width(static_cast<unsigned>(levels[i])));
  }
  int offset = 0;
  for (std::size_t i = levels.size(); i-- > 0;) {
    L.B[i] = offset;
    offset += L.b[i];
  }
  L.total_bits = offset;
  return L;
}

namespace {

void check_size(const std::vector<int>& v, const Layout& L) {
  if (v.size() != L.size()) {
    throw std::invalid_argument("cost vector has " + std::to_string(v.size()) +
                                " components, layout has " + std::to_string(L.size()));
  }
}

}  // namespace

ScalarCost pack(const std::vector<int>& v, const Layout& L) {
  check_size(v, L);
  ScalarCost s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0 || v[i] > L.m[i]) {
      throw std::invalid_argument("component " + std::to_string(i) + " = " + std::to_string(v[i]) +
                                  " outside [0, " + std::to_string(L.m[i]) + "]");
    }
    s <<= L.b[i];
    s |= v[i];
  }
  return s;
}

std::vector<int> unpack(const ScalarCost& value, const Layout& L) {
  if (value < 0 || (value != 0 && static_cast<int>(boost::multiprecision::msb(value)) >= L.total_bits)) {
    throw std::invalid_argument("scalar cost does not fit the layout");
  }
  std::vector<int> out(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    const ScalarCost mask = (ScalarCost(1) << L.b[i]) - 1;
    out[i] = static_cast<int>((value >> L.B[i]) & mask);
  }
  return out;
}

ScalarCost weighted_sum(const std::vector<int>& v, const Layout& L) {
  check_size(v, L);
  ScalarCost s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0) throw std::invalid_argument("negative cost component");
    s += ScalarCost(v[i]) << L.B[i];
  }
  return s;
}

std::strong_ordering lex_compare(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cost vectors differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

SpecSet::SpecSet(std::vector<Spec> specs, bool cache_predicates) : specs_(std::move(specs)) {
  if (specs_.empty()) throw std::invalid_argument("spec set needs at least one specification");
  std::vector<int> levels;
  for (const auto& s : specs_) {
    evaluators_.emplace_back(s.measure, s.formula, cache_predicates);
    levels.push_back(s.scheme.m());
  }
  layout_ = make_layout(levels);
}

CostBreakdown SpecSet::evaluate(const stl::Trace& trace, rob::EvalStats* stats) const {
  CostBreakdown out;
  out.robustness.reserve(specs_.size());
  out.continuous.reserve(specs_.size());
  out.discrete.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const rob::ExtReal eta = evaluators_[i].robustness(trace, 0, stats);
    const rob::ExtReal c = violation_cost(eta);
    out.robustness.push_back(eta);
    out.continuous.push_back(c);
    out.discrete.push_back(specs_[i].scheme.discretize(c));
  }
  out.scalar = pack(out.discrete, layout_);
  return out;
}

}  // namespace lexplan::lex
