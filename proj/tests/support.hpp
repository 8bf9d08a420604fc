#pragma once

// Random generators and brute-force references shared by the test binaries.

#include "lexplan/robustness.hpp"
#include "lexplan/stl.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <vector>

namespace lexplan::testing {

/// Traces with n_rows signal rows; entries snap to 0 with probability 0.1 so
/// that the p = 0 boundary gets exercised.
inline stl::Trace random_trace(std::mt19937_64& rng, int n_rows, int K, double amp = 2.0) {
  std::uniform_real_distribution<double> val(-amp, amp);
  std::bernoulli_distribution zero(0.1);
  Eigen::MatrixXd m(n_rows, K + 1);
  for (int r = 0; r < n_rows; ++r) {
    for (int k = 0; k <= K; ++k) m(r, k) = zero(rng) ? 0.0 : val(rng);
  }
  return stl::Trace(m, 0.1);
}

/// Predicate i reads row i; the "neg" variants return -row, which yields -0
/// on zero entries.
inline std::vector<stl::PredicatePtr> row_predicates(int n_rows) {
  std::vector<stl::PredicatePtr> out;
  for (int r = 0; r < n_rows; ++r) {
    out.push_back(stl::make_predicate("p" + std::to_string(r),
                                      [r](const stl::Trace& t, int k) { return t(r, k); }));
    out.push_back(stl::make_predicate("n" + std::to_string(r),
                                      [r](const stl::Trace& t, int k) { return -t(r, k); }));
  }
  return out;
}

struct FormulaGen {
  std::mt19937_64& rng;
  std::vector<stl::PredicatePtr> preds;
  int max_interval = 8;
  /// Negation-normal form: Not only directly above a predicate, no Implies.
  bool nnf = false;

  std::optional<stl::Interval> interval() {
    std::uniform_int_distribution<int> pick(0, 3);
    if (pick(rng) == 0) return std::nullopt;
    std::uniform_int_distribution<int> lo(0, max_interval);
    const int a = lo(rng);
    std::uniform_int_distribution<int> len(0, max_interval);
    return stl::Interval(a, a + len(rng));
  }

  stl::Formula leaf() {
    std::uniform_int_distribution<std::size_t> pick(0, preds.size() - 1);
    std::uniform_int_distribution<int> kind(0, 9);
    const int c = kind(rng);
    if (c == 0) return stl::top();
    auto p = stl::pred(preds[pick(rng)]);
    if (nnf && c == 1) return stl::neg(p);
    return p;
  }

  stl::Formula operator()(int depth) {
    std::uniform_int_distribution<int> pick(0, 11);
    if (depth <= 0) return leaf();
    switch (pick(rng)) {
      case 0: return leaf();
      case 1: return nnf ? (*this)(depth - 1) : stl::neg((*this)(depth - 1));
      case 2: return stl::conj((*this)(depth - 1), (*this)(depth - 1));
      case 3: return stl::disj((*this)(depth - 1), (*this)(depth - 1));
      case 4:
        return nnf ? stl::conj((*this)(depth - 1), (*this)(depth - 1))
                   : stl::implies((*this)(depth - 1), (*this)(depth - 1));
      case 5: return stl::until((*this)(depth - 1), (*this)(depth - 1), interval());
      case 6: return stl::since((*this)(depth - 1), (*this)(depth - 1), interval());
      case 7: return stl::eventually((*this)(depth - 1), interval());
      case 8: return stl::globally((*this)(depth - 1), interval());
      case 9: return stl::once((*this)(depth - 1), interval());
      case 10: return stl::historically((*this)(depth - 1), interval());
      default: return stl::conj((*this)(depth - 1), stl::eventually((*this)(depth - 1), interval()));
    }
  }
};

/// Literal reading of the predicate-robustness table: every tau in the allowed
/// range is tested on its own (no early exit), the largest feasible one wins.
inline double brute_force_predicate_robustness(rob::PredicateMeasure m, const std::vector<double>& p,
                                               int k) {
  const int K = static_cast<int>(p.size()) - 1;
  const bool s = p[k] >= 0.0;
  auto same = [&](int t) { return (p[t] >= 0.0) == s; };
  int cap = 0;
  switch (m) {
    case rob::PredicateMeasure::kSpace: return p[k] + 0.0;
    case rob::PredicateMeasure::kLeftTime:
    case rob::PredicateMeasure::kSpaceLeftTime: cap = K - k; break;
    case rob::PredicateMeasure::kRightTime: cap = k; break;
    case rob::PredicateMeasure::kCombTime: cap = std::max(k, K - k); break;
  }
  double best = -1.0;
  for (int tau = 0; tau <= cap; ++tau) {
    int lo = k;
    int hi = k;
    if (m == rob::PredicateMeasure::kLeftTime || m == rob::PredicateMeasure::kSpaceLeftTime) hi = k + tau;
    if (m == rob::PredicateMeasure::kRightTime) lo = k - tau;
    if (m == rob::PredicateMeasure::kCombTime) {
      lo = k - tau;
      hi = k + tau;
    }
    bool ok = true;
    for (int t = std::max(lo, 0); t <= std::min(hi, K); ++t) ok = ok && same(t);
    if (!ok) continue;
    const double v = m == rob::PredicateMeasure::kSpaceLeftTime ? tau + std::abs(p[k + tau])
                                                                 : static_cast<double>(tau);
    best = std::max(best, v);
  }
  return s ? best : -best;
}

}  // namespace lexplan::testing
