#include "doctest.h"

#include "lexplan/lexscalar.hpp"

#include <random>
#include <set>

using namespace lexplan;
using namespace lexplan::lex;
using rob::ExtReal;

namespace {

std::vector<std::vector<int>> all_vectors(const std::vector<int>& m) {
  std::vector<std::vector<int>> out{{}};
  for (int mi : m) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      for (int v = 0; v <= mi; ++v) {
        auto w = prefix;
        w.push_back(v);
        next.push_back(std::move(w));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("violation cost") {
  CHECK(violation_cost(ExtReal(2.5)).to_double() == 0.0);
  CHECK(violation_cost(ExtReal(-6.5)).to_double() == 6.5);
  CHECK(violation_cost(ExtReal::neg_inf()).is_pos_inf());
  CHECK(violation_cost(ExtReal::pos_inf()).to_double() == 0.0);
  CHECK(violation_cost(ExtReal(-0.0)).nonnegative());
}

TEST_CASE("discretization intervals close on the right") {
  const auto s = uniform_thresholds(10.0, 3);
  REQUIRE(s.thresholds() == std::vector<double>{5.0, 10.0});
  CHECK(s.discretize(ExtReal(0.0)) == 0);
  CHECK(s.discretize(ExtReal(1e-12)) == 1);
  CHECK(s.discretize(ExtReal(5.0)) == 1);
  CHECK(s.discretize(ExtReal(5.0000001)) == 2);
  CHECK(s.discretize(ExtReal(10.0)) == 2);
  CHECK(s.discretize(ExtReal(10.5)) == 3);
  CHECK(s.discretize(ExtReal::pos_inf()) == 3);
  CHECK_THROWS_AS(s.discretize(ExtReal(-1.0)), std::invalid_argument);

  DiscretizationScheme prog({7.0, 14.0});
  CHECK(prog.discretize(ExtReal(5.8)) == 1);
  CHECK(prog.discretize(ExtReal(6.5)) == 1);
}

TEST_CASE("uniform thresholds") {
  CHECK(uniform_thresholds(10, 2).thresholds() == std::vector<double>{10});
  const auto eleven = uniform_thresholds(10, 11).thresholds();
  REQUIRE(eleven.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(eleven[i] == doctest::Approx(i + 1.0));
  CHECK(uniform_thresholds(10, 1).single_interval());
  CHECK(uniform_thresholds(10, 1).m() == 1);
  CHECK_THROWS_AS(uniform_thresholds(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(uniform_thresholds(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationScheme({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationScheme({0.0}), std::invalid_argument);
}

TEST_CASE("discretization is monotone") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(0, 12);
  const auto s = uniform_thresholds(10.0, 7);
  for (int i = 0; i < 10000; ++i) {
    double a = c(rng), b = c(rng);
    if (a > b) std::swap(a, b);
    CHECK(s.discretize(ExtReal(a)) <= s.discretize(ExtReal(b)));
  }
}

TEST_CASE("layout word widths") {
  const auto L = make_layout({1, 6, 3});
  CHECK(L.b == std::vector<int>{1, 3, 2});
  CHECK(L.B == std::vector<int>{5, 2, 0});
  CHECK(L.total_bits == 6);
  CHECK(make_layout({1}).b[0] == 1);
  CHECK(make_layout({7}).b[0] == 3);
  CHECK(make_layout({8}).b[0] == 4);
  CHECK(make_layout({1023}).b[0] == 10);
  CHECK_THROWS_AS(make_layout({}), std::invalid_argument);
  CHECK_THROWS_AS(make_layout({0}), std::invalid_argument);
}

TEST_CASE("running example scalar costs") {
  const auto L = make_layout({1, 6, 3});
  CHECK(pack({0, 1, 1}, L) == 5);
  CHECK(pack({0, 1, 2}, L) == 6);
  CHECK(pack({0, 5, 0}, L) == 20);
  CHECK(pack({1, 4, 0}, L) == 48);
  CHECK(pack({0, 0, 0}, L) == 0);
  CHECK(weighted_sum({0, 1, 4}, L) == 8);
  // 4 does not fit a 2-bit field
  CHECK_THROWS_AS(pack({0, 1, 4}, L), std::invalid_argument);
  CHECK(lex_compare({0, 1, 1}, {0, 1, 2}) == std::strong_ordering::less);
  CHECK(lex_compare({1, 4, 0}, {0, 5, 0}) == std::strong_ordering::greater);
  CHECK(lex_compare({1, 4, 0}, {1, 4, 0}) == std::strong_ordering::equal);
  CHECK_THROWS_AS(lex_compare({1}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(pack({1, 2}, L), std::invalid_argument);
}

TEST_CASE("order representation, exhaustive for m = (1, 6, 3)") {
  const std::vector<int> m{1, 6, 3};
  const auto L = make_layout(m);
  const auto vs = all_vectors(m);
  REQUIRE(vs.size() == 56);
  std::set<ScalarCost> images;
  for (const auto& a : vs) {
    images.insert(pack(a, L));
    CHECK(unpack(pack(a, L), L) == a);
    for (const auto& b : vs) {
      CHECK(lex_compare(a, b) == compare(pack(a, L), pack(b, L)));
    }
  }
  CHECK(images.size() == vs.size());
}

TEST_CASE("order representation, randomized layouts") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> n(1, 16);
  std::uniform_int_distribution<int> level(1, 1023);
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<int> m(static_cast<std::size_t>(n(rng)));
    for (auto& x : m) x = level(rng);
    const auto L = make_layout(m);
    std::vector<int> a(m.size()), b(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      a[i] = std::uniform_int_distribution<int>(0, m[i])(rng);
      // share a random prefix so that late differences get tested
      b[i] = (i < m.size() / 2 && trial % 2) ? a[i] : std::uniform_int_distribution<int>(0, m[i])(rng);
    }
    const auto pa = pack(a, L);
    const auto pb = pack(b, L);
    CHECK(lex_compare(a, b) == compare(pa, pb));
    CHECK(unpack(pa, L) == a);
    CHECK(pa < (ScalarCost(1) << L.total_bits));
  }
}

TEST_CASE("residual sum below the first differing field") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n(1, 16);
  std::uniform_int_distribution<int> level(1, 1023);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> m(static_cast<std::size_t>(n(rng)));
    for (auto& x : m) x = level(rng);
    const auto L = make_layout(m);
    for (std::size_t istar = 0; istar < m.size(); ++istar) {
      ScalarCost sum = 0;
      for (std::size_t i = istar + 1; i < m.size(); ++i) {
        sum += ((ScalarCost(1) << L.b[i]) - 1) << L.B[i];
      }
      CHECK(sum == (ScalarCost(1) << L.B[istar]) - 1);
    }
  }
}

TEST_CASE("spec set pipeline") {
  auto p = stl::make_predicate("x_pos", [](const stl::Trace& t, int k) { return t(0, k); });
  auto q = stl::make_predicate("x_big", [](const stl::Trace& t, int k) { return t(0, k) - 10.0; });
  const auto space = rob::measure_preset("space");
  SpecSet set({
      {"safe", stl::globally(stl::pred(p)), space, uniform_thresholds(10, 2)},
      {"far", stl::eventually(stl::pred(q)), space, uniform_thresholds(10, 6)},
  });
  CHECK(set.layout().b == std::vector<int>{2, 3});

  Eigen::MatrixXd m(1, 3);
  m << 1, 2, 3;
  const auto r = set.evaluate(stl::Trace(m, 0.1));
  CHECK(r.discrete == std::vector<int>{0, 4});
  CHECK(r.continuous[1].to_double() == 7.0);
  CHECK(r.scalar == 4);

  m << 11, 12, 13;
  CHECK(set.scalar_cost(stl::Trace(m, 0.1)) == 0);
  m << -1, 12, 13;
  CHECK(set.evaluate(stl::Trace(m, 0.1)).discrete == std::vector<int>{1, 0});
  CHECK(to_decimal(set.scalar_cost(stl::Trace(m, 0.1))) == "8");
}
