#include "doctest.h"

#include "lexplan/stl.hpp"
#include "lexplan/stl_parser.hpp"
#include "support.hpp"

#include <random>

using namespace lexplan;
using namespace lexplan::stl;

namespace {

Trace row_trace(std::vector<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return Trace(m, 0.2);
}

PredicatePtr row0() {
  return make_predicate("mu", [](const Trace& t, int k) { return t(0, k); });
}

}  // namespace

TEST_CASE("trace validation") {
  CHECK_THROWS_AS(Trace(Eigen::MatrixXd::Zero(1, 1), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(Trace(Eigen::MatrixXd::Zero(1, 3), 0.0), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 3);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Trace(bad, 0.1), std::invalid_argument);
  Trace t(Eigen::MatrixXd::Zero(2, 5), 0.2);
  CHECK(t.K() == 4);
  CHECK(t.n_y() == 2);
}

TEST_CASE("interval validation") {
  CHECK_THROWS_AS(Interval(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(Interval(-1, 2), std::invalid_argument);
  CHECK_NOTHROW(Interval(2, 2));
}

TEST_CASE("normalize rewrites derived operators") {
  auto mu = pred(row0());
  auto f = normalize(eventually(mu, Interval(0, 3)));
  REQUIRE(f->op == Op::kUntil);
  CHECK(f->lhs->op == Op::kTrue);
  CHECK(f->rhs == mu);
  CHECK(f->interval == Interval(0, 3));

  auto g = normalize(globally(mu));
  REQUIRE(g->op == Op::kNot);
  REQUIRE(g->lhs->op == Op::kUntil);
  CHECK(g->lhs->lhs->op == Op::kTrue);
  CHECK(g->lhs->rhs->op == Op::kNot);
  CHECK(!g->lhs->interval.has_value());

  CHECK(normalize(mu) == mu);
  CHECK(is_normalized(normalize(implies(mu, historically(disj(mu, once(mu)))))));
}

TEST_CASE("boolean semantics basics") {
  auto mu = pred(row0());
  CHECK(boolean_sat(mu, row_trace({0.0, -1.0}), 0));
  CHECK(!boolean_sat(mu, row_trace({0.0, -1.0}), 1));
  CHECK(boolean_sat(globally(mu), row_trace({1, 1, 1, 1}), 0));
  CHECK(!boolean_sat(globally(mu), row_trace({1, 1, -1, 1}), 0));
  CHECK(boolean_sat(eventually(mu, Interval(2, 3)), row_trace({-1, -1, -1, 1}), 0));
  CHECK_THROWS_AS(boolean_sat(mu, row_trace({1, 1}), 2), std::out_of_range);
}

TEST_CASE("empty windows: until false, globally true") {
  auto mu = pred(row0());
  auto t = row_trace({1, 1, 1});
  CHECK(!boolean_sat(until(top(), mu, Interval(5, 6)), t, 0));
  CHECK(!boolean_sat(eventually(mu, Interval(5, 6)), t, 0));
  CHECK(boolean_sat(globally(neg(mu), Interval(5, 6)), t, 0));
  CHECK(boolean_sat(historically(neg(mu), Interval(3, 4)), t, 1));
}

TEST_CASE("until and since follow the discrete definitions") {
  auto a = make_predicate("a", [](const Trace& t, int k) { return t(0, k); });
  auto b = make_predicate("b", [](const Trace& t, int k) { return t(1, k); });
  Eigen::MatrixXd m(2, 5);
  m << 1, 1, -1, 1, 1,
      -1, -1, 1, -1, -1;
  Trace t(m, 1.0);
  // b first holds at 2, a holds on [0, 2)
  CHECK(boolean_sat(until(pred(a), pred(b)), t, 0));
  CHECK(!boolean_sat(until(pred(a), pred(b), Interval(3, 4)), t, 0));
  // since at k=4: b at 2, a on (2, 4]
  CHECK(boolean_sat(since(pred(a), pred(b)), t, 4));
  CHECK(!boolean_sat(since(pred(a), pred(b)), t, 1));
}

TEST_CASE("normalization and De Morgan preserve the Boolean verdict") {
  std::mt19937_64 rng(7);
  auto preds = testing::row_predicates(3);
  testing::FormulaGen gen{rng, preds};
  std::uniform_int_distribution<int> horizon(1, 12);
  for (int trial = 0; trial < 3000; ++trial) {
    const Trace tr = testing::random_trace(rng, 3, horizon(rng));
    auto f = gen(4);
    auto g = gen(3);
    auto nf = normalize(f);
    REQUIRE(is_normalized(nf));
    for (int k = 0; k <= tr.K(); ++k) {
      CHECK(boolean_sat(f, tr, k) == boolean_sat(nf, tr, k));
      CHECK(boolean_sat(neg(conj(f, g)), tr, k) == boolean_sat(disj(neg(f), neg(g)), tr, k));
    }
  }
}

TEST_CASE("formula printing round-trips through the parser") {
  std::mt19937_64 rng(3);
  auto preds = testing::row_predicates(2);
  PredicateRegistry reg;
  for (auto& p : preds) reg.add(p);
  testing::FormulaGen gen{rng, preds};
  for (int i = 0; i < 500; ++i) {
    auto f = gen(4);
    auto back = parse_formula(to_string(f), reg);
    CHECK(equal(f, back));
  }
}

TEST_CASE("parser syntax") {
  PredicateRegistry reg;
  reg.add(make_predicate("mu_a", [](const Trace&, int) { return 1.0; }));
  reg.add(make_predicate("mu_b", [](const Trace&, int) { return -1.0; }));

  auto f = parse_formula("G[0,15](and(mu_a, not(mu_b)))", reg);
  CHECK(to_string(f) == "G[0,15](and(mu_a, not(mu_b)))");
  CHECK(to_string(parse_formula(" always ( until[1,2](true , mu_a) ) ", reg)) ==
        "G(U[1,2](true, mu_a))");
  CHECK(to_string(parse_formula("or(mu_a, mu_b, mu_a)", reg)) == "or(or(mu_a, mu_b), mu_a)");

  CHECK_THROWS_AS(parse_formula("mu_c", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("G[3,1](mu_a)", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("not(mu_a, mu_b)", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("and(mu_a)", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("not[1,2](mu_a)", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("F(mu_a))", reg), ParseError);
  CHECK_THROWS_AS(parse_formula("G", reg), ParseError);
  try {
    parse_formula("and(mu_a, bogus)", reg);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 10);
  }
}
