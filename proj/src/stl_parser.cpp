#include "lexplan/stl_parser.hpp"

#include <cctype>
#include <map>
#include <vector>

namespace lexplan::stl {

namespace {

enum class Kw { kNot, kAnd, kOr, kImplies, kF, kG, kO, kH, kU, kS };

const std::map<std::string, Kw, std::less<>>& keywords() {
  static const std::map<std::string, Kw, std::less<>> table = {
      {"not", Kw::kNot},         {"and", Kw::kAnd},        {"or", Kw::kOr},
      {"implies", Kw::kImplies}, {"F", Kw::kF},            {"eventually", Kw::kF},
      {"G", Kw::kG},             {"globally", Kw::kG},     {"always", Kw::kG},
      {"O", Kw::kO},             {"once", Kw::kO},         {"H", Kw::kH},
      {"historically", Kw::kH},  {"U", Kw::kU},            {"until", Kw::kU},
      {"S", Kw::kS},             {"since", Kw::kS},
  };
  return table;
}

class Parser {
 public:
  Parser(std::string_view text, const PredicateRegistry& registry)
      : text_(text), registry_(registry) {}

  Formula parse() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  int natural() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected non-negative integer");
    }
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000'000L) fail("interval bound too large");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  std::optional<Interval> maybe_interval() {
    if (!peek('[')) return std::nullopt;
    ++pos_;
    const int lo = natural();
    expect(',');
    const int hi = natural();
    if (lo > hi) fail("interval lower bound exceeds upper bound");
    expect(']');
    return Interval(lo, hi);
  }

  std::vector<Formula> arguments() {
    expect('(');
    std::vector<Formula> args{formula()};
    while (peek(',')) {
      ++pos_;
      args.push_back(formula());
    }
    expect(')');
    return args;
  }

  Formula formula() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string word = identifier();
    auto kw = keywords().find(word);
    if (kw == keywords().end() || !(peek('(') || peek('['))) {
      if (word == "true") return top();
      if (kw != keywords().end()) {
        pos_ = start;
        fail("operator '" + word + "' needs arguments");
      }
      auto p = registry_.find(word);
      if (!p) {
        pos_ = start;
        fail("unknown predicate '" + word + "'");
      }
      return pred(p);
    }

    std::optional<Interval> I;
    const Kw k = kw->second;
    const bool temporal = k == Kw::kF || k == Kw::kG || k == Kw::kO || k == Kw::kH ||
                          k == Kw::kU || k == Kw::kS;
    if (temporal) {
      I = maybe_interval();
    } else if (peek('[')) {
      fail("operator '" + word + "' does not take an interval");
    }
    const std::size_t args_at = pos_;
    auto args = arguments();
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        pos_ = args_at;
        fail("operator '" + word + "' expects " + std::to_string(n) + " argument(s), got " +
             std::to_string(args.size()));
      }
    };

    switch (k) {
      case Kw::kNot:
        arity(1);
        return neg(args[0]);
      case Kw::kAnd:
      case Kw::kOr: {
        if (args.size() < 2) {
          pos_ = args_at;
          fail("operator '" + word + "' expects at least 2 arguments");
        }
        Formula acc = args[0];
        for (std::size_t i = 1; i < args.size(); ++i) {
          acc = k == Kw::kAnd ? conj(acc, args[i]) : disj(acc, args[i]);
        }
        return acc;
      }
      case Kw::kImplies:
        arity(2);
        return implies(args[0], args[1]);
      case Kw::kF:
        arity(1);
        return eventually(args[0], I);
      case Kw::kG:
        arity(1);
        return globally(args[0], I);
      case Kw::kO:
        arity(1);
        return once(args[0], I);
      case Kw::kH:
        arity(1);
        return historically(args[0], I);
      case Kw::kU:
        arity(2);
        return until(args[0], args[1], I);
      case Kw::kS:
        arity(2);
        return since(args[0], args[1], I);
    }
    fail("unhandled operator");
  }

  std::string_view text_;
  const PredicateRegistry& registry_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const PredicateRegistry& registry) {
  return Parser(text, registry).parse();
}

}  // namespace lexplan::stl
