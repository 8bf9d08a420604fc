#pragma once

#include "lexplan/stl.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexplan::stl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses the prefix formula syntax
///
///   formula  := "true" | ident
///             | "not" "(" formula ")"
///             | ("and" | "or") "(" formula ("," formula)+ ")"     (left-folded)
///             | "implies" "(" formula "," formula ")"
///             | ("F" | "G" | "O" | "H") [interval] "(" formula ")"
///             | ("U" | "S") [interval] "(" formula "," formula ")"
///   interval := "[" nat "," nat "]"
///
/// Long names eventually/globally/always/once/historically/until/since are
/// accepted as aliases. A missing interval means the full horizon. Identifiers
/// are resolved through the registry; unknown ids raise ParseError.
Formula parse_formula(std::string_view text, const PredicateRegistry& registry);

}  // namespace lexplan::stl
