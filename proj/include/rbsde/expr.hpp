#pragma once

#include <memory>
#include <string>

#include "rbsde/errors.hpp"

// Small arithmetic language for scenario data, evaluated per tree node over
// the coordinates (n, t, W):
//
//   cmp     := sum (('<'|'<='|'>'|'>='|'=='|'!=') sum)?   -> 0/1 indicator
//   sum     := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | primary
//   primary := number | 'n' | 't' | 'W' | fn '(' cmp {',' cmp} ')' | '(' cmp ')'
//   fn      := max | min | abs | exp
//
// No path-history access beyond W: data stays adapted by construction.

namespace rbsde {

class Expr {
 public:
  struct Node;

  // Throws ScenarioParseError with a 1-based column on bad input.
  static Expr parse(const std::string& text);

  double eval(double n, double t, double w) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace rbsde
