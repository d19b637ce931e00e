#pragma once

// Tiny expression grammar for user-supplied nonlinearities p(s, t, u):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := number | 's' | 't' | 'u' | func '(' expr ')' | '(' expr ')' | '-' factor
//   func   in {sin, cos, atan, tanh, abs, exp}
// parse -> print -> parse is a fixed point; evaluation is total on finite
// inputs (IEEE semantics for division).

#include <memory>
#include <string>

#include "fucik/errors.hpp"

namespace fucik {

class PExpression {
  public:
    static PExpression parse(const std::string& source);

    double eval(double s, double t, double u) const;
    std::string print() const;
    const std::string& source() const { return source_; }

    struct Node;

  private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace fucik
