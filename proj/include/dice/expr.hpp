#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dice/poly.hpp"

namespace dice {

enum class AstKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Negate };

struct ExprAst {
    AstKind kind = AstKind::Constant;
    double value = 0.0;  // Constant
    int var = -1;        // Variable: index into p_0..p_m
    int exponent = 0;    // Pow
    std::vector<ExprAst> kids;

    bool operator==(const ExprAst&) const = default;
};

struct ParseMode {
    int m = 1;               // simplex dimension: variables p_0..p_m
    bool univariate = true;  // bare `p` aliases p_1
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' uint)? | '-' factor
//   atom   := number | 'sqrt' '(' number ')' | 'p' | 'p' uint | '(' expr ')'
// Whitespace insensitive; sqrt folds to a double at parse time.
ExprAst parse(std::string_view text, const ParseMode& mode);

// Fully parenthesized form that reparses to a structurally identical AST.
std::string pretty_print(const ExprAst& ast);

double evaluate(const ExprAst& ast, std::span<const double> simplex_point);

// f as a vector of polynomial fractions D_i / E_i over p_0..p_m.
struct RationalTarget {
    int m = 1;
    int v = 1;
    std::vector<std::pair<Polynomial, Polynomial>> entries;  // (D_i, E_i), v+1 of them

    double eval_entry(int i, std::span<const double> point) const;
};

// Normalizes each AST into a single fraction by bottom-up fraction
// arithmetic. With synthesize_last, v ASTs are given and the last entry is
// constructed as 1 - sum of the others.
RationalTarget to_rational_target(const std::vector<ExprAst>& asts, int m, int v,
                                  bool synthesize_last = false);

RationalTarget parse_target(const std::vector<std::string>& exprs, int m, int v,
                            bool synthesize_last = false);

}  // namespace dice
