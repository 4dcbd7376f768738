#include "dice/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "dice/errors.hpp"

namespace dice {
namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(pos, std::string("expected ") + what);
    }
};

struct Parser {
    Lexer lx;
    ParseMode mode;

    ExprAst parse_expr() {
        ExprAst lhs = parse_term();
        while (true) {
            if (lx.accept('+')) {
                ExprAst node;
                node.kind = AstKind::Add;
                node.kids = {std::move(lhs), parse_term()};
                lhs = std::move(node);
            } else if (lx.accept('-')) {
                ExprAst node;
                node.kind = AstKind::Sub;
                node.kids = {std::move(lhs), parse_term()};
                lhs = std::move(node);
            } else {
                return lhs;
            }
        }
    }

    ExprAst parse_term() {
        ExprAst lhs = parse_factor();
        while (true) {
            if (lx.accept('*')) {
                ExprAst node;
                node.kind = AstKind::Mul;
                node.kids = {std::move(lhs), parse_factor()};
                lhs = std::move(node);
            } else if (lx.accept('/')) {
                ExprAst node;
                node.kind = AstKind::Div;
                node.kids = {std::move(lhs), parse_factor()};
                lhs = std::move(node);
            } else {
                return lhs;
            }
        }
    }

    ExprAst parse_factor() {
        if (lx.accept('-')) {
            ExprAst node;
                node.kind = AstKind::Negate;
            node.kids = {parse_factor()};
            return node;
        }
        ExprAst base = parse_atom();
        if (lx.accept('^')) {
            std::size_t at = lx.pos;
            if (lx.peek() == '-') throw ParseError(at, "negative exponent");
            long v = parse_uint("exponent");
            if (lx.pos < lx.text.size() && lx.text[lx.pos] == '.')
                throw ParseError(at, "fractional exponent");
            ExprAst node;
                node.kind = AstKind::Pow;
            node.exponent = static_cast<int>(v);
            node.kids = {std::move(base)};
            return node;
        }
        return base;
    }

    long parse_uint(const char* what) {
        lx.skip_ws();
        std::size_t at = lx.pos;
        if (at >= lx.text.size() || !std::isdigit(static_cast<unsigned char>(lx.text[at])))
            throw ParseError(at, std::string("expected ") + what);
        long v = 0;
        while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
            v = v * 10 + (lx.text[lx.pos] - '0');
            if (v > 1000000) throw ParseError(at, std::string(what) + " too large");
            ++lx.pos;
        }
        return v;
    }

    double parse_number() {
        lx.skip_ws();
        std::size_t at = lx.pos;
        std::size_t end = at;
        while (end < lx.text.size() &&
               (std::isdigit(static_cast<unsigned char>(lx.text[end])) || lx.text[end] == '.'))
            ++end;
        if (end == at) throw ParseError(at, "expected number");
        std::string s(lx.text.substr(at, end - at));
        char* stop = nullptr;
        double v = std::strtod(s.c_str(), &stop);
        if (stop != s.c_str() + s.size()) throw ParseError(at, "malformed number");
        lx.pos = end;
        return v;
    }

    ExprAst parse_atom() {
        lx.skip_ws();
        std::size_t at = lx.pos;
        if (at >= lx.text.size()) throw ParseError(at, "unexpected end of input");
        char c = lx.text[at];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            ExprAst node;
                node.kind = AstKind::Constant;
            node.value = parse_number();
            return node;
        }
        if (c == '(') {
            ++lx.pos;
            ExprAst inner = parse_expr();
            lx.expect(')', "')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = at;
            while (end < lx.text.size() &&
                   std::isalpha(static_cast<unsigned char>(lx.text[end])))
                ++end;
            std::string_view word = lx.text.substr(at, end - at);
            if (word == "sqrt") {
                lx.pos = end;
                lx.expect('(', "'(' after sqrt");
                double v = parse_number();
                lx.expect(')', "')'");
                if (v < 0.0) throw ParseError(at, "sqrt of negative number");
                ExprAst node;
                node.kind = AstKind::Constant;
                node.value = std::sqrt(v);
                return node;
            }
            if (word == "p") {
                lx.pos = end;
                ExprAst node;
                node.kind = AstKind::Variable;
                if (lx.pos < lx.text.size() &&
                    std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
                    long idx = parse_uint("variable index");
                    if (idx > mode.m)
                        throw ParseError(at, "variable index " + std::to_string(idx) +
                                                 " exceeds m=" + std::to_string(mode.m));
                    node.var = static_cast<int>(idx);
                } else {
                    if (!mode.univariate)
                        throw ParseError(at, "bare 'p' is only valid in univariate mode");
                    node.var = 1;  // alias: p means p_1; p_0 = 1-p enters via homogenization
                }
                return node;
            }
            throw ParseError(at, "unknown identifier '" + std::string(word) + "'");
        }
        throw ParseError(at, std::string("unexpected character '") + c + "'");
    }
};

void print_rec(const ExprAst& a, std::string& out) {
    char buf[64];
    switch (a.kind) {
        case AstKind::Constant:
            std::snprintf(buf, sizeof(buf), "%.17g", a.value);
            out += buf;
            break;
        case AstKind::Variable:
            out += "p" + std::to_string(a.var);
            break;
        case AstKind::Add:
        case AstKind::Sub:
        case AstKind::Mul:
        case AstKind::Div: {
            const char* op = a.kind == AstKind::Add   ? "+"
                             : a.kind == AstKind::Sub ? "-"
                             : a.kind == AstKind::Mul ? "*"
                                                      : "/";
            out += "(";
            print_rec(a.kids[0], out);
            out += op;
            print_rec(a.kids[1], out);
            out += ")";
            break;
        }
        case AstKind::Pow:
            out += "(";
            print_rec(a.kids[0], out);
            out += "^" + std::to_string(a.exponent);
            out += ")";
            break;
        case AstKind::Negate:
            out += "(-";
            print_rec(a.kids[0], out);
            out += ")";
            break;
    }
}

// Bottom-up fraction arithmetic: every node becomes (numerator, denominator).
std::pair<Polynomial, Polynomial> to_fraction(const ExprAst& a, int nvars) {
    switch (a.kind) {
        case AstKind::Constant:
            return {Polynomial::constant(nvars, a.value), Polynomial::constant(nvars, 1.0)};
        case AstKind::Variable:
            return {Polynomial::variable(nvars, a.var), Polynomial::constant(nvars, 1.0)};
        case AstKind::Add:
        case AstKind::Sub: {
            auto [an, ad] = to_fraction(a.kids[0], nvars);
            auto [bn, bd] = to_fraction(a.kids[1], nvars);
            Polynomial num = a.kind == AstKind::Add ? an * bd + bn * ad : an * bd - bn * ad;
            return {std::move(num), ad * bd};
        }
        case AstKind::Mul: {
            auto [an, ad] = to_fraction(a.kids[0], nvars);
            auto [bn, bd] = to_fraction(a.kids[1], nvars);
            return {an * bn, ad * bd};
        }
        case AstKind::Div: {
            auto [an, ad] = to_fraction(a.kids[0], nvars);
            auto [bn, bd] = to_fraction(a.kids[1], nvars);
            if (bn.is_zero()) throw EvalError("division by the zero polynomial");
            return {an * bd, ad * bn};
        }
        case AstKind::Pow: {
            auto [n, d] = to_fraction(a.kids[0], nvars);
            return {n.pow(a.exponent), d.pow(a.exponent)};
        }
        case AstKind::Negate: {
            auto [n, d] = to_fraction(a.kids[0], nvars);
            return {n * -1.0, std::move(d)};
        }
    }
    throw Error("unreachable");
}

}  // namespace

ExprAst parse(std::string_view text, const ParseMode& mode) {
    if (text.empty()) throw ParseError(0, "empty expression");
    Parser p{Lexer{text}, mode};
    ExprAst ast = p.parse_expr();
    if (!p.lx.eof()) throw ParseError(p.lx.pos, "trailing input");
    return ast;
}

std::string pretty_print(const ExprAst& ast) {
    std::string out;
    print_rec(ast, out);
    return out;
}

double evaluate(const ExprAst& a, std::span<const double> point) {
    switch (a.kind) {
        case AstKind::Constant:
            return a.value;
        case AstKind::Variable:
            return point[a.var];
        case AstKind::Add:
            return evaluate(a.kids[0], point) + evaluate(a.kids[1], point);
        case AstKind::Sub:
            return evaluate(a.kids[0], point) - evaluate(a.kids[1], point);
        case AstKind::Mul:
            return evaluate(a.kids[0], point) * evaluate(a.kids[1], point);
        case AstKind::Div: {
            double d = evaluate(a.kids[1], point);
            if (d == 0.0) throw EvalError("division by zero at evaluation point");
            return evaluate(a.kids[0], point) / d;
        }
        case AstKind::Pow:
            return std::pow(evaluate(a.kids[0], point), a.exponent);
        case AstKind::Negate:
            return -evaluate(a.kids[0], point);
    }
    throw Error("unreachable");
}

double RationalTarget::eval_entry(int i, std::span<const double> point) const {
    double den = entries[i].second.eval(point);
    if (den == 0.0) throw EvalError("denominator vanishes at evaluation point");
    return entries[i].first.eval(point) / den;
}

RationalTarget to_rational_target(const std::vector<ExprAst>& asts, int m, int v,
                                  bool synthesize_last) {
    const std::size_t want = synthesize_last ? static_cast<std::size_t>(v)
                                             : static_cast<std::size_t>(v) + 1;
    if (asts.size() != want)
        throw ConfigError("expected " + std::to_string(want) + " expressions, got " +
                          std::to_string(asts.size()));
    RationalTarget f;
    f.m = m;
    f.v = v;
    const int nvars = m + 1;
    for (const ExprAst& a : asts) {
        auto [num, den] = to_fraction(a, nvars);
        if (den.is_zero()) throw EvalError("division by the zero polynomial");
        f.entries.emplace_back(std::move(num), std::move(den));
    }
    if (synthesize_last) {
        // 1 - sum of the others over the plain product denominator.
        Polynomial den = Polynomial::constant(nvars, 1.0);
        for (const auto& [dn, dd] : f.entries) den = den * dd;
        Polynomial num = den;
        for (std::size_t i = 0; i < f.entries.size(); ++i) {
            Polynomial cross = f.entries[i].first;
            for (std::size_t j = 0; j < f.entries.size(); ++j)
                if (j != i) cross = cross * f.entries[j].second;
            num = num - cross;
        }
        f.entries.emplace_back(std::move(num), std::move(den));
    }
    return f;
}

RationalTarget parse_target(const std::vector<std::string>& exprs, int m, int v,
                            bool synthesize_last) {
    ParseMode mode{m, m == 1};
    std::vector<ExprAst> asts;
    asts.reserve(exprs.size());
    for (const std::string& s : exprs) asts.push_back(parse(s, mode));
    return to_rational_target(asts, m, v, synthesize_last);
}

}  // namespace dice
