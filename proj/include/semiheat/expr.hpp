#pragma once

// Coefficient expression language: lexer, recursive-descent parser and a
// tree-walking evaluator over the free variables x, t and u.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          right associative, -x^2 == -(x^2)
//   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semiheat::expr {

enum class Var : std::uint8_t { x = 0, t = 1, u = 2 };

std::string_view var_name(Var v);

/// Small set of free variables.
class VarSet {
public:
    constexpr VarSet() = default;
    constexpr VarSet(std::initializer_list<Var> vars) {
        for (Var v : vars) insert(v);
    }
    constexpr void insert(Var v) { mask_ |= bit(v); }
    constexpr bool contains(Var v) const { return (mask_ & bit(v)) != 0; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr bool subset_of(VarSet other) const { return (mask_ & ~other.mask_) == 0; }
    constexpr VarSet operator|(VarSet o) const {
        VarSet r;
        r.mask_ = mask_ | o.mask_;
        return r;
    }
    constexpr bool operator==(const VarSet&) const = default;
    std::string to_string() const;

private:
    static constexpr std::uint8_t bit(Var v) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }
    std::uint8_t mask_ = 0;
};

/// Variable bindings for evaluation.
struct Point {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;

    double get(Var v) const;
    void set(Var v, double value);
};

// ---------------------------------------------------------------------------
// Lexer

enum class TokenKind { number, identifier, plus, minus, star, slash, caret, lparen, rparen, comma, end };

std::string_view token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string lexeme;
    std::size_t position;  // byte offset into the source
};

/// Splits `source` into tokens; the last token is always `end`.
std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// Errors

class ParseError : public std::runtime_error {
public:
    enum class Reason { syntax, undeclared_variable, unknown_function, wrong_arity };

    ParseError(Reason reason, std::size_t offset, std::string detail, std::vector<std::string> expected = {});

    Reason reason() const { return reason_; }
    /// Zero-based byte offset of the offending token.
    std::size_t offset() const { return offset_; }
    /// One-based column of the offending token, as printed in messages.
    std::size_t column() const { return offset_ + 1; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    Reason reason_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class EvalError : public std::runtime_error {
public:
    EvalError(std::size_t position, const std::string& what);
    /// Byte offset of the node that failed.
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// ---------------------------------------------------------------------------
// AST

enum class Func : std::uint8_t { exp, sin, cos, abs, sqrt, min, max };

std::string_view func_name(Func f);
std::optional<Func> lookup_func(std::string_view name);
std::size_t func_arity(Func f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind : std::uint8_t { constant, variable, negate, binary, call };

    Kind kind = Kind::constant;
    double value = 0.0;     // constant
    Var var = Var::x;       // variable
    char op = 0;            // binary: one of + - * / ^
    Func func = Func::exp;  // call
    std::vector<NodePtr> args;
    std::size_t position = 0;
};

bool structurally_equal(const Node& a, const Node& b);

/// Immutable parsed expression. Copies share the tree.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, std::string source);

    static Expr constant(double value);

    double eval(const Point& p) const;
    VarSet free_vars() const { return vars_; }
    bool depends_on(Var v) const { return vars_.contains(v); }
    bool is_constant() const { return vars_.empty(); }
    bool valid() const { return root_ != nullptr; }

    const Node& root() const { return *root_; }
    const std::string& source() const { return source_; }

    /// Fully parenthesised rendering that parses back to the same tree.
    std::string to_string() const;

private:
    NodePtr root_;
    VarSet vars_;
    std::string source_;
};

Expr parse(std::string_view source, VarSet allowed);

inline double eval(const Expr& e, const Point& p) { return e.eval(p); }

/// Central difference (e(p + h) - e(p - h)) / 2h along `var`.
/// Default step is 1e-6 * max(1, |p.var|).
double numeric_partial(const Expr& e, Var var, const Point& p, std::optional<double> step = std::nullopt);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace semiheat::expr
