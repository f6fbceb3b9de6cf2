#include "semiheat/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

namespace semiheat::expr {

std::string_view var_name(Var v) {
    switch (v) {
        case Var::x: return "x";
        case Var::t: return "t";
        case Var::u: return "u";
    }
    return "?";
}

std::string VarSet::to_string() const {
    std::string out = "{";
    for (Var v : {Var::x, Var::t, Var::u}) {
        if (!contains(v)) continue;
        if (out.size() > 1) out += ", ";
        out += var_name(v);
    }
    return out + "}";
}

double Point::get(Var v) const {
    switch (v) {
        case Var::x: return x;
        case Var::t: return t;
        case Var::u: return u;
    }
    return 0.0;
}

void Point::set(Var v, double value) {
    switch (v) {
        case Var::x: x = value; break;
        case Var::t: t = value; break;
        case Var::u: u = value; break;
    }
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------------------
// Lexer

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::number: return "number";
        case TokenKind::identifier: return "identifier";
        case TokenKind::plus: return "'+'";
        case TokenKind::minus: return "'-'";
        case TokenKind::star: return "'*'";
        case TokenKind::slash: return "'/'";
        case TokenKind::caret: return "'^'";
        case TokenKind::lparen: return "'('";
        case TokenKind::rparen: return "')'";
        case TokenKind::comma: return "','";
        case TokenKind::end: return "end of input";
    }
    return "?";
}

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            while (i < src.size() && is_digit(src[i])) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                while (i < src.size() && is_digit(src[i])) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && is_digit(src[j])) {
                    i = j;
                    while (i < src.size() && is_digit(src[i])) ++i;
                }
            }
            tokens.push_back({TokenKind::number, std::string(src.substr(start, i - start)), start});
            continue;
        }
        if (is_ident_start(c)) {
            while (i < src.size() && is_ident_char(src[i])) ++i;
            tokens.push_back({TokenKind::identifier, std::string(src.substr(start, i - start)), start});
            continue;
        }
        TokenKind kind;
        switch (c) {
            case '+': kind = TokenKind::plus; break;
            case '-': kind = TokenKind::minus; break;
            case '*': kind = TokenKind::star; break;
            case '/': kind = TokenKind::slash; break;
            case '^': kind = TokenKind::caret; break;
            case '(': kind = TokenKind::lparen; break;
            case ')': kind = TokenKind::rparen; break;
            case ',': kind = TokenKind::comma; break;
            default:
                throw ParseError(ParseError::Reason::syntax, start,
                                 std::string("unexpected character '") + c + "'");
        }
        tokens.push_back({kind, std::string(1, c), start});
        ++i;
    }
    tokens.push_back({TokenKind::end, "", src.size()});
    return tokens;
}

// ---------------------------------------------------------------------------
// Errors

namespace {

std::string parse_message(ParseError::Reason reason, std::size_t offset, const std::string& detail,
                          const std::vector<std::string>& expected) {
    std::ostringstream os;
    switch (reason) {
        case ParseError::Reason::syntax: os << "syntax error"; break;
        case ParseError::Reason::undeclared_variable: os << "undeclared variable"; break;
        case ParseError::Reason::unknown_function: os << "unknown function"; break;
        case ParseError::Reason::wrong_arity: os << "wrong number of arguments"; break;
    }
    os << " at column " << offset + 1 << " (byte offset " << offset << ")";
    if (!detail.empty()) os << ": " << detail;
    if (!expected.empty()) {
        os << "; expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) os << (i + 1 == expected.size() ? " or " : ", ");
            os << expected[i];
        }
    }
    return os.str();
}

}  // namespace

ParseError::ParseError(Reason reason, std::size_t offset, std::string detail, std::vector<std::string> expected)
    : std::runtime_error(parse_message(reason, offset, detail, expected)),
      reason_(reason),
      offset_(offset),
      expected_(std::move(expected)) {}

EvalError::EvalError(std::size_t position, const std::string& what)
    : std::runtime_error(what + " (at byte offset " + std::to_string(position) + ")"), position_(position) {}

// ---------------------------------------------------------------------------
// Functions

std::string_view func_name(Func f) {
    switch (f) {
        case Func::exp: return "exp";
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::abs: return "abs";
        case Func::sqrt: return "sqrt";
        case Func::min: return "min";
        case Func::max: return "max";
    }
    return "?";
}

std::optional<Func> lookup_func(std::string_view name) {
    for (Func f : {Func::exp, Func::sin, Func::cos, Func::abs, Func::sqrt, Func::min, Func::max}) {
        if (func_name(f) == name) return f;
    }
    return std::nullopt;
}

std::size_t func_arity(Func f) { return (f == Func::min || f == Func::max) ? 2 : 1; }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view src, VarSet allowed) : tokens_(tokenize(src)), allowed_(allowed) {}

    NodePtr parse_all() {
        NodePtr root = parse_expr();
        if (peek().kind != TokenKind::end) {
            throw ParseError(ParseError::Reason::syntax, peek().position,
                             "unexpected " + describe(peek()), {"operator", "end of input"});
        }
        return root;
    }

    VarSet used() const { return used_; }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }
    bool accept(TokenKind k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::end) return "end of input";
        return std::string(token_kind_name(t.kind)) + " '" + t.lexeme + "'";
    }

    static std::shared_ptr<Node> make(Node::Kind kind, std::size_t pos) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->position = pos;
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
            const Token& op = advance();
            auto n = make(Node::Kind::binary, op.position);
            n->op = op.lexeme[0];
            n->args = {lhs, parse_term()};
            lhs = n;
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (peek().kind == TokenKind::star || peek().kind == TokenKind::slash) {
            const Token& op = advance();
            auto n = make(Node::Kind::binary, op.position);
            n->op = op.lexeme[0];
            n->args = {lhs, parse_unary()};
            lhs = n;
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (peek().kind == TokenKind::minus) {
            const Token& op = advance();
            auto n = make(Node::Kind::negate, op.position);
            n->args = {parse_unary()};
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (peek().kind == TokenKind::caret) {
            const Token& op = advance();
            auto n = make(Node::Kind::binary, op.position);
            n->op = '^';
            n->args = {base, parse_unary()};
            return n;
        }
        return base;
    }

    NodePtr parse_atom() {
        const Token& tok = peek();
        switch (tok.kind) {
            case TokenKind::number: {
                advance();
                auto n = make(Node::Kind::constant, tok.position);
                const char* first = tok.lexeme.data();
                const char* last = first + tok.lexeme.size();
                auto [ptr, ec] = std::from_chars(first, last, n->value);
                if (ec != std::errc{} || ptr != last || !std::isfinite(n->value)) {
                    throw ParseError(ParseError::Reason::syntax, tok.position, "malformed number '" + tok.lexeme + "'");
                }
                return n;
            }
            case TokenKind::identifier: {
                advance();
                if (peek().kind == TokenKind::lparen) return parse_call(tok);
                return parse_variable(tok);
            }
            case TokenKind::lparen: {
                advance();
                NodePtr inner = parse_expr();
                expect(TokenKind::rparen, {"')'"});
                return inner;
            }
            default:
                throw ParseError(ParseError::Reason::syntax, tok.position, "unexpected " + describe(tok),
                                 {"number", "identifier", "'-'", "'('"});
        }
    }

    NodePtr parse_variable(const Token& tok) {
        Var v;
        if (tok.lexeme == "x") {
            v = Var::x;
        } else if (tok.lexeme == "t") {
            v = Var::t;
        } else if (tok.lexeme == "u") {
            v = Var::u;
        } else if (lookup_func(tok.lexeme)) {
            throw ParseError(ParseError::Reason::syntax, tok.position,
                             "function '" + tok.lexeme + "' used without arguments", {"'('"});
        } else {
            throw ParseError(ParseError::Reason::undeclared_variable, tok.position,
                             "'" + tok.lexeme + "' (allowed: " + allowed_.to_string() + ")");
        }
        if (!allowed_.contains(v)) {
            throw ParseError(ParseError::Reason::undeclared_variable, tok.position,
                             "'" + tok.lexeme + "' (allowed: " + allowed_.to_string() + ")");
        }
        used_.insert(v);
        auto n = make(Node::Kind::variable, tok.position);
        n->var = v;
        return n;
    }

    NodePtr parse_call(const Token& name) {
        auto f = lookup_func(name.lexeme);
        if (!f) {
            throw ParseError(ParseError::Reason::unknown_function, name.position,
                             "'" + name.lexeme + "' (known: exp, sin, cos, abs, sqrt, min, max)");
        }
        advance();  // '('
        auto n = make(Node::Kind::call, name.position);
        n->func = *f;
        n->args.push_back(parse_expr());
        while (accept(TokenKind::comma)) n->args.push_back(parse_expr());
        expect(TokenKind::rparen, {"','", "')'"});
        if (n->args.size() != func_arity(*f)) {
            throw ParseError(ParseError::Reason::wrong_arity, name.position,
                             "'" + name.lexeme + "' takes " + std::to_string(func_arity(*f)) + ", got " +
                                 std::to_string(n->args.size()));
        }
        return n;
    }

    void expect(TokenKind k, std::vector<std::string> expected) {
        if (peek().kind != k) {
            throw ParseError(ParseError::Reason::syntax, peek().position, "unexpected " + describe(peek()),
                             std::move(expected));
        }
        advance();
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    VarSet allowed_;
    VarSet used_;
};

void collect_vars(const Node& n, VarSet& out) {
    if (n.kind == Node::Kind::variable) out.insert(n.var);
    for (const auto& a : n.args) collect_vars(*a, out);
}

}  // namespace

Expr parse(std::string_view source, VarSet allowed) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError(ParseError::Reason::syntax, 0, "empty expression", {"number", "identifier", "'-'", "'('"});
    }
    Parser p(source, allowed);
    NodePtr root = p.parse_all();
    return Expr(std::move(root), std::string(source));
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {
    if (root_) collect_vars(*root_, vars_);
}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = value;
    return Expr(n, format_double(value));
}

namespace {

double checked(double v, const Node& n, const char* what) {
    if (!std::isfinite(v)) throw EvalError(n.position, std::string("non-finite result in ") + what);
    return v;
}

double real_power(double a, double b, const Node& n) {
    if (a > 0.0) return checked(std::pow(a, b), n, "'^'");
    if (a == 0.0) {
        if (b > 0.0) return 0.0;
        if (b == 0.0) throw EvalError(n.position, "domain error: 0^0 is undefined");
        throw EvalError(n.position, "domain error: 0 raised to a negative power");
    }
    if (b != std::trunc(b)) {
        throw EvalError(n.position, "domain error: negative base with non-integer exponent");
    }
    return checked(std::pow(a, b), n, "'^'");
}

double eval_node(const Node& n, const Point& p) {
    switch (n.kind) {
        case Node::Kind::constant: return n.value;
        case Node::Kind::variable: return p.get(n.var);
        case Node::Kind::negate: return -eval_node(*n.args[0], p);
        case Node::Kind::binary: {
            const double a = eval_node(*n.args[0], p);
            const double b = eval_node(*n.args[1], p);
            switch (n.op) {
                case '+': return checked(a + b, n, "'+'");
                case '-': return checked(a - b, n, "'-'");
                case '*': return checked(a * b, n, "'*'");
                case '/':
                    if (b == 0.0) throw EvalError(n.position, "division by zero");
                    return checked(a / b, n, "'/'");
                case '^': return real_power(a, b, n);
                default: throw EvalError(n.position, "unknown operator");
            }
        }
        case Node::Kind::call: {
            const double a = eval_node(*n.args[0], p);
            switch (n.func) {
                case Func::exp: return checked(std::exp(a), n, "exp");
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::abs: return std::fabs(a);
                case Func::sqrt:
                    if (a < 0.0) throw EvalError(n.position, "domain error: sqrt of negative number");
                    return std::sqrt(a);
                case Func::min: return std::min(a, eval_node(*n.args[1], p));
                case Func::max: return std::max(a, eval_node(*n.args[1], p));
            }
        }
    }
    throw EvalError(n.position, "malformed expression tree");
}

void render(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::constant: out += format_double(n.value); return;
        case Node::Kind::variable: out += var_name(n.var); return;
        case Node::Kind::negate:
            out += "(-";
            render(*n.args[0], out);
            out += ")";
            return;
        case Node::Kind::binary:
            out += "(";
            render(*n.args[0], out);
            out += ' ';
            out += n.op;
            out += ' ';
            render(*n.args[1], out);
            out += ")";
            return;
        case Node::Kind::call:
            out += func_name(n.func);
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                render(*n.args[i], out);
            }
            out += ")";
            return;
    }
}

}  // namespace

double Expr::eval(const Point& p) const {
    if (!root_) throw EvalError(0, "evaluating an empty expression");
    return eval_node(*root_, p);
}

std::string Expr::to_string() const {
    std::string out;
    if (root_) render(*root_, out);
    return out;
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case Node::Kind::constant:
            if (a.value != b.value) return false;
            break;
        case Node::Kind::variable:
            if (a.var != b.var) return false;
            break;
        case Node::Kind::binary:
            if (a.op != b.op) return false;
            break;
        case Node::Kind::call:
            if (a.func != b.func) return false;
            break;
        case Node::Kind::negate: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

double numeric_partial(const Expr& e, Var var, const Point& p, std::optional<double> step) {
    const double h = step.value_or(1e-6 * std::max(1.0, std::fabs(p.get(var))));
    Point lo = p;
    Point hi = p;
    lo.set(var, p.get(var) - h);
    hi.set(var, p.get(var) + h);
    return (e.eval(hi) - e.eval(lo)) / (2.0 * h);
}

}  // namespace semiheat::expr
