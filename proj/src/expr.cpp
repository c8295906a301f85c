#include "symred/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "parse_internal.hpp"

namespace symred {

namespace detail {

std::string_view describe(Tok kind) {
    switch (kind) {
        case Tok::number: return "number";
        case Tok::ident: return "identifier";
        case Tok::plus: return "'+'";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
        case Tok::slash: return "'/'";
        case Tok::caret: return "'^'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::lbracket: return "'['";
        case Tok::rbracket: return "']'";
        case Tok::comma: return "','";
        case Tok::equals: return "'='";
        case Tok::newline: return "end of line";
        case Tok::end: return "end of input";
    }
    return "token";
}

void fail_at(const Token& tok, const std::string& message, std::vector<std::string> expected) {
    throw SourceError(ErrorKind::ParseError, tok.line, tok.column, message, std::move(expected));
}

void invalid_at(std::size_t line, std::size_t column, const std::string& message) {
    throw SourceError(ErrorKind::ValidationError, line, column, message);
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c) || c == '.'; }

std::string printable(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) return std::string("'") + c + "'";
    static const char* hex = "0123456789abcdef";
    return std::string("byte 0x") + hex[u >> 4] + hex[u & 15];
}

} // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    int depth = 0;
    auto push = [&](Tok kind, std::size_t start, std::size_t len, std::size_t c) {
        out.push_back({kind, text.substr(start, len), 0.0, line, c});
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            if (depth == 0) push(Tok::newline, i, 1, col);
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i, start_col = col;
        if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
            while (i < text.size() && is_digit(text[i])) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                while (i < text.size() && is_digit(text[i])) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && is_digit(text[j])) {
                    i = j;
                    while (i < text.size() && is_digit(text[i])) ++i;
                }
            }
            Token tok{Tok::number, text.substr(start, i - start), 0.0, line, start_col};
            const char* first = text.data() + start;
            const char* last = text.data() + i;
            // from_chars rejects a leading '.', so parse ".5" as "0.5".
            std::string padded;
            if (*first == '.') {
                padded = "0" + std::string(first, last);
                first = padded.data();
                last = padded.data() + padded.size();
            }
            const auto res = std::from_chars(first, last, tok.number);
            if (res.ec != std::errc() || res.ptr != last || !std::isfinite(tok.number))
                fail_at(tok, "number out of range");
            out.push_back(tok);
            col += i - start;
            continue;
        }
        if (is_ident_start(c)) {
            while (i < text.size() && is_ident_char(text[i])) ++i;
            push(Tok::ident, start, i - start, start_col);
            col += i - start;
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::plus; break;
            case '-': kind = Tok::minus; break;
            case '*': kind = Tok::star; break;
            case '/': kind = Tok::slash; break;
            case '^': kind = Tok::caret; break;
            case '(': kind = Tok::lparen; ++depth; break;
            case ')': kind = Tok::rparen; depth = std::max(0, depth - 1); break;
            case '[': kind = Tok::lbracket; ++depth; break;
            case ']': kind = Tok::rbracket; depth = std::max(0, depth - 1); break;
            case ',': kind = Tok::comma; break;
            case '=': kind = Tok::equals; break;
            default: {
                Token bad{Tok::end, text.substr(i, 1), 0.0, line, col};
                fail_at(bad, "unexpected character " + printable(c));
            }
        }
        push(kind, i, 1, col);
        ++i;
        ++col;
    }
    out.push_back({Tok::end, {}, 0.0, line, col});
    return out;
}

namespace {

const std::vector<std::string> kOperand = {"number", "identifier", "'('", "'-'"};

std::optional<expr::Func> lookup_function(std::string_view name) {
    if (name == "sin") return expr::Func::sin;
    if (name == "cos") return expr::Func::cos;
    if (name == "exp") return expr::Func::exp;
    if (name == "sqrt") return expr::Func::sqrt;
    return std::nullopt;
}

bool constant_value(const expr::NodePtr& n, double& out) {
    expr::Expression e(n);
    if (!e.is_constant()) return false;
    out = e.eval({});
    return true;
}

} // namespace

void ExprParser::enter() {
    if (++depth_ > kMaxDepth) fail_at(peek(), "expression nested too deeply");
}

const Token& ExprParser::expect(Tok kind, std::vector<std::string> expected) {
    if (peek().kind != kind) {
        const Token& t = peek();
        fail_at(t, "unexpected " + std::string(t.kind == Tok::end || t.kind == Tok::newline ? describe(t.kind)
                                                                                            : "'" + std::string(t.text) + "'"),
                std::move(expected));
    }
    return advance();
}

expr::NodePtr ExprParser::parse_expr() {
    auto lhs = parse_term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
        const auto op = advance().kind == Tok::plus ? expr::BinaryOp::add : expr::BinaryOp::sub;
        lhs = expr::make_binary(op, lhs, parse_term());
    }
    return lhs;
}

expr::NodePtr ExprParser::parse_term() {
    auto lhs = parse_unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
        const auto op = advance().kind == Tok::star ? expr::BinaryOp::mul : expr::BinaryOp::div;
        lhs = expr::make_binary(op, lhs, parse_unary());
    }
    return lhs;
}

expr::NodePtr ExprParser::parse_unary() {
    enter();
    expr::NodePtr out;
    if (peek().kind == Tok::minus) {
        advance();
        out = expr::make_negate(parse_unary());
    } else {
        out = parse_power();
    }
    leave();
    return out;
}

expr::NodePtr ExprParser::parse_power() {
    auto base = parse_primary();
    if (peek().kind != Tok::caret) return base;
    advance();
    const Token& at = peek();
    auto exponent = parse_unary();
    double value = 0.0;
    if (!constant_value(exponent, value)) fail_at(at, "exponent must be a constant integer");
    if (!std::isfinite(value) || value != std::trunc(value) || std::abs(value) > kMaxExponent)
        fail_at(at, "exponent must be an integer between -64 and 64");
    return expr::make_binary(expr::BinaryOp::pow, base, exponent);
}

expr::NodePtr ExprParser::parse_primary() {
    const Token& tok = peek();
    switch (tok.kind) {
        case Tok::number:
            advance();
            return expr::make_number(tok.number);
        case Tok::lparen: {
            advance();
            auto inner = parse_expr();
            expect(Tok::rparen, {"')'", "operator"});
            return inner;
        }
        case Tok::ident: {
            advance();
            if (auto f = lookup_function(tok.text)) {
                expect(Tok::lparen, {"'('"});
                auto arg = parse_expr();
                expect(Tok::rparen, {"')'", "operator"});
                return expr::make_call(*f, arg);
            }
            const char head = tok.text.front();
            const std::string_view digits = tok.text.substr(1);
            int index = 0;
            const bool numeric = !digits.empty() && digits.front() != '0' &&
                                 std::all_of(digits.begin(), digits.end(), [](char c) { return is_digit(c); });
            if ((head == 'x' || head == 't' || head == 'w') && numeric) {
                const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
                if (res.ec == std::errc() && index >= 1) {
                    const auto kind = head == 'x' ? expr::VarKind::x : head == 't' ? expr::VarKind::t : expr::VarKind::w;
                    expr::Variable v{kind, index, tok.line, tok.column};
                    return std::make_shared<const expr::Node>(expr::Node{v});
                }
            }
            invalid_at(tok.line, tok.column, "unknown identifier '" + std::string(tok.text) + "'");
        }
        default: {
            const std::string what = tok.kind == Tok::end || tok.kind == Tok::newline ? std::string(describe(tok.kind))
                                                                                        : "'" + std::string(tok.text) + "'";
            fail_at(tok, "unexpected " + what, kOperand);
        }
    }
}

} // namespace detail

namespace expr {

NodePtr make_number(double v) { return std::make_shared<const Node>(Node{Number{v}}); }
NodePtr make_variable(VarKind kind, int index) { return std::make_shared<const Node>(Node{Variable{kind, index}}); }
NodePtr make_negate(NodePtr operand) { return std::make_shared<const Node>(Node{Negate{std::move(operand)}}); }
NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    return std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}});
}
NodePtr make_call(Func func, NodePtr arg) { return std::make_shared<const Node>(Node{Call{func, std::move(arg)}}); }

std::string_view function_name(Func f) {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::exp: return "exp";
        case Func::sqrt: return "sqrt";
    }
    return "?";
}

namespace {

double lookup(std::span<const double> vals, int index) {
    const auto i = static_cast<std::size_t>(index - 1);
    return i < vals.size() ? vals[i] : std::numeric_limits<double>::quiet_NaN();
}

double eval_node(const Node& n, const Env& env) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Number>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                switch (v.kind) {
                    case VarKind::x: return lookup(env.x, v.index);
                    case VarKind::t: return lookup(env.t, v.index);
                    case VarKind::w: return lookup(env.w, v.index);
                }
                return 0.0;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -eval_node(*v.operand, env);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double a = eval_node(*v.lhs, env);
                const double b = eval_node(*v.rhs, env);
                switch (v.op) {
                    case BinaryOp::add: return a + b;
                    case BinaryOp::sub: return a - b;
                    case BinaryOp::mul: return a * b;
                    case BinaryOp::div: return a / b;
                    case BinaryOp::pow: return std::pow(a, b);
                }
                return 0.0;
            } else {
                const double a = eval_node(*v.arg, env);
                switch (v.func) {
                    case Func::sin: return std::sin(a);
                    case Func::cos: return std::cos(a);
                    case Func::exp: return std::exp(a);
                    case Func::sqrt: return std::sqrt(a);
                }
                return 0.0;
            }
        },
        n.value);
}

int max_index_node(const Node& n, VarKind kind) {
    return std::visit(
        [&](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Number>) return 0;
            else if constexpr (std::is_same_v<T, Variable>) return v.kind == kind ? v.index : 0;
            else if constexpr (std::is_same_v<T, Negate>) return max_index_node(*v.operand, kind);
            else if constexpr (std::is_same_v<T, Binary>)
                return std::max(max_index_node(*v.lhs, kind), max_index_node(*v.rhs, kind));
            else return max_index_node(*v.arg, kind);
        },
        n.value);
}

// Binding strength: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
int strength(const Node& n) {
    if (const auto* b = std::get_if<Binary>(&n.value)) {
        switch (b->op) {
            case BinaryOp::add:
            case BinaryOp::sub: return 1;
            case BinaryOp::mul:
            case BinaryOp::div: return 2;
            case BinaryOp::pow: return 4;
        }
    }
    if (std::holds_alternative<Negate>(n.value)) return 3;
    return 5;
}

void print_node(const Node& n, std::string& out);

void print_at_least(const Node& n, int min_strength, std::string& out) {
    if (strength(n) < min_strength) {
        out += '(';
        print_node(n, out);
        out += ')';
    } else {
        print_node(n, out);
    }
}

void print_node(const Node& n, std::string& out) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Number>) {
                char buf[64];
                const auto res = std::to_chars(buf, buf + sizeof buf, v.value);
                out.append(buf, res.ptr);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += v.kind == VarKind::x ? 'x' : v.kind == VarKind::t ? 't' : 'w';
                out += std::to_string(v.index);
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print_at_least(*v.operand, 3, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (v.op) {
                    case BinaryOp::add:
                    case BinaryOp::sub:
                        print_at_least(*v.lhs, 1, out);
                        out += v.op == BinaryOp::add ? " + " : " - ";
                        print_at_least(*v.rhs, 2, out);
                        break;
                    case BinaryOp::mul:
                    case BinaryOp::div:
                        print_at_least(*v.lhs, 2, out);
                        out += v.op == BinaryOp::mul ? "*" : "/";
                        print_at_least(*v.rhs, 3, out);
                        break;
                    case BinaryOp::pow:
                        print_at_least(*v.lhs, 5, out);
                        out += '^';
                        print_at_least(*v.rhs, 3, out);
                        break;
                }
            } else {
                out += function_name(v.func);
                out += '(';
                print_node(*v.arg, out);
                out += ')';
            }
        },
        n.value);
}

} // namespace

double Expression::eval(const Env& env) const { return root_ ? eval_node(*root_, env) : 0.0; }

std::string Expression::to_string() const {
    std::string out;
    if (root_) print_node(*root_, out);
    return out;
}

int Expression::max_index(VarKind kind) const { return root_ ? max_index_node(*root_, kind) : 0; }

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return !a && !b;
    if (a->value.index() != b->value.index()) return false;
    return std::visit(
        [&](const auto& va) -> bool {
            using T = std::decay_t<decltype(va)>;
            const auto& vb = std::get<T>(b->value);
            if constexpr (std::is_same_v<T, Number>) return va.value == vb.value;
            else if constexpr (std::is_same_v<T, Variable>) return va.kind == vb.kind && va.index == vb.index;
            else if constexpr (std::is_same_v<T, Negate>) return structurally_equal(va.operand, vb.operand);
            else if constexpr (std::is_same_v<T, Binary>)
                return va.op == vb.op && structurally_equal(va.lhs, vb.lhs) && structurally_equal(va.rhs, vb.rhs);
            else return va.func == vb.func && structurally_equal(va.arg, vb.arg);
        },
        a->value);
}

Expression parse_expression(std::string_view text) {
    const auto toks = detail::tokenize(text);
    detail::ExprParser p(toks);
    // A bare expression may not span lines.
    if (p.peek().kind == detail::Tok::newline) detail::fail_at(p.peek(), "unexpected end of line", {"expression"});
    auto root = p.parse_expr();
    if (p.peek().kind != detail::Tok::end) {
        const auto& t = p.peek();
        detail::fail_at(t, "unexpected " + (t.kind == detail::Tok::newline ? std::string("end of line")
                                                                            : "'" + std::string(t.text) + "'"),
                        {"operator", "end of input"});
    }
    return Expression(std::move(root));
}

} // namespace expr
} // namespace symred
