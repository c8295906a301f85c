#pragma once

// A small expression language for chart fields:
//   literals, coordinates x1..xn, group parameters t1..tk, quotient
//   coordinates w1..wq, + - * /, unary -, ^ with constant integer exponents,
//   sin cos exp sqrt.
// Precedence: ^ binds tighter than unary minus, which binds tighter than
// * and /, then + and -. Binary operators associate left except ^.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace symred::expr {

enum class VarKind { x, t, w };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Func { sin, cos, exp, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value = 0.0;
};
struct Variable {
    VarKind kind = VarKind::x;
    int index = 1;  // 1-based, as written
    // Source position, ignored by structural equality.
    std::size_t line = 0;
    std::size_t column = 0;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op = BinaryOp::add;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Func func = Func::sin;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Call> value;
};

NodePtr make_number(double v);
NodePtr make_variable(VarKind kind, int index);
NodePtr make_negate(NodePtr operand);
NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr make_call(Func func, NodePtr arg);

struct Env {
    std::span<const double> x;
    std::span<const double> t;
    std::span<const double> w;
};

// Immutable compiled expression; cheap to copy and safe to share between threads.
class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    const NodePtr& root() const noexcept { return root_; }
    double eval(const Env& env) const;
    std::string to_string() const;

    // Largest index used for each variable kind (0 when unused).
    int max_index(VarKind kind) const;
    bool is_constant() const { return max_index(VarKind::x) == 0 && max_index(VarKind::t) == 0 &&
                                      max_index(VarKind::w) == 0; }

private:
    NodePtr root_;
};

bool structurally_equal(const NodePtr& a, const NodePtr& b);
inline bool operator==(const Expression& a, const Expression& b) { return structurally_equal(a.root(), b.root()); }

// Parses a complete expression. Throws SourceError (ParseError or
// ValidationError) with 1-based line and column.
Expression parse_expression(std::string_view text);

std::string_view function_name(Func f);

} // namespace symred::expr
