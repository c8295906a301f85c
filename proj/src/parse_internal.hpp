#pragma once

// Lexer and recursive-descent expression parser shared by the expression
// and scenario-file front ends.

#include <string>
#include <string_view>
#include <vector>

#include "symred/errors.hpp"
#include "symred/expr.hpp"

namespace symred::detail {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, lbracket, rbracket, comma, equals,
                 newline, end };

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string_view describe(Tok kind);

// Newlines inside () or [] are skipped so arrays may span lines; '#' starts
// a comment that runs to the end of the line.
std::vector<Token> tokenize(std::string_view text);

[[noreturn]] void fail_at(const Token& tok, const std::string& message, std::vector<std::string> expected = {});
[[noreturn]] void invalid_at(std::size_t line, std::size_t column, const std::string& message);

inline constexpr int kMaxDepth = 200;
inline constexpr int kMaxExponent = 64;

class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, std::size_t pos = 0) : toks_(toks), pos_(pos) {}

    expr::NodePtr parse_expr();
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    std::size_t position() const { return pos_; }
    const Token& expect(Tok kind, std::vector<std::string> expected);

private:
    expr::NodePtr parse_term();
    expr::NodePtr parse_unary();
    expr::NodePtr parse_power();
    expr::NodePtr parse_primary();
    void enter();
    void leave() { --depth_; }

    const std::vector<Token>& toks_;
    std::size_t pos_;
    int depth_ = 0;
};

} // namespace symred::detail
