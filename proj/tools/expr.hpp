#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Tiny expression parser for CLI inputs: numbers, `t`, `pi`, + - * / ^,
// parentheses, and sin/cos/tan/sqrt/exp/log/abs. Expressions either evaluate
// as functions of t or, when they stay within polynomial operations, convert
// to a dense coefficient list.

namespace frenet::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Variable, Unary, Binary, Call } kind;
    double number = 0.0;
    char op = 0;             // + - * / ^ for Binary, '-' for Unary
    std::string callee;      // for Call
    NodePtr left, right;     // Unary/Call use left only
};

// Parses the expression; throws std::invalid_argument on syntax errors.
NodePtr parse(const std::string& text);

double eval(const NodePtr& node, double t);

// Ascending coefficient list; throws when the expression is not polynomial
// in t (calls, division by non-constants, fractional powers).
std::vector<double> to_polynomial(const NodePtr& node);

// True when the expression references t.
bool depends_on_t(const NodePtr& node);

// Convenience: parse and wrap as a std::function.
std::function<double(double)> parse_function(const std::string& text);

// Parse a plain number (allowing expressions like 2*pi).
double parse_number(const std::string& text);

}  // namespace frenet::expr
