#pragma once

#include <span>
#include <string>
#include <vector>

namespace ellsys {

/// Arithmetic over x components and gradient entries, used for user-defined F and f.
///
/// Grammar: numbers, + - * / ^ (right-associative), unary minus, parentheses, the
/// functions sin cos tanh exp, the constant pi, and variables x1..xn and Qbj
/// (1-based: Q11 is dQ of component 1 along axis 1). Variables live in one slot
/// array: x1..xn first, then Q row-major.
class Expression {
public:
    /// n space dimensions; N components for Q variables (0 disables Q).
    static Expression parse(const std::string& text, int n, int N = 0);

    double evaluate(std::span<const double> slots) const;
    const std::string& text() const { return text_; }
    bool uses_q() const { return uses_q_; }

    static int slot_count(int n, int N) { return n + N * n; }

private:
    enum class Op { number, variable, neg, add, sub, mul, div, pow, sin, cos, tanh, exp };
    struct Node {
        Op op;
        double value = 0.0;
        int slot = -1;
        int lhs = -1;
        int rhs = -1;
    };
    friend class ExpressionParser;

    double eval_node(int i, std::span<const double> slots) const;

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;
    bool uses_q_ = false;
};

}  // namespace ellsys
