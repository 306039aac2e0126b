#include "ellsys/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "ellsys/errors.hpp"

namespace ellsys {

class ExpressionParser {
public:
    ExpressionParser(const std::string& text, int n, int N, Expression& out) : s_(text), n_(n), N_(N), out_(out) {}

    int parse() {
        const int root = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return root;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Expression::Node node) {
        out_.nodes_.push_back(node);
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int binary(Op op, int l, int r) { return add({op, 0.0, -1, l, r}); }

    int expr() {
        int l = term();
        while (true) {
            if (eat('+')) l = binary(Op::add, l, term());
            else if (eat('-')) l = binary(Op::sub, l, term());
            else return l;
        }
    }

    int term() {
        int l = unary();
        while (true) {
            if (eat('*')) l = binary(Op::mul, l, unary());
            else if (eat('/')) l = binary(Op::div, l, unary());
            else return l;
        }
    }

    int unary() {
        if (eat('-')) return add({Op::neg, 0.0, -1, unary(), -1});
        if (eat('+')) return unary();
        return power();
    }

    int power() {
        const int base = primary();
        if (eat('^')) return binary(Op::pow, base, unary());
        return base;
    }

    int primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (eat('(')) {
            const int inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    int number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return add({Op::number, v, -1, -1, -1});
    }

    int name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string id = s_.substr(start, pos_ - start);
        if (id == "pi") return add({Op::number, std::numbers::pi, -1, -1, -1});
        for (const auto& [fname, op] : {std::pair{"sin", Op::sin}, std::pair{"cos", Op::cos},
                                        std::pair{"tanh", Op::tanh}, std::pair{"exp", Op::exp}}) {
            if (id == fname) {
                if (!eat('(')) fail("expected '(' after " + id);
                const int arg = expr();
                if (!eat(')')) fail("expected ')'");
                return add({op, 0.0, -1, arg, -1});
            }
        }
        if (id.size() == 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
            const int i = id[1] - '0';
            if (i < 1 || i > n_) fail("variable " + id + " out of range");
            return add({Op::variable, 0.0, i - 1, -1, -1});
        }
        if (id.size() == 3 && id[0] == 'Q' && std::isdigit(static_cast<unsigned char>(id[1])) &&
            std::isdigit(static_cast<unsigned char>(id[2]))) {
            const int b = id[1] - '0', j = id[2] - '0';
            if (N_ == 0) fail("gradient variables are not available here");
            if (b < 1 || b > N_ || j < 1 || j > n_) fail("variable " + id + " out of range");
            out_.uses_q_ = true;
            return add({Op::variable, 0.0, n_ + (b - 1) * n_ + (j - 1), -1, -1});
        }
        fail("unknown identifier '" + id + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int n_;
    int N_;
    Expression& out_;
};

Expression Expression::parse(const std::string& text, int n, int N) {
    Expression e;
    e.text_ = text;
    ExpressionParser p(e.text_, n, N, e);
    e.root_ = p.parse();
    return e;
}

double Expression::evaluate(std::span<const double> slots) const { return eval_node(root_, slots); }

double Expression::eval_node(int i, std::span<const double> slots) const {
    const Node& nd = nodes_[static_cast<std::size_t>(i)];
    switch (nd.op) {
        case Op::number: return nd.value;
        case Op::variable: return slots[static_cast<std::size_t>(nd.slot)];
        case Op::neg: return -eval_node(nd.lhs, slots);
        case Op::add: return eval_node(nd.lhs, slots) + eval_node(nd.rhs, slots);
        case Op::sub: return eval_node(nd.lhs, slots) - eval_node(nd.rhs, slots);
        case Op::mul: return eval_node(nd.lhs, slots) * eval_node(nd.rhs, slots);
        case Op::div: return eval_node(nd.lhs, slots) / eval_node(nd.rhs, slots);
        case Op::pow: return std::pow(eval_node(nd.lhs, slots), eval_node(nd.rhs, slots));
        case Op::sin: return std::sin(eval_node(nd.lhs, slots));
        case Op::cos: return std::cos(eval_node(nd.lhs, slots));
        case Op::tanh: return std::tanh(eval_node(nd.lhs, slots));
        case Op::exp: return std::exp(eval_node(nd.lhs, slots));
    }
    return 0.0;
}

}  // namespace ellsys
