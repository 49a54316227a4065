#include "expr.hpp"

#include <cctype>
#include <cstdlib>

namespace frenet::expr {

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            throw std::invalid_argument("expression: expected '" + std::string(1, c) + "' in \"" +
                                        text + "\"");
    }

    NodePtr parse_expr() {
        NodePtr node = parse_term();
        while (true) {
            if (accept('+')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Binary;
                n->op = '+';
                n->left = node;
                n->right = parse_term();
                node = n;
            } else if (accept('-')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Binary;
                n->op = '-';
                n->left = node;
                n->right = parse_term();
                node = n;
            } else {
                return node;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr node = parse_power();
        while (true) {
            if (accept('*')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Binary;
                n->op = '*';
                n->left = node;
                n->right = parse_power();
                node = n;
            } else if (accept('/')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Binary;
                n->op = '/';
                n->left = node;
                n->right = parse_power();
                node = n;
            } else {
                return node;
            }
        }
    }

    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (accept('^')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Binary;
            n->op = '^';
            n->left = base;
            n->right = parse_power();  // right associative
            return n;
        }
        return base;
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Unary;
            n->op = '-';
            n->left = parse_unary();
            return n;
        }
        (void)accept('+');
        return parse_primary();
    }

    NodePtr parse_primary() {
        char c = peek();
        if (c == '(') {
            expect('(');
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text.c_str() + pos;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) throw std::invalid_argument("expression: bad number in \"" + text + "\"");
            pos += static_cast<std::size_t>(end - start);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Number;
            n->number = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string name = text.substr(start, pos - start);
            if (name == "t") {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Variable;
                return n;
            }
            if (name == "pi") {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Number;
                n->number = 3.141592653589793238462643383279502884;
                return n;
            }
            if (peek() == '(') {
                expect('(');
                NodePtr arg = parse_expr();
                expect(')');
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Call;
                n->callee = name;
                n->left = arg;
                return n;
            }
            throw std::invalid_argument("expression: unknown identifier \"" + name + "\"");
        }
        throw std::invalid_argument("expression: unexpected character in \"" + text + "\"");
    }
};

double call(const std::string& name, double x) {
    if (name == "sin") return std::sin(x);
    if (name == "cos") return std::cos(x);
    if (name == "tan") return std::tan(x);
    if (name == "sqrt") return std::sqrt(x);
    if (name == "exp") return std::exp(x);
    if (name == "log") return std::log(x);
    if (name == "abs") return std::abs(x);
    throw std::invalid_argument("expression: unknown function \"" + name + "\"");
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace

NodePtr parse(const std::string& text) {
    Parser p(text);
    NodePtr node = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw std::invalid_argument("expression: trailing input in \"" + text + "\"");
    return node;
}

double eval(const NodePtr& node, double t) {
    switch (node->kind) {
        case Node::Kind::Number:
            return node->number;
        case Node::Kind::Variable:
            return t;
        case Node::Kind::Unary:
            return -eval(node->left, t);
        case Node::Kind::Call:
            return call(node->callee, eval(node->left, t));
        case Node::Kind::Binary: {
            double a = eval(node->left, t);
            double b = eval(node->right, t);
            switch (node->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
        }
    }
    throw std::logic_error("expression: malformed node");
}

std::vector<double> to_polynomial(const NodePtr& node) {
    switch (node->kind) {
        case Node::Kind::Number:
            return {node->number};
        case Node::Kind::Variable:
            return {0.0, 1.0};
        case Node::Kind::Unary: {
            auto c = to_polynomial(node->left);
            for (double& v : c) v = -v;
            return c;
        }
        case Node::Kind::Call:
            throw std::invalid_argument("expression: \"" + node->callee +
                                        "\" is not polynomial in t");
        case Node::Kind::Binary: {
            if (node->op == '^') {
                if (node->right->kind != Node::Kind::Number)
                    throw std::invalid_argument("expression: polynomial powers must be constant");
                double e = node->right->number;
                int k = static_cast<int>(e);
                if (k < 0 || e != k)
                    throw std::invalid_argument(
                        "expression: polynomial powers must be nonnegative integers");
                std::vector<double> base = to_polynomial(node->left);
                std::vector<double> out = {1.0};
                for (int i = 0; i < k; ++i) out = poly_mul(out, base);
                return out;
            }
            if (node->op == '/') {
                if (node->right->kind != Node::Kind::Number || node->right->number == 0.0)
                    throw std::invalid_argument(
                        "expression: polynomial division needs a nonzero constant");
                auto c = to_polynomial(node->left);
                for (double& v : c) v /= node->right->number;
                return c;
            }
            std::vector<double> a = to_polynomial(node->left);
            std::vector<double> b = to_polynomial(node->right);
            if (node->op == '*') return poly_mul(a, b);
            if (a.size() < b.size()) a.resize(b.size(), 0.0);
            for (std::size_t i = 0; i < b.size(); ++i)
                a[i] += (node->op == '+') ? b[i] : -b[i];
            return a;
        }
    }
    throw std::logic_error("expression: malformed node");
}

bool depends_on_t(const NodePtr& node) {
    switch (node->kind) {
        case Node::Kind::Number:
            return false;
        case Node::Kind::Variable:
            return true;
        case Node::Kind::Unary:
        case Node::Kind::Call:
            return depends_on_t(node->left);
        case Node::Kind::Binary:
            return depends_on_t(node->left) || depends_on_t(node->right);
    }
    return false;
}

std::function<double(double)> parse_function(const std::string& text) {
    NodePtr node = parse(text);
    return [node](double t) { return eval(node, t); };
}

double parse_number(const std::string& text) {
    NodePtr node = parse(text);
    if (depends_on_t(node))
        throw std::invalid_argument("expression: expected a constant, got \"" + text + "\"");
    return eval(node, 0.0);
}

}  // namespace frenet::expr
