#include "fucik/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <vector>

namespace fucik {

struct PExpression::Node {
    enum class Kind { Number, Var, Neg, Func, Add, Sub, Mul, Div };
    Kind kind;
    double number = 0.0;
    char var = 'u';
    std::string func;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = PExpression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", 0);
        NodePtr e = expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError("trailing input", pos_);
        return e;
    }

  private:
    const std::string& src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            NodePtr rhs = term();
            Node n;
            n.kind = c == '+' ? Node::Kind::Add : Node::Kind::Sub;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = make(std::move(n));
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            NodePtr rhs = factor();
            Node n;
            n.kind = c == '*' ? Node::Kind::Mul : Node::Kind::Div;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = make(std::move(n));
        }
    }

    NodePtr factor() {
        const char c = peek();
        if (c == '\0') throw ParseError("unexpected end of input", pos_);
        if (c == '-') {
            ++pos_;
            Node n;
            n.kind = Node::Kind::Neg;
            n.lhs = factor();
            return make(std::move(n));
        }
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                src_[pos_] == 'e' || src_[pos_] == 'E' ||
                ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            std::size_t used = 0;
            const double v = std::stod(src_.substr(start, pos_ - start), &used);
            if (used != pos_ - start) throw ParseError("bad number", start);
            Node n;
            n.kind = Node::Kind::Number;
            n.number = v;
            return make(std::move(n));
        } catch (const ParseError&) {
            throw;
        } catch (...) {
            throw ParseError("bad number", start);
        }
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string word = src_.substr(start, pos_ - start);
        if (word == "s" || word == "t" || word == "u") {
            Node n;
            n.kind = Node::Kind::Var;
            n.var = word[0];
            return make(std::move(n));
        }
        static const char* kFuncs[] = {"sin", "cos", "atan", "tanh", "abs", "exp"};
        for (const char* f : kFuncs) {
            if (word == f) {
                if (peek() != '(') throw ParseError("expected '(' after function name", pos_);
                ++pos_;
                NodePtr arg = expr();
                if (peek() != ')') throw ParseError("expected ')'", pos_);
                ++pos_;
                Node n;
                n.kind = Node::Kind::Func;
                n.func = word;
                n.lhs = arg;
                return make(std::move(n));
            }
        }
        throw ParseError("unknown name '" + word + "'", start);
    }
};

double eval_node(const Node& n, double s, double t, double u) {
    switch (n.kind) {
        case Node::Kind::Number: return n.number;
        case Node::Kind::Var: return n.var == 's' ? s : (n.var == 't' ? t : u);
        case Node::Kind::Neg: return -eval_node(*n.lhs, s, t, u);
        case Node::Kind::Func: {
            const double x = eval_node(*n.lhs, s, t, u);
            if (n.func == "sin") return std::sin(x);
            if (n.func == "cos") return std::cos(x);
            if (n.func == "atan") return std::atan(x);
            if (n.func == "tanh") return std::tanh(x);
            if (n.func == "abs") return std::abs(x);
            return std::exp(x);
        }
        case Node::Kind::Add: return eval_node(*n.lhs, s, t, u) + eval_node(*n.rhs, s, t, u);
        case Node::Kind::Sub: return eval_node(*n.lhs, s, t, u) - eval_node(*n.rhs, s, t, u);
        case Node::Kind::Mul: return eval_node(*n.lhs, s, t, u) * eval_node(*n.rhs, s, t, u);
        case Node::Kind::Div: return eval_node(*n.lhs, s, t, u) / eval_node(*n.rhs, s, t, u);
    }
    return 0.0;
}

int precedence(Node::Kind k) {
    switch (k) {
        case Node::Kind::Add:
        case Node::Kind::Sub: return 1;
        case Node::Kind::Mul:
        case Node::Kind::Div: return 2;
        case Node::Kind::Neg: return 3;
        default: return 4;
    }
}

void print_node(const Node& n, std::string& out) {
    auto child = [&](const Node& c, bool needs_paren) {
        if (needs_paren) out += '(';
        print_node(c, out);
        if (needs_paren) out += ')';
    };
    switch (n.kind) {
        case Node::Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            return;
        }
        case Node::Kind::Var: out += n.var; return;
        case Node::Kind::Neg:
            out += '-';
            child(*n.lhs, precedence(n.lhs->kind) < precedence(Node::Kind::Neg));
            return;
        case Node::Kind::Func:
            out += n.func;
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            return;
        case Node::Kind::Add:
        case Node::Kind::Sub:
        case Node::Kind::Mul:
        case Node::Kind::Div: {
            const int p = precedence(n.kind);
            child(*n.lhs, precedence(n.lhs->kind) < p);
            out += n.kind == Node::Kind::Add   ? '+'
                   : n.kind == Node::Kind::Sub ? '-'
                   : n.kind == Node::Kind::Mul ? '*'
                                               : '/';
            // Right operand needs parens at equal precedence too: a-(b-c).
            child(*n.rhs, precedence(n.rhs->kind) <= p);
            return;
        }
    }
}

}  // namespace

PExpression PExpression::parse(const std::string& source) {
    PExpression e;
    e.source_ = source;
    e.root_ = Parser(source).run();
    return e;
}

double PExpression::eval(double s, double t, double u) const {
    return eval_node(*root_, s, t, u);
}

std::string PExpression::print() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

}  // namespace fucik
