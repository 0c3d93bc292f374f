#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace bvf {

/// Tiny expression grammar for sampled scalar functions of the coordinates:
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := number | 'x'<digit> | 'sin(' expr ')' | 'cos(' expr ')'
///           | '(' expr ')' | '-' factor
class Expr {
  public:
    static Expr parse(const std::string& text) {
        Parser p{text, 0};
        Expr e;
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size()) throw std::invalid_argument("expression: trailing input at '" + text.substr(p.pos) + "'");
        return e;
    }

    double eval(std::span<const double> x) const { return root_->eval(x); }

  private:
    struct Node {
        enum class Kind { constant, coord, add, sub, mul, neg, sin, cos } kind;
        double value = 0.0;
        int axis = 0;
        std::unique_ptr<Node> a, b;

        double eval(std::span<const double> x) const {
            switch (kind) {
                case Kind::constant: return value;
                case Kind::coord:
                    if (axis >= static_cast<int>(x.size()))
                        throw std::out_of_range("expression references coordinate x" + std::to_string(axis));
                    return x[axis];
                case Kind::add: return a->eval(x) + b->eval(x);
                case Kind::sub: return a->eval(x) - b->eval(x);
                case Kind::mul: return a->eval(x) * b->eval(x);
                case Kind::neg: return -a->eval(x);
                case Kind::sin: return std::sin(a->eval(x));
                case Kind::cos: return std::cos(a->eval(x));
            }
            return 0.0;
        }
    };

    struct Parser {
        const std::string& s;
        std::size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        bool eat_word(const char* w) {
            skip_ws();
            std::size_t len = std::char_traits<char>::length(w);
            if (s.compare(pos, len, w) == 0) {
                pos += len;
                return true;
            }
            return false;
        }

        std::unique_ptr<Node> parse_expr() {
            auto lhs = parse_term();
            while (true) {
                if (eat('+')) {
                    auto n = std::make_unique<Node>();
                    n->kind = Node::Kind::add;
                    n->a = std::move(lhs);
                    n->b = parse_term();
                    lhs = std::move(n);
                } else if (eat('-')) {
                    auto n = std::make_unique<Node>();
                    n->kind = Node::Kind::sub;
                    n->a = std::move(lhs);
                    n->b = parse_term();
                    lhs = std::move(n);
                } else {
                    return lhs;
                }
            }
        }

        std::unique_ptr<Node> parse_term() {
            auto lhs = parse_factor();
            while (eat('*')) {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::mul;
                n->a = std::move(lhs);
                n->b = parse_factor();
                lhs = std::move(n);
            }
            return lhs;
        }

        std::unique_ptr<Node> parse_factor() {
            skip_ws();
            auto n = std::make_unique<Node>();
            if (eat('-')) {
                n->kind = Node::Kind::neg;
                n->a = parse_factor();
                return n;
            }
            if (eat_word("sin(")) {
                n->kind = Node::Kind::sin;
                n->a = parse_expr();
                if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
                return n;
            }
            if (eat_word("cos(")) {
                n->kind = Node::Kind::cos;
                n->a = parse_expr();
                if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
                return n;
            }
            if (eat('(')) {
                auto inner = parse_expr();
                if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
                return inner;
            }
            if (pos < s.size() && s[pos] == 'x') {
                ++pos;
                if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
                    throw std::invalid_argument("expression: coordinate needs a digit, e.g. x0");
                n->kind = Node::Kind::coord;
                n->axis = s[pos] - '0';
                ++pos;
                return n;
            }
            // number
            std::size_t end = pos;
            while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
            if (end == pos) throw std::invalid_argument("expression: unexpected input at '" + s.substr(pos) + "'");
            n->kind = Node::Kind::constant;
            n->value = std::stod(s.substr(pos, end - pos));
            pos = end;
            return n;
        }
    };

    std::shared_ptr<Node> root_;
};

}  // namespace bvf
