#pragma once

// Recursive-descent parser: + - * / ^, parentheses, integers, identifiers
// with an optional index suffix [n], [n+1], [n-2].

#include "ratfunc.hpp"

#include <cctype>

namespace qrt {

using Bindings = std::map<std::string, RatFunc>;

class ExprParser {
public:
    ExprParser(std::string_view s, const Bindings* b = nullptr) : s_(s), b_(b) {}

    RatFunc parse() {
        RatFunc r = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return r;
    }

private:
    std::string_view s_;
    const Bindings* b_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace((unsigned char)s_[i_])) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    RatFunc expr() {
        RatFunc r = term();
        while (true) {
            if (eat('+')) r = r + term();
            else if (eat('-')) r = r - term();
            else return r;
        }
    }
    RatFunc term() {
        RatFunc r = unary();
        while (true) {
            if (eat('*')) r = r * unary();
            else if (eat('/')) {
                RatFunc d = unary();
                if (d.is_zero()) fail("division by zero");
                r = r / d;
            } else return r;
        }
    }
    RatFunc unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    RatFunc power() {
        RatFunc b = atom();
        if (eat('^')) {
            RatFunc e = unary();
            if (!e.is_const() || e.const_value().get_den() != 1) fail("exponent must be an integer");
            Int k = e.const_value().get_num();
            if (k > 4096 || k < -4096) fail("exponent too large");
            if (b.is_zero() && k < 0) fail("zero to a negative power");
            return b.pow(int(k.get_si()));
        }
        return b;
    }
    RatFunc atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            RatFunc r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t j = i_;
            while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
            return RatFunc(Rat(Int(std::string(s_.substr(j, i_ - j)))));
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t j = i_;
            while (i_ < s_.size() && (std::isalnum((unsigned char)s_[i_]) || s_[i_] == '_')) ++i_;
            std::string name(s_.substr(j, i_ - j));
            if (i_ < s_.size() && s_[i_] == '[') {
                size_t k = s_.find(']', i_);
                if (k == std::string_view::npos) fail("unclosed index");
                std::string in;
                for (char ch : s_.substr(i_ + 1, k - i_ - 1))
                    if (!std::isspace((unsigned char)ch)) in.push_back(ch);
                i_ = k + 1;
                if (in.empty() || in[0] != 'n') fail("index must be n, n+k or n-k");
                int sh = 0;
                if (in.size() > 1) {
                    if (in[1] != '+' && in[1] != '-') fail("bad index");
                    for (size_t q = 2; q < in.size(); ++q)
                        if (!std::isdigit((unsigned char)in[q])) fail("bad index");
                    if (in.size() == 2) fail("bad index");
                    sh = std::stoi(in.substr(2)) * (in[1] == '-' ? -1 : 1);
                }
                name = Registry::indexed(name, sh);
            }
            if (b_) {
                auto it = b_->find(name);
                if (it != b_->end()) return it->second;
            }
            return RatFunc::variable(name);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

inline RatFunc parse_expr(std::string_view s, const Bindings& b = {}) { return ExprParser(s, &b).parse(); }

// "lhs = rhs" (or a bare expression meaning expr = 0) -> numerator of lhs-rhs
inline Poly parse_relation(std::string_view s, const Bindings& b = {}) {
    auto eq = s.find('=');
    RatFunc f = eq == std::string_view::npos ? parse_expr(s, b) : parse_expr(s.substr(0, eq), b) - parse_expr(s.substr(eq + 1), b);
    return f.num().primitive();
}

inline Poly parse_poly(std::string_view s, const Bindings& b = {}) {
    RatFunc f = parse_expr(s, b);
    if (!f.is_poly()) throw ParseError("expected a polynomial: " + std::string(s));
    return f.num().scaled(1 / f.den().lc());
}

}  // namespace qrt
