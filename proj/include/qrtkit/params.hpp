#pragma once

// Non-autonomous parameter laws: secular alpha*n+beta, zero-mean periodic
// parts, anti-periodic parts, plus generic n^k and c^n terms.  A law may live
// on log-parameters (multiplicative), realised as t^(L*e(n)).

#include "rat.hpp"
#include "zp.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace qrt {

struct LawError : ParseError {
    using ParseError::ParseError;
};

struct ParamSeq {
    Rat alpha = 0, beta = 0;
    std::vector<std::vector<Rat>> periodic;  // zero-mean, period = size
    std::vector<std::vector<Rat>> anti;      // chi: value(n+m) = -value(n), m = size
    std::vector<std::pair<Rat, unsigned>> powers;  // c * n^k, k >= 2
    std::vector<std::pair<Rat, Rat>> exps;         // c * b^n
    bool multiplicative = false;

    static ParamSeq constant(const Rat& c) {
        ParamSeq p;
        p.beta = c;
        return p;
    }

    void validate() const {
        for (auto& p : periodic) {
            Rat s = 0;
            for (auto& x : p) s += x;
            if (p.empty() || s != 0) throw LawError("periodic part must be zero-mean");
        }
        for (auto& a : anti)
            if (a.empty()) throw LawError("empty anti-periodic part");
    }

    static long mod(long n, long m) { return ((n % m) + m) % m; }

    // additive value, or the exponent of a multiplicative law
    Rat log_value(long n) const {
        Rat s = alpha * n + beta;
        for (auto& p : periodic) s += p[size_t(mod(n, long(p.size())))];
        for (auto& a : anti) {
            long m = long(a.size());
            long k = n >= 0 ? n / m : -((-n + m - 1) / m);
            s += (k % 2 == 0 ? a[size_t(mod(n, m))] : -a[size_t(mod(n, m))]);
        }
        for (auto& [c, k] : powers) s += c * rat_pow(Rat(n), long(k));
        for (auto& [c, b] : exps) s += c * rat_pow(b, n);
        return s;
    }

    // lcm of denominators of all coefficients (for t^(L*e(n)) realisation)
    Int exponent_scale() const {
        Int L = 1;
        auto add = [&](const Rat& r) { L = lcm(L, r.get_den()); };
        add(alpha), add(beta);
        for (auto& p : periodic)
            for (auto& x : p) add(x);
        for (auto& a : anti)
            for (auto& x : a) add(x);
        for (auto& [c, k] : powers) add(c);
        for (auto& [c, b] : exps) {
            add(c);
            if (b.get_den() != 1) throw LawError("exponential base inside a multiplicative law must be an integer");
        }
        return L;
    }

    Int scaled_exponent(long n) const {
        Rat e = log_value(n) * Rat(exponent_scale());
        if (e.get_den() != 1) throw LawError("non-integral scaled exponent");
        return e.get_num();
    }

    // exact value; multiplicative laws need a rational base t
    Rat value(long n, const Rat& t = Rat(3, 2)) const {
        if (!multiplicative) return log_value(n);
        Int e = scaled_exponent(n);
        if (abs(e) > 20000) throw LawError("exponent too large for exact evaluation");
        return rat_pow(t, e.get_si());
    }

    Zp value_mod(long n, Zp t) const {
        if (!multiplicative) {
            auto z = Zp::of(log_value(n));
            if (!z) throw LawError("law value not invertible mod p");
            return *z;
        }
        Int e = scaled_exponent(n);
        if (e < 0) return t.inv().pow(Int(-e));
        return t.pow(e);
    }

    bool autonomous() const {
        return alpha == 0 && periodic.empty() && anti.empty() && powers.empty() && exps.empty();
    }
};

// deterministic "generic" rational for a symbolic name in a law
inline Rat generic_rat(const std::string& name, std::uint64_t seed, unsigned k = 0) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : name) h = (h ^ (unsigned char)c) * 1099511628211ull;
    SplitMix r(h ^ (seed * 0x9e3779b97f4a7c15ull) ^ (std::uint64_t(k) << 40));
    long num = r.range(1, 97) * (r.next() & 1 ? 1 : -1);
    long den = r.range(1, 89);
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Law mini-language:
//   a*n+b, a*(n-1/2)+b, n^2, 2^n, per4(c0,c1,c2,c3), per5(...), chi4(e1,e2),
//   q^(...) for a multiplicative law.  Bare identifiers and "..." are
//   replaced by seed-derived generic rationals.
class LawParser {
public:
    LawParser(std::string_view s, std::uint64_t seed) : s_(s), seed_(seed) {}

    ParamSeq parse(bool multiplicative_default = false) {
        ParamSeq out;
        out.multiplicative = multiplicative_default;
        skip();
        if (peek_word("q")) {
            size_t save = i_;
            ++i_;
            skip();
            if (eat('^')) {
                out.multiplicative = true;
                if (!eat('(')) fail("expected '(' after q^");
                L r = sum();
                if (!eat(')')) fail("expected ')'");
                fill(out, r);
                skip();
                if (i_ != s_.size()) fail("trailing input");
                out.validate();
                return out;
            }
            i_ = save;
        }
        L r = sum();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        fill(out, r);
        out.validate();
        return out;
    }

private:
    // basis keys: "1", "n^k", "exp:<base>", "per:<idx>", "chi:<idx>"
    struct L {
        std::map<std::string, Rat> t;
        bool is_const() const {
            for (auto& [k, c] : t)
                if (k != "1" && c != 0) return false;
            return true;
        }
        Rat cval() const { return t.count("1") ? t.at("1") : Rat(0); }
        bool is_npoly() const {
            for (auto& [k, c] : t)
                if (k != "1" && k.rfind("n^", 0) != 0) return false;
            return true;
        }
    };

    std::string_view s_;
    std::uint64_t seed_;
    size_t i_ = 0;
    std::vector<std::vector<Rat>> per_, chi_;
    unsigned generic_count_ = 0;

    [[noreturn]] void fail(const std::string& w) const {
        throw LawError("law: " + w + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace((unsigned char)s_[i_])) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) return ++i_, true;
        return false;
    }
    bool peek_word(const char* w) {
        size_t n = std::strlen(w);
        if (s_.substr(i_, n) != w) return false;
        return i_ + n == s_.size() || !(std::isalnum((unsigned char)s_[i_ + n]) || s_[i_ + n] == '_');
    }
    static L add(L a, const L& b, int sg) {
        for (auto& [k, c] : b.t) a.t[k] += sg > 0 ? c : Rat(-c);
        return a;
    }
    static L scale(L a, const Rat& c) {
        for (auto& [k, x] : a.t) x *= c;
        return a;
    }
    L mul(const L& a, const L& b) {
        if (a.is_const()) return scale(b, a.cval());
        if (b.is_const()) return scale(a, b.cval());
        if (!a.is_npoly() || !b.is_npoly()) fail("product of two n-dependent factors");
        L r;
        for (auto& [ka, ca] : a.t)
            for (auto& [kb, cb] : b.t) r.t[key_n(deg_n(ka) + deg_n(kb))] += ca * cb;
        return r;
    }
    static unsigned deg_n(const std::string& k) { return k == "1" ? 0 : unsigned(std::stoul(k.substr(2))); }
    static std::string key_n(unsigned d) { return d == 0 ? "1" : "n^" + std::to_string(d); }

    L sum() {
        L r;
        bool neg = eat('-');
        if (!neg) eat('+');
        r = term();
        if (neg) r = scale(r, -1);
        while (true) {
            if (eat('+')) r = add(r, term(), 1);
            else if (eat('-')) r = add(r, term(), -1);
            else return r;
        }
    }
    L term() {
        L r = factor();
        while (true) {
            if (eat('*')) r = mul(r, factor());
            else if (eat('/')) {
                L d = factor();
                if (!d.is_const() || d.cval() == 0) fail("division by a non-constant or zero");
                r = scale(r, 1 / d.cval());
            } else return r;
        }
    }
    L constant(const Rat& c) {
        L r;
        r.t["1"] = c;
        return r;
    }
    L factor() {
        skip();
        if (eat('-')) return scale(factor(), -1);
        if (eat('(')) {
            L r = sum();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) {
            size_t j = i_;
            while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
            Rat c(Int(std::string(s_.substr(j, i_ - j))));
            skip();
            if (i_ < s_.size() && s_[i_] == '^') {
                size_t save = i_;
                ++i_;
                skip();
                if (peek_word("n")) {
                    ++i_;
                    L r;
                    r.t["exp:" + c.get_str()] = 1;
                    return r;
                }
                i_ = save;
                ++i_;
                L e = factor();
                if (!e.is_const() || e.cval().get_den() != 1) fail("constant exponent must be an integer");
                return constant(rat_pow(c, e.cval().get_num().get_si()));
            }
            return constant(c);
        }
        if (i_ < s_.size() && (std::isalpha((unsigned char)s_[i_]) || s_[i_] == '_')) {
            size_t j = i_;
            while (i_ < s_.size() && (std::isalnum((unsigned char)s_[i_]) || s_[i_] == '_')) ++i_;
            std::string w(s_.substr(j, i_ - j));
            if (w == "n") {
                if (eat('^')) {
                    skip();
                    size_t k = i_;
                    while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
                    if (k == i_) fail("expected integer power of n");
                    unsigned d = unsigned(std::stoul(std::string(s_.substr(k, i_ - k))));
                    L r;
                    r.t[key_n(d)] = 1;
                    return r;
                }
                L r;
                r.t["n^1"] = 1;
                return r;
            }
            if ((w.rfind("per", 0) == 0 || w.rfind("chi", 0) == 0) && w.size() > 3 &&
                std::all_of(w.begin() + 3, w.end(), [](char c) { return std::isdigit((unsigned char)c); })) {
                unsigned M = unsigned(std::stoul(w.substr(3)));
                bool chi = w[0] == 'c';
                if (M == 0 || (chi && M % 2)) fail("bad period in " + w);
                return periodic(chi, chi ? M / 2 : M, w);
            }
            return constant(generic_rat(w, seed_));
        }
        fail("unexpected input");
    }
    L periodic(bool chi, unsigned m, const std::string& w) {
        if (!eat('(')) fail("expected '(' after " + w);
        std::vector<std::optional<Rat>> vals;
        bool dots = false;
        if (!eat(')')) {
            while (true) {
                skip();
                if (s_.substr(i_, 3) == "...") {
                    i_ += 3;
                    dots = true;
                } else {
                    L e = sum();
                    if (!e.is_const()) fail("periodic coefficients must be constants");
                    vals.push_back(e.cval());
                }
                if (eat(')')) break;
                if (!eat(',')) fail("expected ',' or ')'");
            }
        } else dots = true;
        std::vector<Rat> seq;
        if (dots) {
            for (auto& v : vals) seq.push_back(*v);
            while (seq.size() < m) seq.push_back(generic_rat(w, seed_, ++generic_count_));
            if (seq.size() > m) fail("too many coefficients in " + w);
            if (!chi) {
                Rat s = 0;
                for (unsigned k = 0; k + 1 < m; ++k) s += seq[k];
                seq[m - 1] = -s;
            }
        } else {
            if (vals.size() != m) fail(w + " needs " + std::to_string(m) + " coefficients");
            for (auto& v : vals) seq.push_back(*v);
            if (!chi) {
                Rat s = 0;
                for (auto& x : seq) s += x;
                if (s != 0) fail(w + " coefficients must sum to zero");
            }
        }
        L r;
        if (chi) {
            chi_.push_back(seq);
            r.t["chi:" + std::to_string(chi_.size() - 1)] = 1;
        } else {
            per_.push_back(seq);
            r.t["per:" + std::to_string(per_.size() - 1)] = 1;
        }
        return r;
    }
    void fill(ParamSeq& out, const L& r) {
        for (auto& [k, c] : r.t) {
            if (c == 0) continue;
            if (k == "1") out.beta += c;
            else if (k == "n^1") out.alpha += c;
            else if (k.rfind("n^", 0) == 0) out.powers.push_back({c, deg_n(k)});
            else if (k.rfind("exp:", 0) == 0) out.exps.push_back({c, parse_rat(k.substr(4))});
            else {
                bool chi = k[0] == 'c';
                auto seq = (chi ? chi_ : per_)[std::stoul(k.substr(4))];
                for (auto& x : seq) x *= c;
                (chi ? out.anti : out.periodic).push_back(seq);
            }
        }
    }
};

inline ParamSeq parse_law(std::string_view s, std::uint64_t seed = 7, bool multiplicative_default = false) {
    return LawParser(s, seed).parse(multiplicative_default);
}

}  // namespace qrt
