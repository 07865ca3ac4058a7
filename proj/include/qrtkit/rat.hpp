#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrt {

using Int = mpz_class;
using Rat = mpq_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "3", "-7/12", " 2/4 " -> canonical rational. Throws ParseError.
inline Rat parse_rat(std::string_view s) {
    std::string t;
    for (char c : s)
        if (c != ' ' && c != '\t') t.push_back(c);
    if (t.empty()) throw ParseError("empty rational");
    auto slash = t.find('/');
    auto ok_int = [](const std::string& u) {
        size_t i = (u.size() && (u[0] == '-' || u[0] == '+')) ? 1 : 0;
        if (i >= u.size()) return false;
        for (; i < u.size(); ++i)
            if (u[i] < '0' || u[i] > '9') return false;
        return true;
    };
    std::string a = t.substr(0, slash), b = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (a.size() && a[0] == '+') a.erase(0, 1);
    if (!ok_int(a) || !ok_int(b) || b[0] == '-' || b[0] == '+') throw ParseError("malformed rational: " + std::string(s));
    Int n(a), d(b);
    if (d == 0) throw ParseError("zero denominator: " + std::string(s));
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Rat rat_pow(Rat b, long e) {
    if (e < 0) {
        if (b == 0) throw std::domain_error("0 to a negative power");
        b = 1 / b;
        e = -e;
    }
    Rat r = 1;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

}  // namespace qrt
