#pragma once

// Truncated Laurent series in eps over Z_p, fixed relative precision.

#include "zp.hpp"

#include <stdexcept>
#include <vector>

namespace qrt {

struct PrecisionLoss : std::runtime_error {
    PrecisionLoss() : std::runtime_error("series precision exhausted") {}
};

struct Series {
    int v = 0;           // valuation
    std::vector<Zp> c;   // c[0] != 0 unless exact zero (empty)

    static Series constant(Zp a, size_t prec) {
        Series s;
        if (a.is_zero()) return s;
        s.c.assign(prec, Zp(0));
        s.c[0] = a;
        return s;
    }
    static Series eps(size_t prec, int k = 1) {
        Series s;
        s.v = k;
        s.c.assign(prec, Zp(0));
        s.c[0] = Zp(1);
        return s;
    }
    bool exact_zero() const { return c.empty(); }
    int hi() const { return v + int(c.size()); }

    enum Kind { Zero, Finite, Infinite };
    Kind kind() const {
        if (c.empty() || v > 0) return Zero;
        return v < 0 ? Infinite : Finite;
    }
    Zp lead0() const { return (!c.empty() && v == 0) ? c[0] : Zp(0); }

    static Series norm(int v, std::vector<Zp> c) {
        size_t i = 0;
        while (i < c.size() && c[i].is_zero()) ++i;
        if (i == c.size()) throw PrecisionLoss();
        Series s;
        s.v = v + int(i);
        s.c.assign(c.begin() + long(i), c.end());
        return s;
    }

    friend Series operator+(const Series& a, const Series& b) {
        if (a.exact_zero()) return b;
        if (b.exact_zero()) return a;
        int v = std::min(a.v, b.v), h = std::min(a.hi(), b.hi());
        if (h <= v) throw PrecisionLoss();
        std::vector<Zp> c(size_t(h - v), Zp(0));
        for (size_t i = 0; i < a.c.size() && a.v + int(i) < h; ++i) c[size_t(a.v + int(i) - v)] += a.c[i];
        for (size_t i = 0; i < b.c.size() && b.v + int(i) < h; ++i) c[size_t(b.v + int(i) - v)] += b.c[i];
        return norm(v, std::move(c));
    }
    Series operator-() const {
        Series s = *this;
        for (auto& x : s.c) x = -x;
        return s;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }
    friend Series operator*(const Series& a, const Series& b) {
        if (a.exact_zero() || b.exact_zero()) return Series();
        size_t n = std::min(a.c.size(), b.c.size());
        std::vector<Zp> c(n, Zp(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; i + j < n; ++j) c[i + j] += a.c[i] * b.c[j];
        Series s;
        s.v = a.v + b.v;
        s.c = std::move(c);
        return s;
    }
    Series scaled(Zp k) const {
        if (k.is_zero()) return Series();
        Series s = *this;
        for (auto& x : s.c) x *= k;
        return s;
    }
    Series inv() const {
        if (exact_zero()) throw PrecisionLoss();
        size_t n = c.size();
        std::vector<Zp> r(n, Zp(0));
        Zp i0 = c[0].inv();
        r[0] = i0;
        for (size_t k = 1; k < n; ++k) {
            Zp s(0);
            for (size_t j = 1; j <= k; ++j) s += c[j] * r[k - j];
            r[k] = -s * i0;
        }
        Series out;
        out.v = -v;
        out.c = std::move(r);
        return out;
    }
    friend Series operator/(const Series& a, const Series& b) { return a * b.inv(); }
    Series pow(unsigned k) const {
        Series r, b = *this;
        bool first = true;
        while (k) {
            if (k & 1) r = first ? b : r * b, first = false;
            k >>= 1;
            if (k) b = b * b;
        }
        if (first) return constant(Zp(1), c.empty() ? 1 : c.size());
        return r;
    }
};

}  // namespace qrt
