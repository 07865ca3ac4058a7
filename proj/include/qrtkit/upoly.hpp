#pragma once

// Dense univariate polynomials over a field K (Zp or Rat).

#include <algorithm>
#include <utility>
#include <vector>

namespace qrt {

template <class K>
struct UPoly {
    std::vector<K> c;  // c[i] * t^i, no trailing zeros

    UPoly() = default;
    explicit UPoly(std::vector<K> v) : c(std::move(v)) { trim(); }
    static UPoly constant(K a) { return UPoly(std::vector<K>{a}); }
    static UPoly t() { return UPoly(std::vector<K>{K(0), K(1)}); }

    void trim() {
        while (!c.empty() && c.back() == K(0)) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int deg() const { return int(c.size()) - 1; }
    K lc() const { return c.back(); }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<K> r(std::max(a.c.size(), b.c.size()), K(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return UPoly(std::move(r));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        std::vector<K> r(std::max(a.c.size(), b.c.size()), K(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return UPoly(std::move(r));
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        std::vector<K> r(a.c.size() + b.c.size() - 1, K(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return UPoly(std::move(r));
    }
    UPoly scaled(K s) const {
        UPoly r = *this;
        for (auto& x : r.c) x *= s;
        r.trim();
        return r;
    }
    // a = q*b + r
    static void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
        r = a;
        q = UPoly();
        if (a.deg() < b.deg()) return;
        q.c.assign(a.c.size() - b.c.size() + 1, K(0));
        K il = K(1) / b.lc();
        for (int i = r.deg(); i >= b.deg(); --i) {
            K f = r.c[i] * il;
            if (f == K(0)) continue;
            q.c[i - b.deg()] = f;
            for (int j = 0; j <= b.deg(); ++j) r.c[i - b.deg() + j] -= f * b.c[j];
        }
        r.trim();
        q.trim();
    }
    UPoly monic() const { return is_zero() ? *this : scaled(K(1) / lc()); }
    static UPoly gcd(UPoly a, UPoly b) {
        while (!b.is_zero()) {
            UPoly q, r;
            divmod(a, b, q, r);
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }
    K eval(K x) const {
        K s(0);
        for (size_t i = c.size(); i-- > 0;) s = s * x + c[i];
        return s;
    }
};

}  // namespace qrt
