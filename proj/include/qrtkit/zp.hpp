#pragma once

// Arithmetic modulo the Mersenne prime 2^61-1.

#include "rat.hpp"

#include <cstdint>
#include <optional>

namespace qrt {

struct Zp {
    static constexpr std::uint64_t P = (std::uint64_t(1) << 61) - 1;
    std::uint64_t v = 0;

    Zp() = default;
    Zp(long long a) {
        long long r = a % (long long)P;
        v = std::uint64_t(r < 0 ? r + (long long)P : r);
    }
    static Zp raw(std::uint64_t x) {
        Zp z;
        z.v = x;
        return z;
    }
    static std::uint64_t red(unsigned __int128 x) {
        std::uint64_t lo = std::uint64_t(x & P), hi = std::uint64_t(x >> 61);
        std::uint64_t s = lo + hi;
        s = (s & P) + (s >> 61);
        return s >= P ? s - P : s;
    }
    friend Zp operator+(Zp a, Zp b) {
        std::uint64_t s = a.v + b.v;
        return raw(s >= P ? s - P : s);
    }
    friend Zp operator-(Zp a, Zp b) { return raw(a.v >= b.v ? a.v - b.v : a.v + P - b.v); }
    Zp operator-() const { return raw(v ? P - v : 0); }
    friend Zp operator*(Zp a, Zp b) { return raw(red((unsigned __int128)a.v * b.v)); }
    Zp& operator+=(Zp b) { return *this = *this + b; }
    Zp& operator-=(Zp b) { return *this = *this - b; }
    Zp& operator*=(Zp b) { return *this = *this * b; }
    Zp pow(std::uint64_t e) const {
        Zp r(1), b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }
    Zp inv() const { return pow(P - 2); }
    friend Zp operator/(Zp a, Zp b) { return a * b.inv(); }
    Zp& operator/=(Zp b) { return *this = *this / b; }
    bool operator==(Zp o) const { return v == o.v; }
    bool operator!=(Zp o) const { return v != o.v; }
    bool is_zero() const { return v == 0; }

    static Zp from_mpz(const Int& n) {
        static const Int p = [] {
            Int t;
            mpz_ui_pow_ui(t.get_mpz_t(), 2, 61);
            return Int(t - 1);
        }();
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
        return raw(std::uint64_t(mpz_get_ui(r.get_mpz_t())));
    }
    // nullopt when the denominator vanishes mod p
    static std::optional<Zp> of(const Rat& q) {
        Zp d = from_mpz(q.get_den());
        if (d.is_zero()) return std::nullopt;
        return from_mpz(q.get_num()) / d;
    }
    // exponent given as big integer (reduced mod p-1, sign handled)
    Zp pow(const Int& e) const {
        static const Int pm1 = [] {
            Int t;
            mpz_ui_pow_ui(t.get_mpz_t(), 2, 61);
            return Int(t - 2);
        }();
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), e.get_mpz_t(), pm1.get_mpz_t());
        return pow(std::uint64_t(mpz_get_ui(r.get_mpz_t())));
    }
};

// deterministic generator (splitmix64) for sample points
struct SplitMix {
    std::uint64_t s;
    explicit SplitMix(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    Zp zp() { return Zp::raw(next() % Zp::P); }
    long range(long lo, long hi) { return lo + long(next() % std::uint64_t(hi - lo + 1)); }
};

}  // namespace qrt
