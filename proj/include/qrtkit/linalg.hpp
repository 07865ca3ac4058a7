#pragma once

// Fraction-free (Bareiss) determinants over Q[vars] and Sylvester resultants.

#include "gcd.hpp"

namespace qrt {

struct EliminationCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using PolyMatrix = std::vector<std::vector<Poly>>;

inline Poly bareiss_det(PolyMatrix m) {
    size_t n = m.size();
    if (n == 0) return Poly(1);
    Poly prev(1);
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            size_t r = k + 1;
            while (r < n && m[r][k].is_zero()) ++r;
            if (r == n) return Poly();
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                Poly t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                m[i][j] = divide_exact(t, prev);
            }
            m[i][k] = Poly();
        }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

// res_v(a, b) via the Sylvester matrix
inline Poly resultant(const Poly& a, const Poly& b, Var v) {
    auto A = a.coeffs(v), B = b.coeffs(v);
    utrim(A);
    utrim(B);
    if (A.empty() || B.empty()) return Poly();
    size_t m = A.size() - 1, n = B.size() - 1;
    if (m == 0) return A[0].pow(unsigned(n));
    if (n == 0) return B[0].pow(unsigned(m));
    size_t N = m + n;
    PolyMatrix S(N, std::vector<Poly>(N));
    for (size_t r = 0; r < n; ++r)
        for (size_t j = 0; j <= m; ++j) S[r][r + j] = A[m - j];
    for (size_t r = 0; r < m; ++r)
        for (size_t j = 0; j <= n; ++j) S[n + r][r + j] = B[n - j];
    return bareiss_det(std::move(S));
}

// (-1)^(d(d-1)/2) Res(a, a') / lc(a)
inline Poly discriminant(const Poly& a, Var v) {
    unsigned d = a.degree(v);
    if (d == 0) throw std::invalid_argument("discriminant: polynomial is constant in the variable");
    Poly r = divide_exact(resultant(a, a.diff(v), v), a.coeff(v, d));
    return (d * (d - 1) / 2) % 2 ? -r : r;
}

}  // namespace qrt
