#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace toricadelic {

using Q = mpq_class;
using Z = mpz_class;
using Vec = std::vector<Q>;

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Q make_q(long num, long den = 1) {
    Q q(num, den);
    q.canonicalize();
    return q;
}

inline Q parse_q(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw std::invalid_argument("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    Q q;
    if (q.set_str(t, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

inline std::string str(const Q& q) { return q.get_str(); }

inline std::string str(const Vec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += v[i].get_str();
    }
    return s + ")";
}

inline double to_double(const Q& q) { return q.get_d(); }

inline Q dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw geometry_error("dimension mismatch");
    Q s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw geometry_error("dimension mismatch");
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw geometry_error("dimension mismatch");
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator-(const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline Vec operator*(const Q& s, const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline bool is_zero(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](const Q& q) { return sgn(q) == 0; });
}

inline Vec zeros(size_t d) { return Vec(d, Q(0)); }

inline Vec unit(size_t d, size_t k) {
    Vec e(d, Q(0));
    e[k] = 1;
    return e;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Scale to the unique positive multiple with coprime integer coordinates.
inline Vec primitive(const Vec& a) {
    Z l = 1;
    for (const auto& q : a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    Z g = 0;
    std::vector<Z> ints;
    for (const auto& q : a) {
        Z n = q.get_num() * (l / q.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        ints.push_back(n);
    }
    if (g == 0) return a;
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Q(ints[i] / g);
    return r;
}

// Rank and row-echelon helpers over Q.
struct Echelon {
    std::vector<Vec> rows;  // reduced rows
    std::vector<size_t> pivots;
};

inline Echelon rref(std::vector<Vec> m, size_t ncols) {
    Echelon e;
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < m.size(); ++c) {
        size_t p = r;
        while (p < m.size() && sgn(m[p][c]) == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        Q inv = 1 / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == r || sgn(m[i][c]) == 0) continue;
            Q f = m[i][c];
            for (size_t k = c; k < ncols; ++k) m[i][k] -= f * m[r][k];
        }
        e.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    e.rows = std::move(m);
    return e;
}

inline size_t rank(const std::vector<Vec>& m) {
    if (m.empty()) return 0;
    return rref(m, m[0].size()).pivots.size();
}

// Solve the square system M x = b; empty optional-like result via bool.
inline bool solve(std::vector<Vec> m, Vec b, Vec& x) {
    size_t n = m.size();
    for (size_t i = 0; i < n; ++i) m[i].push_back(b[i]);
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && sgn(m[p][c]) == 0) ++p;
        if (p == n) return false;
        std::swap(m[p], m[c]);
        for (size_t i = 0; i < n; ++i) {
            if (i == c || sgn(m[i][c]) == 0) continue;
            Q f = m[i][c] / m[c][c];
            for (size_t k = c; k <= n; ++k) m[i][k] -= f * m[c][k];
        }
    }
    x.assign(n, Q(0));
    for (size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
    return true;
}

inline Q det(std::vector<Vec> m) {
    size_t n = m.size();
    Q d = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && sgn(m[p][c]) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(m[p], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (sgn(m[i][c]) == 0) continue;
            Q f = m[i][c] / m[c][c];
            for (size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
        }
    }
    return d;
}

inline Q power(const Q& x, long n) {
    Q r = 1;
    for (long i = 0; i < std::labs(n); ++i) r *= x;
    return n < 0 ? Q(1 / r) : r;
}

inline Z factorial(unsigned n) {
    Z f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

inline Z binomial(unsigned n, unsigned k) {
    Z b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

// Prime factorization of |n| (n != 0): trial division then Pollard rho.
namespace detail {

inline Z rho(const Z& n) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1;; ++c) {
        Z x = 2, y = 2, d = 1;
        auto f = [&](const Z& v) {
            Z r = v * v + c;
            mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
            return r;
        };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            Z diff = abs(x - y);
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != n) return d;
    }
}

inline void factor_into(Z n, std::map<Z, long>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 30)) {
        ++out[n];
        return;
    }
    Z d = rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace detail

inline std::map<Z, long> factor(Z n) {
    if (n == 0) throw std::invalid_argument("factor of zero");
    n = abs(n);
    std::map<Z, long> out;
    for (unsigned long p = 2; p < 1000 && n > 1; ++p) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            ++out[Z(p)];
            n /= p;
        }
    }
    detail::factor_into(n, out);
    return out;
}

// Exponents of primes in a nonzero rational.
inline std::map<Z, long> factor(const Q& q) {
    auto num = factor(Z(q.get_num()));
    for (auto& [p, e] : factor(Z(q.get_den()))) num[p] -= e;
    return num;
}

inline bool is_prime(const Z& p) { return p > 1 && mpz_probab_prime_p(p.get_mpz_t(), 30) != 0; }

}  // namespace toricadelic
