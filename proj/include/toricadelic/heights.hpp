#pragma once

#include "equidist.hpp"

namespace toricadelic {

// The solutions of x^n = r; all conjugates share every absolute value.
struct RootPoint {
    Q r;
    long n = 1;
};

inline std::string str(const RootPoint& p) { return "(" + str(p.r) + ")^(1/" + std::to_string(p.n) + ")"; }

inline void check_point(const RootPoint& p) {
    if (sgn(p.r) == 0) throw semantic_error("root point with zero radicand");
    if (p.n < 1) throw semantic_error("root order must be positive");
}

// val_v = -log|r|_v / n
inline LogLinear valuation_infinity(const RootPoint& p) {
    check_point(p);
    return -LogLinear::log_abs(p.r) / Q(p.n);
}

inline LogLinear valuation_at(const RootPoint& p, const Z& prime) {
    check_point(p);
    return -LogLinear::log_abs_p(p.r, prime) / Q(p.n);
}

inline std::set<Z> primes_of(const Q& r) {
    std::set<Z> ps;
    for (auto& [p, e] : factor(r)) ps.insert(p);
    return ps;
}

namespace detail {

inline void require_p1(const ToricAdelicDivisor& D) {
    if (D.dim != 1) throw precondition_error("heights of root points need d = 1");
    if (D.mode != Mode::q) throw precondition_error("heights of root points need Q mode");
}

}  // namespace detail

// h(x) = -sum_v n_v psi_v(val_v(x))
inline LogLinear height(const ToricAdelicDivisor& D, const RootPoint& p) {
    detail::require_p1(D);
    check_point(p);
    std::set<Z> ps = primes_of(p.r);
    LogLinear h;
    bool has_inf = false;
    for (auto& pd : D.places) {
        LVec val{pd.place.kind == PlaceKind::archimedean ? valuation_infinity(p) : valuation_at(p, pd.place.prime)};
        if (pd.place.kind == PlaceKind::archimedean) has_inf = true;
        ps.erase(pd.place.prime);
        h -= metric_value(D, &pd, val);
    }
    if (!has_inf) h -= metric_value(D, nullptr, {valuation_infinity(p)});
    for (auto& q : ps) h -= metric_value(D, nullptr, {valuation_at(p, q)});
    return h;
}

// sum_v max(0, log|r|_v) / n
inline LogLinear weil_height(const Q& r, long n) {
    if (sgn(r) == 0) throw semantic_error("Weil height of zero");
    if (n < 1) throw semantic_error("root order must be positive");
    LogLinear s;
    LogLinear a = LogLinear::log_abs(r);
    if (a.sign() > 0) s += a;
    for (auto& p : primes_of(r)) {
        LogLinear b = LogLinear::log_abs_p(r, p);
        if (b.sign() > 0) s += b;
    }
    return s / Q(n);
}

struct SmallSequence {
    std::vector<RootPoint> points;
    LogLinear mu_ess;
    std::vector<LogLinear> heights;
    LogLinear constant;  // h(x_k) - mu_ess <= constant / k
};

// x_k = (p0^{+-1} prod_p p^{a_p n_k})^{1/n_k}, n_k = k * lcm(den a_p), where u_p = a_p log p.
inline SmallSequence small_sequence(const ToricAdelicDivisor& D, long length) {
    detail::require_p1(D);
    if (length < 1) throw semantic_error("sequence length must be positive");
    BalancedGradients b = wide_gradients(D);
    std::map<Z, Q> a;
    for (size_t i = 0; i < D.places.size(); ++i) {
        const Place& pl = D.places[i].place;
        if (pl.kind != PlaceKind::nonarchimedean) continue;
        const LogLinear& u = b.u[i][0];
        if (u.is_zero()) continue;
        if (sgn(u.rational_part()) != 0 || u.logs().size() != 1 || u.logs().begin()->first != pl.prime)
            throw semantic_error("place " + pl.name + ": sup-gradient " + u.str() + " is not a rational multiple of log " +
                                 pl.prime.get_str() + "; no root point realizes it");
        a[pl.prime] = u.logs().begin()->second;
    }
    Z den = 1;
    for (auto& [p, c] : a) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), Z(c.get_den()).get_mpz_t());
    Z p0 = a.empty() ? Z(2) : a.begin()->first;
    Q a0 = a.empty() ? Q(0) : a.begin()->second;
    SmallSequence s;
    s.mu_ess = minima(D).ess;
    for (long k = 1; k <= length; ++k) {
        long n = k * den.get_si();
        Q r = 1;
        for (auto& [p, c] : a) r *= power(Q(p), Q(c * n).get_num().get_si());
        r *= sgn(a0) < 0 ? Q(1 / Q(p0)) : Q(p0);
        RootPoint x{r, n};
        LogLinear h = height(D, x);
        LogLinear c = (h - s.mu_ess) * Q(k);
        if (k == 1 || compare(c, s.constant) > 0) s.constant = c;
        s.points.push_back(x);
        s.heights.push_back(h);
    }
    return s;
}

struct ExperimentRow {
    long k = 0;
    RootPoint x;
    LogLinear h_d, h_e, gap;
};

struct Experiment {
    std::vector<ExperimentRow> rows;
    LogLinear derivative, mu_ess, constant;
};

inline Experiment convergence_experiment(const ToricAdelicDivisor& D, const ToricAdelicDivisor& E, long length) {
    detail::require_p1(E);
    SmallSequence s = small_sequence(D, length);
    Experiment ex;
    ex.derivative = derivative_essmin(D, E);
    ex.mu_ess = s.mu_ess;
    ex.constant = s.constant;
    for (size_t i = 0; i < s.points.size(); ++i) {
        ExperimentRow row;
        row.k = static_cast<long>(i + 1);
        row.x = s.points[i];
        row.h_d = s.heights[i];
        row.h_e = height(E, s.points[i]);
        row.gap = row.h_e - ex.derivative;
        ex.rows.push_back(row);
    }
    return ex;
}

}  // namespace toricadelic
