#pragma once

#include "rational.hpp"

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <sstream>

namespace toricadelic {

// c0 + sum_p c_p log p, primes p; exact element of the Q-span of 1 and logs of primes.
class LogLinear {
public:
    LogLinear() = default;
    LogLinear(const Q& c) : c0_(c) {}  // NOLINT implicit on purpose
    LogLinear(long c) : c0_(c) {}      // NOLINT
    template <class T, class U>
    LogLinear(const __gmp_expr<T, U>& e) : c0_(e) {}  // NOLINT

    static LogLinear log_prime(const Z& p, const Q& c = 1) {
        if (!is_prime(p)) throw std::invalid_argument("log of non-prime " + p.get_str());
        LogLinear r;
        if (sgn(c) != 0) r.logs_[p] = c;
        return r;
    }

    // log |q| with the archimedean absolute value.
    static LogLinear log_abs(const Q& q) {
        LogLinear r;
        for (auto& [p, e] : factor(q))
            if (e) r.logs_[p] = e;
        return r;
    }

    // log |q|_p = -ord_p(q) log p.
    static LogLinear log_abs_p(const Q& q, const Z& p) {
        long e = 0;
        Z n = q.get_num(), d = q.get_den();
        if (n == 0) throw std::invalid_argument("log of zero");
        while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) { n /= p; ++e; }
        while (mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) { d /= p; --e; }
        return log_prime(p, Q(-e));
    }

    const Q& rational_part() const { return c0_; }
    const std::map<Z, Q>& logs() const { return logs_; }
    Q coeff(const Z& p) const {
        auto it = logs_.find(p);
        return it == logs_.end() ? Q(0) : it->second;
    }

    bool is_zero() const { return sgn(c0_) == 0 && logs_.empty(); }
    bool is_rational() const { return logs_.empty(); }

    LogLinear& operator+=(const LogLinear& o) {
        c0_ += o.c0_;
        for (auto& [p, c] : o.logs_) {
            Q& t = logs_[p];
            t += c;
            if (sgn(t) == 0) logs_.erase(p);
        }
        return *this;
    }
    LogLinear& operator-=(const LogLinear& o) { return *this += -o; }
    LogLinear& operator*=(const Q& s) {
        if (sgn(s) == 0) return *this = LogLinear();
        c0_ *= s;
        for (auto& kv : logs_) kv.second *= s;
        return *this;
    }
    friend LogLinear operator+(LogLinear a, const LogLinear& b) { return a += b; }
    friend LogLinear operator-(LogLinear a, const LogLinear& b) { return a -= b; }
    friend LogLinear operator*(const Q& s, LogLinear a) { return a *= s; }
    friend LogLinear operator*(LogLinear a, const Q& s) { return a *= s; }
    friend LogLinear operator/(LogLinear a, const Q& s) { return a *= Q(1 / s); }
    LogLinear operator-() const { return Q(-1) * *this; }

    friend bool operator==(const LogLinear& a, const LogLinear& b) {
        return a.c0_ == b.c0_ && a.logs_ == b.logs_;
    }
    friend bool operator!=(const LogLinear& a, const LogLinear& b) { return !(a == b); }

    // If this is a rational multiple of o (o != 0), return true and the ratio.
    bool ratio_to(const LogLinear& o, Q& out) const {
        if (o.is_zero()) return false;
        Q r;
        if (sgn(o.c0_) != 0) r = c0_ / o.c0_;
        else r = coeff(o.logs_.begin()->first) / o.logs_.begin()->second;
        if (r * o != *this) return false;
        out = r;
        return true;
    }

    // Sign, exact: 1, log p are Q-linearly independent, so zero iff all
    // coefficients vanish; otherwise refine an MPFR evaluation until decisive.
    int sign() const {
        if (is_zero()) return 0;
        if (logs_.empty()) return sgn(c0_);
        for (mpfr_prec_t prec = 64; prec <= (1 << 20); prec *= 2) {
            mpfr_t v, t, mag, err;
            mpfr_inits2(prec, v, t, mag, err, (mpfr_ptr)0);
            mpfr_set_q(v, c0_.get_mpq_t(), MPFR_RNDN);
            mpfr_abs(mag, v, MPFR_RNDU);
            for (auto& [p, c] : logs_) {
                mpfr_set_z(t, p.get_mpz_t(), MPFR_RNDN);
                mpfr_log(t, t, MPFR_RNDN);
                mpfr_mul_q(t, t, c.get_mpq_t(), MPFR_RNDN);
                mpfr_add(v, v, t, MPFR_RNDN);
                mpfr_abs(t, t, MPFR_RNDU);
                mpfr_add(mag, mag, t, MPFR_RNDU);
            }
            // generous bound: (terms + 2) * 4 ulp-relative of the magnitude sum
            mpfr_mul_ui(err, mag, 4 * (logs_.size() + 2), MPFR_RNDU);
            mpfr_mul_2si(err, err, -static_cast<long>(prec), MPFR_RNDU);
            int s = 0;
            mpfr_abs(t, v, MPFR_RNDD);
            if (mpfr_cmp(t, err) > 0) s = mpfr_sgn(v);
            mpfr_clears(v, t, mag, err, (mpfr_ptr)0);
            if (s) return s;
        }
        throw std::runtime_error("LogLinear sign undecided");
    }

    long double value() const {
        mpfr_t v, t;
        mpfr_inits2(128, v, t, (mpfr_ptr)0);
        mpfr_set_q(v, c0_.get_mpq_t(), MPFR_RNDN);
        for (auto& [p, c] : logs_) {
            mpfr_set_z(t, p.get_mpz_t(), MPFR_RNDN);
            mpfr_log(t, t, MPFR_RNDN);
            mpfr_mul_q(t, t, c.get_mpq_t(), MPFR_RNDN);
            mpfr_add(v, v, t, MPFR_RNDN);
        }
        long double r = mpfr_get_ld(v, MPFR_RNDN);
        mpfr_clears(v, t, (mpfr_ptr)0);
        return r;
    }

    // "7/2 - 3*log(2) + 1/3*log(5)"; "0" for zero.
    std::string str() const {
        std::string s;
        auto term = [&](const Q& c, const std::string& tail) {
            Q a = abs(c);
            std::string mag = tail.empty() ? a.get_str() : (a == 1 ? tail : a.get_str() + "*" + tail);
            if (s.empty()) s = (sgn(c) < 0 ? "-" : "") + mag;
            else s += (sgn(c) < 0 ? " - " : " + ") + mag;
        };
        if (sgn(c0_) != 0) term(c0_, "");
        for (auto& [p, c] : logs_) term(c, "log(" + p.get_str() + ")");
        return s.empty() ? "0" : s;
    }

    static LogLinear parse(const std::string& text) {
        std::string t;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (t.empty()) throw std::invalid_argument("empty number");
        LogLinear r;
        size_t i = 0;
        while (i < t.size()) {
            int sign = 1;
            if (t[i] == '+' || t[i] == '-') {
                if (t[i] == '-') sign = -1;
                ++i;
            } else if (i != 0) {
                throw std::invalid_argument("malformed number: " + text);
            }
            size_t j = i;
            while (j < t.size() && t[j] != '+' && t[j] != '-') ++j;
            std::string tok = t.substr(i, j - i);
            i = j;
            if (tok.empty()) throw std::invalid_argument("malformed number: " + text);
            auto lp = tok.find("log(");
            if (lp == std::string::npos) {
                r += Q(sign) * parse_q(tok);
                continue;
            }
            Q c = 1;
            if (lp > 0) {
                if (tok[lp - 1] != '*') throw std::invalid_argument("malformed number: " + text);
                c = parse_q(tok.substr(0, lp - 1));
            }
            if (tok.back() != ')') throw std::invalid_argument("malformed number: " + text);
            Z p(tok.substr(lp + 4, tok.size() - lp - 5));
            r += log_prime(p, Q(sign) * c);
        }
        return r;
    }

private:
    Q c0_ = 0;
    std::map<Z, Q> logs_;
};

inline int compare(const LogLinear& a, const LogLinear& b) { return (a - b).sign(); }

using LVec = std::vector<LogLinear>;

inline LVec lift(const Vec& v) { return LVec(v.begin(), v.end()); }

inline LogLinear dot(const Vec& a, const LVec& u) {
    LogLinear s;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * u[i];
    return s;
}

inline std::string str(const LVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += v[i].str();
    }
    return s + ")";
}

inline std::ostream& operator<<(std::ostream& os, const LogLinear& x) { return os << x.str(); }

}  // namespace toricadelic
