#pragma once

#include <complex>

#include "toric.hpp"

namespace toricadelic {

struct not_wide_error : precondition_error {
    using precondition_error::precondition_error;
};

struct WideReport {
    bool wide = false;
    Vec x0;
    SupDifferential differential;  // of the global roof, in units of D.unit
    std::optional<Vec> witness;    // direction with +-u in the sup-differential
};

inline WideReport is_wide(const ToricAdelicDivisor& D) {
    if (!D.polytope().full_dimensional()) throw precondition_error("wideness needs a full-dimensional polytope");
    WideReport w;
    w.x0 = max_face_point(D);
    w.differential = sup_differential(D.global_roof(), w.x0);
    w.witness = symmetric_direction(w.differential);
    w.wide = !w.witness.has_value();
    return w;
}

struct BalancedGradients {
    Vec x0;
    std::vector<LVec> u;  // aligned with D.places
    bool unique = false;
};

inline BalancedGradients balanced_gradients(const ToricAdelicDivisor& D) {
    bool wide = D.polytope().full_dimensional() && is_wide(D).wide;
    BalancedFamily f = balanced_family(D, max_face_point(D), wide);
    if (wide && !f.unique) throw std::logic_error("balanced family not unique for a wide roof (internal error)");
    BalancedGradients b;
    b.x0 = f.x0;
    b.unique = f.unique;
    for (auto& u : f.u) {
        LVec l;
        for (auto& c : u) l.push_back(c * D.unit);
        b.u.push_back(l);
    }
    return b;
}

// u_v for a place name; zero for places the divisor does not list.
inline LVec gradient_at(const ToricAdelicDivisor& D, const BalancedGradients& b, const std::string& name) {
    for (size_t i = 0; i < D.places.size(); ++i)
        if (D.places[i].place.name == name) return b.u[i];
    return LVec(D.dim);
}

enum class MeasureKind { haar_on_translated_compact_torus, dirac_at_shifted_gauss_point };

inline const char* str(MeasureKind k) {
    return k == MeasureKind::haar_on_translated_compact_torus ? "haar_on_translated_compact_torus"
                                                              : "dirac_at_shifted_gauss_point";
}

struct MeasureDescriptor {
    Place place;
    LVec u;
    MeasureKind kind;
};

inline BalancedGradients wide_gradients(const ToricAdelicDivisor& D) {
    if (!is_wide(D).wide) throw not_wide_error("the global roof function is not wide");
    return balanced_gradients(D);
}

inline std::vector<MeasureDescriptor> equidistribution_measures(const ToricAdelicDivisor& D) {
    BalancedGradients b = wide_gradients(D);
    std::vector<MeasureDescriptor> out;
    for (size_t i = 0; i < D.places.size(); ++i) {
        const Place& p = D.places[i].place;
        out.push_back({p, b.u[i],
                       p.kind == PlaceKind::archimedean ? MeasureKind::haar_on_translated_compact_torus
                                                        : MeasureKind::dirac_at_shifted_gauss_point});
    }
    return out;
}

// -sum_v n_v psi_{E,v}(u_v)
inline LogLinear derivative_essmin(const ToricAdelicDivisor& D, const ToricAdelicDivisor& E,
                                   const BalancedGradients& b) {
    if (E.dim != D.dim) throw semantic_error("dimension mismatch between the divisors");
    if (!E.semipositive()) throw precondition_error("derivative needs metric data on the direction divisor");
    std::set<std::string> names;
    for (auto& p : D.places) names.insert(p.place.name);
    for (auto& p : E.places) names.insert(p.place.name);
    LogLinear s;
    for (auto& n : names) {
        const PlaceData* pd = D.find(n);
        const PlaceData* pe = E.find(n);
        if (pd && pe && pd->place.weight != pe->place.weight) throw semantic_error("place " + n + " has different weights");
        Q w = pd ? pd->place.weight : pe->place.weight;
        s -= w * metric_value(E, pe, gradient_at(D, b, n));
    }
    return s;
}

inline LogLinear derivative_essmin(const ToricAdelicDivisor& D, const ToricAdelicDivisor& E) {
    return derivative_essmin(D, E, wide_gradients(D));
}

// ---- Laurent polynomials ----

using Exponent = std::vector<long>;

struct Laurent {
    size_t dim = 1;
    std::map<Exponent, Q> terms;  // nonzero coefficients only

    bool is_zero() const { return terms.empty(); }
    bool is_monomial() const { return terms.size() == 1; }
    bool is_binomial() const { return terms.size() == 2; }

    void add(const Exponent& m, const Q& c) {
        Q& t = terms[m];
        t += c;
        if (sgn(t) == 0) terms.erase(m);
    }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r;
        r.dim = a.dim;
        for (auto& [ma, ca] : a.terms)
            for (auto& [mb, cb] : b.terms) {
                Exponent m(a.dim);
                for (size_t k = 0; k < a.dim; ++k) m[k] = ma[k] + mb[k];
                r.add(m, ca * cb);
            }
        return r;
    }
    friend Laurent operator+(Laurent a, const Laurent& b) {
        for (auto& [m, c] : b.terms) a.add(m, c);
        return a;
    }
    friend bool operator==(const Laurent& a, const Laurent& b) { return a.dim == b.dim && a.terms == b.terms; }

    std::complex<long double> eval(const std::vector<long double>& radius, const std::vector<long double>& angle) const {
        std::complex<long double> s = 0;
        for (auto& [m, c] : terms) {
            long double r = static_cast<long double>(c.get_d()), a = 0;
            for (size_t k = 0; k < dim; ++k) {
                r *= std::pow(radius[k], static_cast<long double>(m[k]));
                a += static_cast<long double>(m[k]) * angle[k];
            }
            s += std::polar(r, a);
        }
        return s;
    }
};

inline std::string poly_var(size_t k, size_t d) {
    if (d <= 3) return std::string(1, "xyz"[k]);
    return "x" + std::to_string(k + 1);
}

inline std::string str(const Laurent& f) {
    if (f.is_zero()) return "0";
    std::string s;
    // highest exponents first reads naturally
    for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
        auto& [m, c] = *it;
        Q a = abs(c);
        bool neg = sgn(c) < 0;
        std::string mono;
        for (size_t k = 0; k < f.dim; ++k) {
            if (m[k] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += poly_var(k, f.dim);
            if (m[k] != 1) mono += "^" + std::to_string(m[k]);
        }
        std::string body = mono.empty() ? str(a) : (a == 1 ? mono : str(a) + "*" + mono);
        if (s.empty())
            s = (neg ? "-" : "") + body;
        else
            s += (neg ? " - " : " + ") + body;
    }
    return s;
}

// f = prod f_i^{k_i}; m(f) = sum k_i m(f_i) lets monomial and binomial factors stay exact.
struct Factored {
    size_t dim = 1;
    std::vector<std::pair<Laurent, long>> factors;

    Laurent expand() const {
        Laurent r;
        r.dim = dim;
        r.add(Exponent(dim), 1);
        for (auto& [f, k] : factors)
            for (long i = 0; i < k; ++i) r = r * f;
        return r;
    }
};

struct poly_parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& s, size_t d) : s_(s), d_(d) {}

    Factored parse() {
        Factored out;
        out.dim = d_;
        skip();
        // a product of factors at top level keeps its structure
        size_t save = i_;
        try {
            std::vector<std::pair<Laurent, long>> fs;
            bool neg = false;
            if (peek() == '-') {
                neg = true;
                ++i_;
            }
            fs.push_back(factor());
            while (skip(), peek() == '*') {
                ++i_;
                fs.push_back(factor());
            }
            skip();
            if (i_ == s_.size()) {
                if (neg) fs.push_back({constant(-1), 1});
                out.factors = fs;
                return out;
            }
        } catch (const poly_parse_error&) {
        }
        i_ = save;
        Laurent f = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        out.factors = {{f, 1}};
        return out;
    }

private:
    const std::string& s_;
    size_t d_, i_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw poly_parse_error("polynomial parse error at column " + std::to_string(i_ + 1) + ": " + what);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    char peek() { return i_ < s_.size() ? s_[i_] : '\0'; }

    Laurent constant(const Q& c) {
        Laurent r;
        r.dim = d_;
        r.add(Exponent(d_), c);
        return r;
    }

    Laurent expr() {
        skip();
        Laurent r = constant(0);
        bool first = true;
        for (;;) {
            skip();
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++i_;
            } else if (!first) {
                break;
            }
            Laurent t = term();
            if (sign < 0) t = constant(-1) * t;
            r = r + t;
            first = false;
            skip();
            if (peek() != '+' && peek() != '-') break;
        }
        return r;
    }

    Laurent term() {
        auto [f, k] = factor();
        Laurent t = power(f, k);
        while (skip(), peek() == '*') {
            ++i_;
            auto [g, j] = factor();
            t = t * power(g, j);
        }
        return t;
    }

    Laurent power(const Laurent& f, long k) {
        Laurent r = constant(1);
        for (long i = 0; i < k; ++i) r = r * f;
        return r;
    }

    long integer() {
        skip();
        bool paren = peek() == '(';
        if (paren) ++i_;
        skip();
        size_t j = i_;
        if (peek() == '-' || peek() == '+') ++i_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
        if (i_ == j || (i_ == j + 1 && !std::isdigit(static_cast<unsigned char>(s_[j])))) fail("expected an integer exponent");
        long v = std::stol(s_.substr(j, i_ - j));
        if (paren) {
            skip();
            if (peek() != ')') fail("expected ')'");
            ++i_;
        }
        return v;
    }

    std::pair<Laurent, long> factor() {
        skip();
        char c = peek();
        if (c == '(') {
            ++i_;
            Laurent f = expr();
            skip();
            if (peek() != ')') fail("expected ')'");
            ++i_;
            long k = 1;
            if (skip(), peek() == '^') {
                ++i_;
                k = integer();
                if (k < 0) fail("negative power of a parenthesized factor");
            }
            return {f, k};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i_;
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/') ++i_;
            try {
                return {constant(parse_q(s_.substr(j, i_ - j))), 1};
            } catch (const std::exception&) {
                fail("bad rational coefficient");
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t j = i_;
            while (std::isalnum(static_cast<unsigned char>(peek()))) ++i_;
            std::string name = s_.substr(j, i_ - j);
            size_t k = d_;
            for (size_t q = 0; q < d_; ++q)
                if (name == poly_var(q, d_) || name == "x" + std::to_string(q + 1)) k = q;
            if (k == d_) {
                i_ = j;
                fail("unknown variable '" + name + "'");
            }
            long e = 1;
            if (skip(), peek() == '^') {
                ++i_;
                e = integer();
            }
            Laurent r;
            r.dim = d_;
            Exponent m(d_);
            m[k] = e;
            r.add(m, 1);
            return {r, 1};
        }
        fail(c ? "unexpected '" + std::string(1, c) + "'" : "unexpected end of input");
    }
};

}  // namespace detail

inline Factored parse_polynomial(const std::string& text, size_t dim) { return detail::PolyParser(text, dim).parse(); }

// ---- Gauss-Mahler measure ----

struct MahlerValue {
    LogLinear exact;     // exact part (all of it when is_exact)
    double numeric = 0;  // archimedean quadrature part
    double error = 0;    // estimated bound on |numeric - true archimedean part|
    bool is_exact = true;
    bool singular = false;  // the polynomial (nearly) vanishes on the sampled torus

    double value() const { return static_cast<double>(exact.value()) + numeric; }
    MahlerValue& operator+=(const MahlerValue& o) {
        exact += o.exact;
        numeric += o.numeric;
        error += o.error;
        is_exact = is_exact && o.is_exact;
        singular = singular || o.singular;
        return *this;
    }
    MahlerValue scaled(long k) const {
        MahlerValue r = *this;
        r.exact *= Q(k);
        r.numeric *= static_cast<double>(k);
        r.error *= static_cast<double>(std::labs(k));
        return r;
    }
};

struct Quadrature {
    double value = 0, error = 0;
    bool singular = false;
};

// Trapezoid rule for the average of log|f| over the torus of radii e^{-u_k}.
inline Quadrature torus_log_average(const Laurent& f, const std::vector<long double>& u, long points) {
    size_t d = f.dim;
    long per = std::max<long>(2, std::lround(std::pow(static_cast<double>(points), 1.0 / static_cast<double>(d))));
    if (per % 2) ++per;
    std::vector<long double> radius(d);
    for (size_t k = 0; k < d; ++k) radius[k] = std::exp(-u[k]);
    long double scale = 0;
    for (auto& [m, c] : f.terms) {
        long double r = std::fabs(static_cast<long double>(c.get_d()));
        for (size_t k = 0; k < d; ++k) r *= std::pow(radius[k], static_cast<long double>(m[k]));
        scale = std::max(scale, r);
    }
    auto run = [&](long n, bool& singular) {
        const long double two_pi = 6.283185307179586476925286766559L;
        std::vector<long> idx(d, 0);
        std::vector<long double> ang(d);
        long double sum = 0;
        long total = 1;
        for (size_t k = 0; k < d; ++k) total *= n;
        for (long it = 0; it < total; ++it) {
            for (size_t k = 0; k < d; ++k) ang[k] = two_pi * static_cast<long double>(idx[k]) / static_cast<long double>(n);
            long double a = std::abs(f.eval(radius, ang));
            if (a <= scale * 1e-15L) {
                singular = true;
                a = scale * 1e-15L;
            }
            sum += std::log(a);
            for (size_t k = 0; k < d && ++idx[k] == n; ++k) idx[k] = 0;
        }
        return sum / static_cast<long double>(total);
    };
    Quadrature q;
    long double full = run(per, q.singular), half = run(per / 2, q.singular);
    q.value = static_cast<double>(full);
    q.error = static_cast<double>(std::fabs(full - half)) + 1e-12 * (1 + std::fabs(static_cast<double>(full)));
    if (q.singular) q.error = std::max(q.error, 1.0);
    return q;
}

namespace detail {

inline std::set<Z> relevant_primes(const ToricAdelicDivisor& D, const Laurent& f) {
    std::set<Z> ps;
    for (auto& p : D.places)
        if (p.place.kind == PlaceKind::nonarchimedean) ps.insert(p.place.prime);
    for (auto& [m, c] : f.terms) {
        for (auto& [p, e] : factor(c)) ps.insert(p);
    }
    return ps;
}

inline LVec gradient_at_prime(const ToricAdelicDivisor& D, const BalancedGradients& b, const Z& p) {
    for (size_t i = 0; i < D.places.size(); ++i)
        if (D.places[i].place.kind == PlaceKind::nonarchimedean && D.places[i].place.prime == p) return b.u[i];
    return LVec(D.dim);
}

inline LVec gradient_at_infinity(const ToricAdelicDivisor& D, const BalancedGradients& b) {
    for (size_t i = 0; i < D.places.size(); ++i)
        if (D.places[i].place.kind == PlaceKind::archimedean) return b.u[i];
    return LVec(D.dim);
}

inline Vec exponent_vec(const Exponent& m) {
    Vec r;
    for (long x : m) r.push_back(Q(x));
    return r;
}

inline LogLinear max0(const LogLinear& x) { return x.sign() > 0 ? x : LogLinear(); }

// Exact value for a monomial (0) or binomial, or quadrature otherwise.
inline MahlerValue factor_mahler(const ToricAdelicDivisor& D, const BalancedGradients& b, const Laurent& f, long points,
                                 bool closed_forms = true) {
    MahlerValue r;
    if (f.is_monomial() && closed_forms) return r;
    if (f.is_binomial() && closed_forms) {
        auto it = f.terms.begin();
        auto [m2, beta] = *it++;
        auto [m1, alpha] = *it;
        Vec m = exponent_vec(m1) - exponent_vec(m2);
        Q gamma = -beta / alpha;
        // sum_v log max(1, e^{<u_v,m>} |gamma|_v)
        r.exact += max0(dot(m, gradient_at_infinity(D, b)) + LogLinear::log_abs(gamma));
        for (auto& p : relevant_primes(D, f))
            r.exact += max0(dot(m, gradient_at_prime(D, b, p)) + LogLinear::log_abs_p(gamma, p));
        return r;
    }
    for (auto& p : relevant_primes(D, f)) {
        LVec u = gradient_at_prime(D, b, p);
        bool first = true;
        LogLinear best;
        for (auto& [m, c] : f.terms) {
            LogLinear t = LogLinear::log_abs_p(c, p) - dot(exponent_vec(m), u);
            if (first || compare(t, best) > 0) best = t;
            first = false;
        }
        r.exact += best;
    }
    LVec ui = gradient_at_infinity(D, b);
    std::vector<long double> u;
    for (auto& x : ui) u.push_back(x.value());
    Quadrature q = torus_log_average(f, u, points);
    r.numeric = q.value;
    r.error = q.error;
    r.singular = q.singular;
    r.is_exact = false;
    return r;
}

}  // namespace detail

// closed_forms = false sends monomials and binomials through the quadrature as well.
inline MahlerValue gauss_mahler(const ToricAdelicDivisor& D, const BalancedGradients& b, const Factored& f,
                                long points = 65536, bool closed_forms = true) {
    if (D.mode != Mode::q) throw precondition_error("Gauss-Mahler measures need Q mode");
    if (f.dim != D.dim) throw semantic_error("polynomial has the wrong number of variables");
    MahlerValue total;
    for (auto& [g, k] : f.factors) {
        if (g.is_zero()) throw semantic_error("the zero polynomial has no Mahler measure");
        total += detail::factor_mahler(D, b, g, points, closed_forms).scaled(k);
    }
    return total;
}

inline MahlerValue gauss_mahler(const ToricAdelicDivisor& D, const Factored& f, long points = 65536) {
    return gauss_mahler(D, wide_gradients(D), f, points);
}

inline MahlerValue derivative_with_rational_twist(const ToricAdelicDivisor& D, const ToricAdelicDivisor& F,
                                                  const Factored& f, long points = 65536) {
    BalancedGradients b = wide_gradients(D);
    MahlerValue m = gauss_mahler(D, b, f, points);
    m.exact += derivative_essmin(D, F, b);
    return m;
}

enum class Eligibility { eligible, not_eligible, indeterminate };

inline const char* str(Eligibility e) {
    switch (e) {
        case Eligibility::eligible: return "eligible";
        case Eligibility::not_eligible: return "not eligible";
        default: return "indeterminate";
    }
}

inline Eligibility log_equidistribution_eligible(const MahlerValue& m) {
    if (m.is_exact) return m.exact.is_zero() ? Eligibility::eligible : Eligibility::not_eligible;
    double v = m.value();
    if (v - m.error > 0) return Eligibility::not_eligible;
    return Eligibility::indeterminate;
}

inline Eligibility log_equidistribution_eligible(const ToricAdelicDivisor& D, const Factored& f, long points = 65536) {
    return log_equidistribution_eligible(gauss_mahler(D, f, points));
}

}  // namespace toricadelic
