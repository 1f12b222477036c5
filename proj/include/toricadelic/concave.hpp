#pragma once

#include "polytope.hpp"

namespace toricadelic {

struct AffineForm {
    Vec gradient;
    Q constant;

    Q operator()(const Vec& x) const { return dot(gradient, x) + constant; }
    friend bool operator==(const AffineForm& a, const AffineForm& b) {
        return a.gradient == b.gradient && a.constant == b.constant;
    }
    friend bool operator<(const AffineForm& a, const AffineForm& b) {
        if (a.gradient != b.gradient) return lex_less(a.gradient, b.gradient);
        return a.constant < b.constant;
    }
};

inline std::string var_name(size_t i, size_t d) { return d == 1 ? "x" : "x" + std::to_string(i + 1); }

inline std::string str(const AffineForm& f) {
    std::string s;
    size_t d = f.gradient.size();
    for (size_t i = 0; i < d; ++i) {
        const Q& c = f.gradient[i];
        if (sgn(c) == 0) continue;
        Q a = abs(c);
        std::string t = (a == 1 ? "" : a.get_str() + "*") + var_name(i, d);
        s += s.empty() ? (sgn(c) < 0 ? "-" : "") + t : (sgn(c) < 0 ? " - " : " + ") + t;
    }
    if (s.empty()) return f.constant.get_str();
    if (sgn(f.constant) != 0) s += (sgn(f.constant) < 0 ? " - " : " + ") + Q(abs(f.constant)).get_str();
    return s;
}

// Concave function min_i (<g_i,x> + c_i) on a polytope, in irredundant normal form.
// The truncated hypograph {(x,t): x in domain, floor <= t <= f(x)} is kept alongside.
class PAConcave {
public:
    PAConcave(const Polytope& domain, std::vector<AffineForm> pieces) {
        if (pieces.empty()) throw geometry_error("concave function needs at least one piece");
        size_t d = domain.ambient_dim();
        for (auto& p : pieces)
            if (p.gradient.size() != d) throw geometry_error("dimension mismatch in affine piece");
        Q lo, hi;
        bool first = true;
        for (auto& v : domain.vertices())
            for (auto& p : pieces) {
                Q y = p(v);
                if (first || y < lo) lo = y;
                if (first || y > hi) hi = y;
                first = false;
            }
        Q floor = lo - 1;
        std::vector<Vec> prism;
        for (auto& v : domain.vertices()) {
            Vec a = v, b = v;
            a.push_back(floor);
            b.push_back(hi + 1);
            prism.push_back(a);
            prism.push_back(b);
        }
        std::vector<Halfspace> cuts;
        for (auto& p : pieces) {
            Vec n = -p.gradient;
            n.push_back(1);
            cuts.push_back({n, p.constant});
        }
        auto hyp = hull(prism).intersect(cuts);
        *this = from_hypograph(*hyp, floor);
    }

    static PAConcave constant(const Polytope& domain, const Q& c) {
        return PAConcave(domain, {{zeros(domain.ambient_dim()), c}});
    }

    // hyp must be a truncated hypograph in Q^{d+1} with bottom face at t = floor.
    static PAConcave from_hypograph(const Polytope& hyp, const Q& floor) {
        PAConcave f;
        size_t d = hyp.ambient_dim() - 1;
        std::vector<Vec> base;
        for (auto& v : hyp.vertices()) base.emplace_back(v.begin(), v.begin() + static_cast<long>(d));
        f.domain_ = hull(base);
        for (auto& h : hyp.facets()) {
            const Q& g = h.normal[d];
            if (sgn(g) <= 0) continue;
            Vec grad(d);
            for (size_t i = 0; i < d; ++i) grad[i] = -h.normal[i] / g;
            auto [cg, cc] = f.domain_.canonical_form(grad, h.offset / g);
            f.pieces_.push_back({cg, cc});
        }
        std::sort(f.pieces_.begin(), f.pieces_.end());
        f.pieces_.erase(std::unique(f.pieces_.begin(), f.pieces_.end()), f.pieces_.end());
        if (f.pieces_.empty()) throw geometry_error("hypograph has no upper facet");
        f.hyp_ = hyp;
        f.floor_ = floor;
        return f;
    }

    size_t dim() const { return domain_.ambient_dim(); }
    const Polytope& domain() const { return domain_; }
    const std::vector<AffineForm>& pieces() const { return pieces_; }
    const Polytope& hypograph() const { return *hyp_; }
    const Q& floor() const { return floor_; }

    // Vertices of the graph over the activity subdivision, as (x, f(x)).
    std::vector<std::pair<Vec, Q>> breakpoints() const {
        std::vector<std::pair<Vec, Q>> out;
        size_t d = dim();
        for (auto& v : hyp_->vertices())
            if (v[d] > floor_) out.emplace_back(Vec(v.begin(), v.begin() + static_cast<long>(d)), v[d]);
        return out;
    }

    Q operator()(const Vec& x) const {
        if (!domain_.contains(x)) throw geometry_error("point outside domain: " + toricadelic::str(x));
        return value_unchecked(x);
    }

    Q value_unchecked(const Vec& x) const {
        Q m = pieces_[0](x);
        for (auto& p : pieces_) m = std::min(m, p(x));
        return m;
    }

    bool is_constant() const { return pieces_.size() == 1 && is_zero(pieces_[0].gradient); }

    friend bool operator==(const PAConcave& a, const PAConcave& b) {
        return a.domain_ == b.domain_ && a.pieces_ == b.pieces_;
    }

    std::string str() const {
        if (pieces_.size() == 1) return toricadelic::str(pieces_[0]);
        std::string s = "min(";
        for (size_t i = 0; i < pieces_.size(); ++i) s += (i ? ", " : "") + toricadelic::str(pieces_[i]);
        return s + ")";
    }

private:
    PAConcave() = default;

    Polytope domain_;
    std::vector<AffineForm> pieces_;
    std::optional<Polytope> hyp_;
    Q floor_;
};

// A concave function min_i (<a_i,u> + b_i) on all of Q^d (the metric side).
struct GlobalPA {
    size_t dim = 0;
    std::vector<AffineForm> pieces;

    Q operator()(const Vec& u) const {
        Q m = pieces.at(0)(u);
        for (auto& p : pieces) m = std::min(m, p(u));
        return m;
    }
    friend bool operator==(const GlobalPA& a, const GlobalPA& b) { return a.dim == b.dim && a.pieces == b.pieces; }
    std::string str() const {
        std::string s = "min(";
        for (size_t i = 0; i < pieces.size(); ++i) s += (i ? ", " : "") + toricadelic::str(pieces[i]);
        return s + ")";
    }
};

inline PAConcave restrict_to(const PAConcave& f, const Polytope& sub) {
    if (!f.domain().contains(sub)) throw geometry_error("restriction to a set outside the domain");
    return PAConcave(sub, f.pieces());
}

inline PAConcave operator+(const PAConcave& f, const PAConcave& g) {
    if (f.domain() != g.domain()) throw geometry_error("sum of concave functions on different domains");
    std::vector<AffineForm> ps;
    for (auto& a : f.pieces())
        for (auto& b : g.pieces()) ps.push_back({a.gradient + b.gradient, a.constant + b.constant});
    return PAConcave(f.domain(), ps);
}

inline PAConcave operator*(const Q& s, const PAConcave& f) {
    if (sgn(s) <= 0) throw geometry_error("concave functions scale by positive factors only");
    std::vector<AffineForm> ps;
    for (auto& a : f.pieces()) ps.push_back({s * a.gradient, s * a.constant});
    return PAConcave(f.domain(), ps);
}

inline PAConcave shifted(const PAConcave& f, const Q& c) {
    std::vector<AffineForm> ps;
    for (auto& a : f.pieces()) ps.push_back({a.gradient, a.constant + c});
    return PAConcave(f.domain(), ps);
}

inline Q evaluate(const PAConcave& f, const Vec& x) { return f(x); }

struct Maximum {
    Q mu;
    Vec argmax;
    Polytope max_face;
};

inline Polytope sup_level(const PAConcave& f, const Q& t) {
    std::vector<Halfspace> cuts;
    for (auto& p : f.pieces()) cuts.push_back({-p.gradient, p.constant - t});
    auto s = f.domain().intersect(cuts);
    if (!s) throw geometry_error("sup-level above the maximum is empty");
    return *s;
}

inline Maximum maximize(const PAConcave& f) {
    auto bp = f.breakpoints();
    Q mu = bp[0].second;
    for (auto& [x, y] : bp) mu = std::max(mu, y);
    Polytope face = sup_level(f, mu);
    return {mu, face.vertices()[0], face};
}

inline Q minimum(const PAConcave& f) {
    Q m = f.value_unchecked(f.domain().vertices()[0]);
    for (auto& v : f.domain().vertices()) m = std::min(m, f.value_unchecked(v));
    return m;
}

// theta(x) = inf_u (<u,x> - psi(u)); domain is the hull of the gradients of psi.
inline PAConcave legendre_dual(const GlobalPA& psi) {
    if (psi.pieces.empty()) throw geometry_error("empty metric function");
    std::vector<Vec> grads, pts;
    Q lo = -psi.pieces[0].constant;
    for (auto& p : psi.pieces) {
        if (p.gradient.size() != psi.dim) throw geometry_error("dimension mismatch in metric piece");
        grads.push_back(p.gradient);
        Vec q = p.gradient;
        q.push_back(-p.constant);
        pts.push_back(q);
        lo = std::min(lo, Q(-p.constant));
    }
    Polytope delta = hull(grads);
    Q floor = lo - 1;
    for (auto& v : delta.vertices()) {
        Vec q = v;
        q.push_back(floor);
        pts.push_back(q);
    }
    return PAConcave::from_hypograph(hull(pts), floor);
}

// psi(u) = inf_{x in domain} (<u,x> - theta(x)), minimum over breakpoints.
inline GlobalPA legendre_dual(const PAConcave& theta) {
    GlobalPA psi;
    psi.dim = theta.dim();
    for (auto& [x, y] : theta.breakpoints()) psi.pieces.push_back({x, -y});
    std::sort(psi.pieces.begin(), psi.pieces.end());
    return psi;
}

inline GlobalPA normalized(const GlobalPA& psi) { return legendre_dual(legendre_dual(psi)); }

inline PAConcave sup_convolution(const PAConcave& f, const PAConcave& g) {
    if (f.dim() != g.dim()) throw geometry_error("dimension mismatch in sup-convolution");
    return PAConcave::from_hypograph(minkowski_sum(f.hypograph(), g.hypograph()), f.floor() + g.floor());
}

inline Q integral(const PAConcave& f) {
    if (!f.domain().full_dimensional()) return 0;
    return volume(f.hypograph()) + f.floor() * volume(f.domain());
}

inline Q mixed_integral(const std::vector<PAConcave>& fs) {
    if (fs.empty()) throw geometry_error("mixed integral needs d+1 functions");
    size_t d = fs[0].dim();
    if (fs.size() != d + 1) throw geometry_error("mixed integral needs exactly d+1 functions");
    for (auto& f : fs)
        if (f.dim() != d) throw geometry_error("dimension mismatch in mixed integral");
    size_t n = size_t(1) << (d + 1);
    std::vector<std::optional<Polytope>> hyp(n), dom(n);
    std::vector<Q> floor(n);
    Q mi = 0;
    for (size_t J = 1; J < n; ++J) {
        size_t hi = 63 - static_cast<size_t>(__builtin_clzll(J));
        size_t rest = J & ~(size_t(1) << hi);
        const PAConcave& f = fs[hi];
        if (rest) {
            hyp[J] = minkowski_sum(*hyp[rest], f.hypograph());
            dom[J] = minkowski_sum(*dom[rest], f.domain());
            floor[J] = floor[rest] + f.floor();
        } else {
            hyp[J] = f.hypograph();
            dom[J] = f.domain();
            floor[J] = f.floor();
        }
        Q integ = dom[J]->full_dimensional() ? volume(*hyp[J]) + floor[J] * volume(*dom[J]) : Q(0);
        size_t sz = static_cast<size_t>(__builtin_popcountll(J));
        if ((d + 1 - sz) % 2) mi -= integ;
        else mi += integ;
    }
    return mi;
}

// conv(gradients) + cone(recession), both given by generators.
struct SupDifferential {
    Vec base_point;
    std::vector<Vec> gradients;
    std::vector<Vec> recession;
};

inline SupDifferential sup_differential(const PAConcave& f, const Vec& x0) {
    Q v = f(x0);
    SupDifferential s;
    s.base_point = x0;
    for (auto& p : f.pieces())
        if (p(x0) == v) s.gradients.push_back(p.gradient);
    for (auto& h : f.domain().facets())
        if (dot(h.normal, x0) == h.offset) s.recession.push_back(-h.normal);
    for (auto& e : f.domain().equations()) {
        s.recession.push_back(e.normal);
        s.recession.push_back(-e.normal);
    }
    return s;
}

namespace detail {

// Variables: the point (d coords) followed by the weights of one or more copies of the set.
inline void add_membership(LinearProgram& lp, const SupDifferential& s, size_t d, size_t ucol, int sign, size_t wcol) {
    size_t m = s.gradients.size(), r = s.recession.size(), n = lp.dim();
    for (size_t k = 0; k < d; ++k) {
        Vec row = zeros(n);
        row[ucol + k] = sign;
        for (size_t i = 0; i < m; ++i) row[wcol + i] = -s.gradients[i][k];
        for (size_t j = 0; j < r; ++j) row[wcol + m + j] = -s.recession[j][k];
        lp.eq(row, 0);
    }
    Vec sum = zeros(n);
    for (size_t i = 0; i < m; ++i) sum[wcol + i] = 1;
    lp.eq(sum, 1);
    for (size_t i = 0; i < m + r; ++i) {
        Vec row = zeros(n);
        row[wcol + i] = -1;
        lp.leq(row, 0);
    }
}

}  // namespace detail

inline bool contains(const SupDifferential& s, const Vec& u) {
    size_t d = u.size(), m = s.gradients.size(), r = s.recession.size();
    LinearProgram lp;
    lp.objective = zeros(d + m + r);
    detail::add_membership(lp, s, d, 0, 1, d);
    for (size_t k = 0; k < d; ++k) lp.eq(unit(d + m + r, k), u[k]);
    return simplex(lp).optimal();
}

// A nonzero u with u and -u both in s, if any.
inline std::optional<Vec> symmetric_direction(const SupDifferential& s) {
    size_t d = s.base_point.size(), m = s.gradients.size(), r = s.recession.size();
    if (!contains(s, zeros(d))) throw geometry_error("zero is not in the sup-differential");
    size_t n = d + 2 * (m + r);
    for (size_t k = 0; k < d; ++k) {
        LinearProgram lp;
        lp.objective = unit(n, k);
        detail::add_membership(lp, s, d, 0, 1, d);
        detail::add_membership(lp, s, d, 0, -1, d + m + r);
        for (size_t j = 0; j < d; ++j) {
            lp.leq(unit(n, j), 1);
            lp.leq(-unit(n, j), 1);
        }
        LPResult res = lp_solve(lp);
        if (res.optimal() && sgn(res.value) > 0) return Vec(res.x.begin(), res.x.begin() + static_cast<long>(d));
    }
    return std::nullopt;
}

inline bool zero_is_vertex(const SupDifferential& s) { return !symmetric_direction(s).has_value(); }

inline std::vector<Q> decay_probe(const PAConcave& f, const Vec& direction, const std::vector<Q>& levels) {
    if (is_zero(direction)) throw geometry_error("zero direction");
    Q mu = maximize(f).mu;
    std::vector<Q> out;
    for (auto& t : levels) {
        if (t >= mu) throw geometry_error("probe level must lie below the maximum");
        Q w = width_along(sup_level(f, t), direction);
        if (sgn(w) == 0) throw geometry_error("sup-level set is flat along the probe direction");
        out.push_back((mu - t) / w);
    }
    return out;
}

}  // namespace toricadelic
