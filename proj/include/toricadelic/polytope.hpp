#pragma once

#include "lp.hpp"

#include <numeric>
#include <optional>
#include <set>

namespace toricadelic {

struct Halfspace {
    Vec normal;
    Q offset;  // <normal, x> <= offset
    friend bool operator==(const Halfspace& a, const Halfspace& b) {
        return a.normal == b.normal && a.offset == b.offset;
    }
};

inline bool operator<(const Halfspace& a, const Halfspace& b) {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
}

struct Cone {
    std::vector<Vec> generators;
};

namespace detail {

class Bits {
public:
    explicit Bits(size_t n = 0) : w_((n + 63) / 64, 0) {}
    void set(size_t i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    bool test(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    Bits operator&(const Bits& o) const {
        Bits r;
        r.w_.resize(w_.size());
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
        return r;
    }
    bool subset_of(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    size_t count() const {
        size_t c = 0;
        for (auto x : w_) c += static_cast<size_t>(__builtin_popcountll(x));
        return c;
    }

private:
    std::vector<uint64_t> w_;
};

// Double description by successive halfspace cuts of a bounded polytope in Q^k.
// Vertex adjacency uses the combinatorial test on tight-constraint sets.
class Cutter {
public:
    struct Vertex {
        Vec x;
        Bits tight;
    };

    Cutter(size_t k, size_t capacity) : k_(k), cap_(capacity) {}

    size_t add_constraint_row(Vec a, Q b) {
        rows_.push_back({std::move(a), std::move(b)});
        return rows_.size() - 1;
    }
    void add_vertex(Vec x, Bits tight) { verts_.push_back({std::move(x), std::move(tight)}); }
    Bits empty_bits() const { return Bits(cap_); }

    void cut(const Vec& a, const Q& b) {
        size_t idx = add_constraint_row(a, b);
        std::vector<Q> s(verts_.size());
        std::vector<size_t> pos, neg, zer;
        for (size_t i = 0; i < verts_.size(); ++i) {
            s[i] = dot(a, verts_[i].x) - b;
            int g = sgn(s[i]);
            (g > 0 ? pos : g < 0 ? neg : zer).push_back(i);
        }
        if (pos.empty()) {
            for (size_t i : zer) verts_[i].tight.set(idx);
            return;
        }
        std::vector<Vertex> next;
        for (size_t i : neg) next.push_back(verts_[i]);
        for (size_t i : zer) {
            next.push_back(verts_[i]);
            next.back().tight.set(idx);
        }
        size_t need = k_ > 0 ? k_ - 1 : 0;
        for (size_t p : pos)
            for (size_t n : neg) {
                Bits z = verts_[p].tight & verts_[n].tight;
                if (z.count() < need) continue;
                bool edge = true;
                for (size_t w = 0; w < verts_.size() && edge; ++w)
                    if (w != p && w != n && z.subset_of(verts_[w].tight)) edge = false;
                if (!edge) continue;
                Q den = s[p] - s[n];
                Vec x = (s[p] / den) * verts_[n].x - (s[n] / den) * verts_[p].x;
                z.set(idx);
                next.push_back({std::move(x), std::move(z)});
            }
        verts_ = std::move(next);
    }

    const std::vector<Vertex>& vertices() const { return verts_; }

private:
    size_t k_, cap_;
    std::vector<std::pair<Vec, Q>> rows_;
    std::vector<Vertex> verts_;
};

inline size_t affine_rank(const std::vector<Vec>& pts, const std::vector<size_t>& idx) {
    if (idx.size() <= 1) return 0;
    std::vector<Vec> diffs;
    for (size_t i = 1; i < idx.size(); ++i) diffs.push_back(pts[idx[i]] - pts[idx[0]]);
    return rank(diffs);
}

}  // namespace detail

class Polytope {
public:
    // Convex hull of a nonempty point set; both representations irredundant.
    static Polytope hull(std::vector<Vec> points) {
        if (points.empty()) throw geometry_error("hull of empty point set");
        size_t d = points[0].size();
        for (auto& p : points)
            if (p.size() != d) throw geometry_error("dimension mismatch in hull");
        std::sort(points.begin(), points.end(), lex_less);
        points.erase(std::unique(points.begin(), points.end()), points.end());

        Polytope P;
        P.ambient_ = d;
        P.set_affine_hull(points);
        size_t k = P.pivots_.size();
        P.dim_ = static_cast<int>(k);
        if (k == 0) {
            P.vertices_ = {points[0]};
            P.finish();
            return P;
        }
        std::vector<Vec> z;
        for (auto& p : points) z.push_back(P.project(p));

        // initial simplex of affinely independent points
        std::vector<size_t> base = {0};
        {
            std::vector<Vec> diffs;
            for (size_t i = 1; i < z.size() && base.size() < k + 1; ++i) {
                diffs.push_back(z[i] - z[0]);
                if (rank(diffs) == base.size()) base.push_back(i);
                else diffs.pop_back();
            }
        }
        Vec c = zeros(k);
        for (size_t i : base) c = c + z[i];
        c = Q(1, static_cast<unsigned long>(k + 1)) * c;
        std::vector<Vec> w;
        for (auto& p : z) w.push_back(p - c);

        // polar polytope {y : <y, w_i> <= 1}
        detail::Cutter cut(k, z.size());
        std::vector<bool> used(z.size(), false);
        for (size_t i : base) used[i] = true;
        std::vector<size_t> order(base.begin(), base.end());
        for (size_t i = 0; i < z.size(); ++i)
            if (!used[i]) order.push_back(i);
        // constraint row index == position in `order`; remember the point it came from
        for (size_t j = 0; j <= k; ++j) cut.add_constraint_row(w[base[j]], Q(1));
        for (size_t j = 0; j <= k; ++j) {
            std::vector<Vec> m;
            for (size_t i = 0; i <= k; ++i)
                if (i != j) m.push_back(w[base[i]]);
            Vec y;
            if (!solve(m, Vec(k, Q(1)), y)) throw geometry_error("degenerate initial simplex");
            auto bits = cut.empty_bits();
            for (size_t i = 0; i <= k; ++i)
                if (i != j) bits.set(i);
            cut.add_vertex(std::move(y), std::move(bits));
        }
        for (size_t j = k + 1; j < order.size(); ++j) cut.cut(w[order[j]], Q(1));

        std::vector<Halfspace> facets;
        std::vector<std::vector<size_t>> inc;
        for (auto& v : cut.vertices()) {
            Vec a = primitive(v.x);
            size_t nz = 0;
            while (sgn(v.x[nz]) == 0) ++nz;
            Q f = a[nz] / v.x[nz];
            Q b = f * (1 + dot(v.x, c));
            std::vector<size_t> on;
            for (size_t j = 0; j < order.size(); ++j)
                if (v.tight.test(j)) on.push_back(order[j]);
            facets.push_back({a, b});
            inc.push_back(on);
        }
        // vertices: points whose incident facet normals span Q^k
        std::vector<std::vector<Vec>> normals(z.size());
        for (size_t f = 0; f < facets.size(); ++f)
            for (size_t i : inc[f]) normals[i].push_back(facets[f].normal);
        std::vector<size_t> vidx;
        for (size_t i = 0; i < z.size(); ++i)
            if (normals[i].size() >= k && rank(normals[i]) == k) vidx.push_back(i);
        std::vector<size_t> remap(z.size(), SIZE_MAX);
        for (size_t j = 0; j < vidx.size(); ++j) {
            remap[vidx[j]] = j;
            P.vertices_.push_back(points[vidx[j]]);
        }
        for (size_t f = 0; f < facets.size(); ++f) {
            Vec a = zeros(d);
            for (size_t r = 0; r < k; ++r) a[P.pivots_[r]] = facets[f].normal[r];
            std::vector<size_t> on;
            for (size_t i : inc[f])
                if (remap[i] != SIZE_MAX) on.push_back(remap[i]);
            P.facets_.push_back({a, facets[f].offset});
            P.facet_vertices_.push_back(on);
        }
        P.finish();
        return P;
    }

    // P intersected with extra halfspaces; nullopt when empty.
    std::optional<Polytope> intersect(const std::vector<Halfspace>& cuts) const {
        size_t k = pivots_.size();
        std::vector<std::pair<Vec, Q>> red;
        for (auto& h : cuts) {
            if (h.normal.size() != ambient_) throw geometry_error("dimension mismatch in intersect");
            auto [g, off] = reduce(h.normal, Q(0));
            Q b = h.offset - off;
            if (is_zero(g)) {
                if (sgn(b) < 0) return std::nullopt;
                continue;
            }
            red.emplace_back(std::move(g), std::move(b));
        }
        if (red.empty()) return *this;
        if (k == 0) return *this;  // all reduced constraints were constant
        detail::Cutter cut(k, facets_.size() + red.size());
        for (auto& f : facets_) cut.add_constraint_row(reduce(f.normal, Q(0)).first, f.offset);
        for (size_t v = 0; v < vertices_.size(); ++v) {
            auto bits = cut.empty_bits();
            for (size_t f = 0; f < facets_.size(); ++f)
                if (std::binary_search(facet_vertices_[f].begin(), facet_vertices_[f].end(), v)) bits.set(f);
            cut.add_vertex(project(vertices_[v]), std::move(bits));
        }
        for (auto& [a, b] : red) {
            cut.cut(a, b);
            if (cut.vertices().empty()) return std::nullopt;
        }
        std::vector<Vec> pts;
        for (auto& v : cut.vertices()) pts.push_back(lift(v.x));
        return hull(std::move(pts));
    }

    size_t ambient_dim() const { return ambient_; }
    int dim() const { return dim_; }
    bool full_dimensional() const { return static_cast<size_t>(dim_) == ambient_; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& facets() const { return facets_; }
    const std::vector<Halfspace>& equations() const { return equations_; }
    const std::vector<std::vector<size_t>>& facet_vertices() const { return facet_vertices_; }
    const std::vector<size_t>& pivots() const { return pivots_; }

    // All constraints as inequalities (equations doubled).
    std::vector<Halfspace> halfspaces() const {
        std::vector<Halfspace> hs = facets_;
        for (auto& e : equations_) {
            hs.push_back(e);
            hs.push_back({-e.normal, -e.offset});
        }
        return hs;
    }

    bool contains(const Vec& x) const {
        if (x.size() != ambient_) throw geometry_error("dimension mismatch");
        for (auto& e : equations_)
            if (dot(e.normal, x) != e.offset) return false;
        for (auto& f : facets_)
            if (dot(f.normal, x) > f.offset) return false;
        return true;
    }

    bool contains(const Polytope& o) const {
        for (auto& v : o.vertices_)
            if (!contains(v)) return false;
        return true;
    }

    friend bool operator==(const Polytope& a, const Polytope& b) {
        return a.ambient_ == b.ambient_ && a.vertices_ == b.vertices_;
    }
    friend bool operator!=(const Polytope& a, const Polytope& b) { return !(a == b); }

    Vec centroid_of_vertices() const {
        Vec c = zeros(ambient_);
        for (auto& v : vertices_) c = c + v;
        return Q(1, static_cast<unsigned long>(vertices_.size())) * c;
    }

    // Rewrite <g,x> + c as an affine form in the free coordinates of the affine hull.
    std::pair<Vec, Q> reduce(Vec g, Q c) const {
        for (size_t j = 0; j < dep_.size(); ++j) {
            size_t kk = dep_[j];
            if (sgn(g[kk]) == 0) continue;
            for (size_t r = 0; r < pivots_.size(); ++r) g[pivots_[r]] += g[kk] * dep_coef_[j][r];
            c += g[kk] * dep_off_[j];
            g[kk] = 0;
        }
        Vec out(pivots_.size());
        for (size_t r = 0; r < pivots_.size(); ++r) out[r] = g[pivots_[r]];
        return {out, c};
    }

    // Same as reduce, but keeps ambient coordinates (zeros off the free coordinates).
    std::pair<Vec, Q> canonical_form(const Vec& g, const Q& c) const {
        auto [r, off] = reduce(g, c);
        Vec a = zeros(ambient_);
        for (size_t i = 0; i < pivots_.size(); ++i) a[pivots_[i]] = r[i];
        return {a, off};
    }

    Vec project(const Vec& x) const {
        Vec z(pivots_.size());
        for (size_t r = 0; r < pivots_.size(); ++r) z[r] = x[pivots_[r]];
        return z;
    }

    Vec lift(const Vec& z) const {
        Vec x = zeros(ambient_);
        for (size_t r = 0; r < pivots_.size(); ++r) x[pivots_[r]] = z[r];
        for (size_t j = 0; j < dep_.size(); ++j) {
            Q v = dep_off_[j];
            for (size_t r = 0; r < pivots_.size(); ++r) v += dep_coef_[j][r] * z[r];
            x[dep_[j]] = v;
        }
        return x;
    }

    // Simplices (vertex index lists) of the base-vertex triangulation; full-dimensional only.
    std::vector<std::vector<size_t>> triangulation() const {
        std::vector<std::vector<size_t>> out;
        if (!full_dimensional()) return out;
        std::vector<size_t> all(vertices_.size());
        std::iota(all.begin(), all.end(), 0);
        std::map<std::vector<size_t>, std::vector<std::vector<size_t>>> memo;
        return triangulate(all, static_cast<size_t>(dim_), memo);
    }

    std::string str() const {
        std::string s;
        for (size_t i = 0; i < vertices_.size(); ++i) s += (i ? " " : "") + toricadelic::str(vertices_[i]);
        return s;
    }

private:
    void set_affine_hull(const std::vector<Vec>& pts) {
        std::vector<Vec> diffs;
        for (size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
        Echelon e = diffs.empty() ? Echelon{} : rref(diffs, ambient_);
        pivots_ = e.pivots;
        dep_.clear();
        dep_coef_.clear();
        dep_off_.clear();
        size_t r = 0;
        for (size_t col = 0; col < ambient_; ++col) {
            if (r < pivots_.size() && pivots_[r] == col) {
                ++r;
                continue;
            }
            Vec coef(pivots_.size());
            Q off = pts[0][col];
            for (size_t i = 0; i < pivots_.size(); ++i) {
                coef[i] = e.rows[i][col];
                off -= pts[0][pivots_[i]] * coef[i];
            }
            dep_.push_back(col);
            dep_coef_.push_back(coef);
            dep_off_.push_back(off);
        }
        equations_.clear();
        for (size_t j = 0; j < dep_.size(); ++j) {
            Vec a = zeros(ambient_);
            a[dep_[j]] = 1;
            for (size_t i = 0; i < pivots_.size(); ++i) a[pivots_[i]] = -dep_coef_[j][i];
            equations_.push_back({a, dep_off_[j]});
        }
    }

    // sort vertices and facets, rebuild incidences
    void finish() {
        std::vector<size_t> perm(vertices_.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::sort(perm.begin(), perm.end(), [&](size_t a, size_t b) { return lex_less(vertices_[a], vertices_[b]); });
        std::vector<size_t> inv(perm.size());
        std::vector<Vec> vs;
        for (size_t i = 0; i < perm.size(); ++i) {
            inv[perm[i]] = i;
            vs.push_back(vertices_[perm[i]]);
        }
        vertices_ = std::move(vs);
        std::vector<size_t> fp(facets_.size());
        std::iota(fp.begin(), fp.end(), 0);
        std::sort(fp.begin(), fp.end(), [&](size_t a, size_t b) { return facets_[a] < facets_[b]; });
        std::vector<Halfspace> fs;
        std::vector<std::vector<size_t>> fv;
        for (size_t f : fp) {
            fs.push_back(facets_[f]);
            std::vector<size_t> on;
            for (size_t v : facet_vertices_[f]) on.push_back(inv[v]);
            std::sort(on.begin(), on.end());
            fv.push_back(on);
        }
        facets_ = std::move(fs);
        facet_vertices_ = std::move(fv);
    }

    std::vector<std::vector<size_t>> triangulate(
        const std::vector<size_t>& face, size_t k,
        std::map<std::vector<size_t>, std::vector<std::vector<size_t>>>& memo) const {
        auto it = memo.find(face);
        if (it != memo.end()) return it->second;
        std::vector<std::vector<size_t>> out;
        if (k == 0) {
            out.push_back({face[0]});
        } else {
            size_t base = face[0];
            std::set<std::vector<size_t>> subs;
            for (auto& fv : facet_vertices_) {
                std::vector<size_t> s;
                std::set_intersection(face.begin(), face.end(), fv.begin(), fv.end(), std::back_inserter(s));
                if (s.size() < k || s.size() == face.size()) continue;
                if (std::binary_search(s.begin(), s.end(), base)) continue;
                if (detail::affine_rank(vertices_, s) != k - 1) continue;
                subs.insert(s);
            }
            for (auto& s : subs)
                for (auto t : triangulate(s, k - 1, memo)) {
                    t.push_back(base);
                    out.push_back(std::move(t));
                }
        }
        memo[face] = out;
        return out;
    }

    size_t ambient_ = 0;
    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Halfspace> facets_;
    std::vector<std::vector<size_t>> facet_vertices_;
    std::vector<Halfspace> equations_;
    std::vector<size_t> pivots_;
    std::vector<size_t> dep_;
    std::vector<Vec> dep_coef_;
    std::vector<Q> dep_off_;
};

inline Polytope hull(const std::vector<Vec>& points) { return Polytope::hull(points); }

inline Polytope box(const Vec& lo, const Vec& hi) {
    size_t d = lo.size();
    std::vector<Vec> pts;
    for (size_t m = 0; m < (size_t(1) << d); ++m) {
        Vec p(d);
        for (size_t i = 0; i < d; ++i) p[i] = (m >> i) & 1 ? hi[i] : lo[i];
        pts.push_back(p);
    }
    return hull(pts);
}

inline Polytope translate(const Polytope& c, const Vec& t) {
    std::vector<Vec> pts;
    for (auto& v : c.vertices()) pts.push_back(v + t);
    return hull(pts);
}

inline Polytope scale(const Polytope& c, const Q& s) {
    std::vector<Vec> pts;
    for (auto& v : c.vertices()) pts.push_back(s * v);
    return hull(pts);
}

inline Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw geometry_error("dimension mismatch in Minkowski sum");
    std::vector<Vec> pts;
    for (auto& x : a.vertices())
        for (auto& y : b.vertices()) pts.push_back(x + y);
    return hull(pts);
}

inline Q simplex_volume(const std::vector<Vec>& pts) {
    std::vector<Vec> m;
    for (size_t i = 1; i < pts.size(); ++i) m.push_back(pts[i] - pts[0]);
    return abs(det(m)) / Q(factorial(static_cast<unsigned>(m.size())));
}

inline Q volume(const Polytope& c) {
    Q v = 0;
    for (auto& s : c.triangulation()) {
        std::vector<Vec> pts;
        for (size_t i : s) pts.push_back(c.vertices()[i]);
        v += simplex_volume(pts);
    }
    return v;
}

inline Q mixed_volume(const std::vector<Polytope>& bodies) {
    if (bodies.empty()) throw geometry_error("mixed volume needs d bodies");
    size_t d = bodies[0].ambient_dim();
    if (bodies.size() != d) throw geometry_error("mixed volume needs exactly d bodies");
    for (auto& b : bodies)
        if (b.ambient_dim() != d) throw geometry_error("dimension mismatch in mixed volume");
    size_t n = size_t(1) << d;
    std::vector<std::optional<Polytope>> sums(n);
    Q mv = 0;
    for (size_t J = 1; J < n; ++J) {
        size_t hi = 63 - static_cast<size_t>(__builtin_clzll(J));
        size_t rest = J & ~(size_t(1) << hi);
        sums[J] = rest ? minkowski_sum(*sums[rest], bodies[hi]) : bodies[hi];
        int sz = __builtin_popcountll(J);
        Q v = volume(*sums[J]);
        if ((d - static_cast<size_t>(sz)) % 2) mv -= v;
        else mv += v;
    }
    return mv;
}

inline Q support(const Polytope& c, const Vec& u) {
    Q best = dot(u, c.vertices()[0]);
    for (auto& v : c.vertices()) best = std::max(best, dot(u, v));
    return best;
}

inline Q width_along(const Polytope& c, const Vec& u) {
    if (is_zero(u)) throw geometry_error("zero direction");
    return support(c, u) + support(c, -u);
}

inline LPResult lp_solve(const Vec& objective, const Polytope& c) {
    LinearProgram lp;
    lp.objective = objective;
    for (auto& f : c.facets()) lp.leq(f.normal, f.offset);
    for (auto& e : c.equations()) lp.eq(e.normal, e.offset);
    return lp_solve(lp);
}

// Largest lambda with a translate of lambda*b inside c.
inline Q inradius(const Polytope& c, const Polytope& b) {
    if (c.ambient_dim() != b.ambient_dim()) throw geometry_error("dimension mismatch in inradius");
    if (!b.full_dimensional()) throw geometry_error("inradius reference body must be full-dimensional");
    if (!c.full_dimensional()) return 0;
    size_t d = c.ambient_dim();
    LinearProgram lp;
    lp.objective = unit(d + 1, d);
    for (auto& f : c.facets()) {
        Vec row = f.normal;
        row.push_back(support(b, f.normal));
        lp.leq(row, f.offset);
    }
    LPResult r = simplex(lp);
    if (!r.optimal()) throw lp_error("inradius program not solvable");
    return r.value;
}

}  // namespace toricadelic
