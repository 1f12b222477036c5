#pragma once

#include "concave.hpp"
#include "loglinear.hpp"

namespace toricadelic {

struct semantic_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { q, abstract };
enum class PlaceKind { archimedean, nonarchimedean, abstract };
enum class DatumType { canonical, metric, roof };

struct Place {
    std::string name;
    PlaceKind kind = PlaceKind::abstract;
    Z prime = 0;
    Q weight = 1;
};

// Affine form whose coefficients may involve logarithms of primes.
struct LAffine {
    LVec gradient;
    LogLinear constant;
    friend bool operator==(const LAffine& a, const LAffine& b) {
        return a.gradient == b.gradient && a.constant == b.constant;
    }
};

struct PlaceInput {
    Place place;
    DatumType type = DatumType::canonical;
    std::vector<LAffine> pieces;
};

struct VirtualSupport {
    std::vector<Cone> cones;
    std::vector<Vec> forms;  // m_sigma, one per cone
};

namespace detail {

inline bool in_cone(const Cone& c, const Vec& u) {
    size_t d = u.size(), m = c.generators.size();
    LinearProgram lp;
    lp.objective = zeros(m);
    for (size_t k = 0; k < d; ++k) {
        Vec row(m);
        for (size_t i = 0; i < m; ++i) row[i] = c.generators[i][k];
        lp.eq(row, u[k]);
    }
    for (size_t i = 0; i < m; ++i) lp.leq(-unit(m, i), 0);
    return simplex(lp).optimal();
}

inline bool strongly_convex(const Cone& c) {
    size_t d = c.generators.empty() ? 0 : c.generators[0].size(), m = c.generators.size();
    LinearProgram lp;
    lp.objective = Vec(m, Q(1));
    for (size_t k = 0; k < d; ++k) {
        Vec row(m);
        for (size_t i = 0; i < m; ++i) row[i] = c.generators[i][k];
        lp.eq(row, 0);
    }
    for (size_t i = 0; i < m; ++i) {
        lp.leq(-unit(m, i), 0);
        lp.leq(unit(m, i), 1);
    }
    return sgn(simplex(lp).value) == 0;
}

}  // namespace detail

// Checks the cheap necessary conditions for a complete fan with compatible forms.
inline void validate_fan(const VirtualSupport& s, size_t d) {
    if (s.cones.size() != s.forms.size()) throw semantic_error("fan needs one linear form per cone");
    if (s.cones.empty()) throw semantic_error("fan has no cones");
    for (size_t i = 0; i < s.cones.size(); ++i) {
        if (s.forms[i].size() != d) throw semantic_error("linear form of wrong dimension");
        if (s.cones[i].generators.empty()) throw semantic_error("cone without generators");
        for (auto& g : s.cones[i].generators)
            if (g.size() != d || is_zero(g)) throw semantic_error("bad cone generator");
        if (!detail::strongly_convex(s.cones[i])) throw semantic_error("fan cone is not strongly convex");
    }
    for (size_t i = 0; i < s.cones.size(); ++i)
        for (size_t j = i + 1; j < s.cones.size(); ++j)
            for (auto& g : s.cones[i].generators)
                for (auto& h : s.cones[j].generators)
                    if (primitive(g) == primitive(h) && dot(s.forms[i] - s.forms[j], g) != 0)
                        throw semantic_error("linear forms disagree on a shared ray");
    std::vector<Vec> probes;
    for (size_t k = 0; k < d; ++k) {
        probes.push_back(unit(d, k));
        probes.push_back(-unit(d, k));
    }
    Vec diag(d, Q(1));
    for (size_t k = 0; k < d; ++k) diag[k] = Q(static_cast<long>(k + 2));
    probes.push_back(diag);
    probes.push_back(-diag);
    for (auto& p : probes) {
        bool hit = false;
        for (auto& c : s.cones)
            if (detail::in_cone(c, p)) {
                hit = true;
                break;
            }
        if (!hit) throw semantic_error("fan is not complete (direction " + str(p) + " uncovered)");
    }
}

// Intersection over cones of m_sigma + dual cone; nullopt when empty.
inline std::optional<Polytope> polytope_of(const VirtualSupport& s) {
    size_t d = s.forms.at(0).size();
    std::vector<Halfspace> hs;
    for (size_t i = 0; i < s.cones.size(); ++i)
        for (auto& g : s.cones[i].generators) hs.push_back({-g, -dot(g, s.forms[i])});
    if (d == 0) return hull({Vec{}});
    Vec lo(d), hi(d);
    for (size_t k = 0; k < d; ++k) {
        for (int sign : {1, -1}) {
            LinearProgram lp;
            lp.objective = Q(sign) * unit(d, k);
            for (auto& h : hs) lp.leq(h.normal, h.offset);
            LPResult r = simplex(lp);
            if (r.status == LPStatus::infeasible) return std::nullopt;
            if (r.status == LPStatus::unbounded) throw semantic_error("fan is not complete: unbounded polytope");
            (sign > 0 ? hi : lo)[k] = sign * r.value;
        }
    }
    return box(lo, hi).intersect(hs);
}

struct PlaceData {
    Place place;
    DatumType type = DatumType::canonical;
    std::vector<LAffine> given;  // as supplied, for serialization
    GlobalPA metric;             // psi_v / unit, rational
    std::optional<PAConcave> roof;  // theta_v / unit, on Delta
};

// Toric adelic divisor. All roof and metric data are stored in units of a
// positive LogLinear `unit`: psi_v(u) = unit * metric(u / unit), theta_v = unit * roof.
class ToricAdelicDivisor {
public:
    size_t dim = 0;
    Mode mode = Mode::abstract;
    LogLinear unit = 1;
    std::optional<VirtualSupport> fan;
    std::optional<Polytope> delta;
    bool nef_support = true;
    std::vector<PlaceData> places;

    const Polytope& polytope() const {
        if (!delta) throw precondition_error("the polytope of this divisor is empty");
        return *delta;
    }

    bool semipositive() const { return delta.has_value() && nef_support; }

    const PlaceData* find(const std::string& name) const {
        for (auto& p : places)
            if (p.place.name == name) return &p;
        return nullptr;
    }

    PAConcave roof_of(const PlaceData& p) const {
        return p.roof ? *p.roof : PAConcave::constant(polytope(), 0);
    }

    // theta / unit = sum_v n_v theta_v / unit
    PAConcave global_roof() const {
        PAConcave sum = PAConcave::constant(polytope(), 0);
        for (auto& p : places)
            if (p.type != DatumType::canonical) sum = sum + p.place.weight * *p.roof;
        return sum;
    }

    bool all_canonical() const {
        return std::all_of(places.begin(), places.end(), [](auto& p) { return p.type == DatumType::canonical; });
    }

    LogLinear scaled(const Q& q) const { return q * unit; }
};

namespace detail {

inline LogLinear leading_normalized(const LogLinear& x) {
    Q lead = sgn(x.rational_part()) != 0 ? x.rational_part() : x.logs().begin()->second;
    LogLinear l = x / lead;
    if (l.sign() < 0) l = -l;
    return l;
}

inline Q in_units(const LogLinear& x, const LogLinear& unit, const std::string& where) {
    Q r;
    if (x.is_zero()) return 0;
    if (!x.ratio_to(unit, r))
        throw semantic_error("place " + where + ": value " + x.str() + " is not a rational multiple of the unit " +
                             unit.str());
    return r;
}

inline Polytope canonical_polytope(const std::optional<Polytope>& d) {
    if (!d) throw semantic_error("non-canonical data on a divisor with empty polytope");
    return *d;
}

}  // namespace detail

inline GlobalPA support_function(const Polytope& delta) {
    GlobalPA psi;
    psi.dim = delta.ambient_dim();
    for (auto& v : delta.vertices()) psi.pieces.push_back({v, 0});
    return psi;
}

struct DivisorInput {
    size_t dim = 0;
    Mode mode = Mode::abstract;
    std::optional<VirtualSupport> fan;
    std::optional<std::vector<Vec>> polytope;
    std::vector<PlaceInput> places;
};

inline ToricAdelicDivisor make_divisor(const DivisorInput& in) {
    ToricAdelicDivisor D;
    D.dim = in.dim;
    D.mode = in.mode;
    if (in.fan) {
        validate_fan(*in.fan, in.dim);
        D.fan = in.fan;
        D.delta = polytope_of(*in.fan);
        D.nef_support = D.delta.has_value();
        if (D.delta)
            for (auto& m : in.fan->forms)
                if (!D.delta->contains(m)) D.nef_support = false;
    } else if (in.polytope) {
        if (in.polytope->empty()) throw semantic_error("polytope needs at least one vertex");
        for (auto& v : *in.polytope)
            if (v.size() != in.dim) throw semantic_error("polytope vertex of wrong dimension");
        D.delta = hull(*in.polytope);
    } else {
        throw semantic_error("support needs a fan or a polytope");
    }

    // places
    std::set<std::string> names;
    std::set<Z> primes;
    int arch = 0;
    for (auto& p : in.places) {
        if (!names.insert(p.place.name).second) throw semantic_error("duplicate place name " + p.place.name);
        if (sgn(p.place.weight) <= 0) throw semantic_error("place " + p.place.name + ": weight must be positive");
        if (in.mode == Mode::q) {
            if (p.place.weight != 1) throw semantic_error("place " + p.place.name + ": weights are 1 over Q");
            if (p.place.kind == PlaceKind::abstract)
                throw semantic_error("place " + p.place.name + ": abstract place in Q mode");
            if (p.place.kind == PlaceKind::archimedean) ++arch;
            if (p.place.kind == PlaceKind::nonarchimedean) {
                if (!is_prime(p.place.prime)) throw semantic_error("place " + p.place.name + ": not a prime");
                if (!primes.insert(p.place.prime).second)
                    throw semantic_error("place " + p.place.name + ": prime listed twice");
            }
        } else if (p.place.kind != PlaceKind::abstract) {
            throw semantic_error("place " + p.place.name + ": only abstract places in abstract mode");
        }
    }
    if (in.mode == Mode::q && arch != 1) throw semantic_error("Q mode needs exactly one archimedean place");

    // common unit
    std::vector<std::pair<LogLinear, std::string>> values;
    for (auto& p : in.places) {
        if (p.type == DatumType::canonical) continue;
        if (p.pieces.empty()) throw semantic_error("place " + p.place.name + ": datum without pieces");
        for (auto& a : p.pieces) {
            if (a.gradient.size() != in.dim) throw semantic_error("place " + p.place.name + ": gradient of wrong dimension");
            for (auto& g : a.gradient) {
                if (p.type == DatumType::metric && !g.is_rational())
                    throw semantic_error("place " + p.place.name + ": metric gradients must be rational");
                values.push_back({g, p.place.name});
            }
            values.push_back({a.constant, p.place.name});
        }
    }
    if (in.mode == Mode::abstract)
        for (auto& [x, where] : values)
            if (!x.is_rational()) throw semantic_error("place " + where + ": logarithms need Q mode");
    for (auto& [x, where] : values)
        if (!x.is_rational()) {
            D.unit = detail::leading_normalized(x);
            break;
        }

    for (auto& p : in.places) {
        PlaceData pd;
        pd.place = p.place;
        pd.type = p.type;
        pd.given = p.pieces;
        if (p.type == DatumType::canonical) {
            if (D.delta && D.nef_support) pd.metric = support_function(*D.delta);
            D.places.push_back(std::move(pd));
            continue;
        }
        const std::string& nm = p.place.name;
        if (!D.delta) throw semantic_error("place " + nm + ": the polytope of the support is empty");
        if (!D.nef_support) throw semantic_error("place " + nm + ": a non-nef support admits only canonical places");
        if (p.type == DatumType::metric) {
            GlobalPA phi;
            phi.dim = in.dim;
            std::vector<Vec> grads;
            for (auto& a : p.pieces) {
                Vec g;
                for (auto& x : a.gradient) g.push_back(x.rational_part());
                grads.push_back(g);
                phi.pieces.push_back({g, detail::in_units(a.constant, D.unit, nm)});
            }
            if (hull(grads) != *D.delta)
                throw semantic_error("place " + nm + ": metric gradients do not span the polytope of the support");
            pd.roof = legendre_dual(phi);
            pd.metric = legendre_dual(*pd.roof);
        } else {
            std::vector<AffineForm> ps;
            for (auto& a : p.pieces) {
                Vec g;
                for (auto& x : a.gradient) g.push_back(detail::in_units(x, D.unit, nm));
                ps.push_back({g, detail::in_units(a.constant, D.unit, nm)});
            }
            pd.roof = PAConcave(*D.delta, ps);
            pd.metric = legendre_dual(*pd.roof);
        }
        D.places.push_back(std::move(pd));
    }
    // deterministic order: archimedean first, then primes ascending, then names
    std::stable_sort(D.places.begin(), D.places.end(), [](const PlaceData& a, const PlaceData& b) {
        auto key = [](const PlaceData& p) { return static_cast<int>(p.place.kind); };
        if (key(a) != key(b)) return key(a) < key(b);
        if (a.place.kind == PlaceKind::nonarchimedean) return a.place.prime < b.place.prime;
        return a.place.name < b.place.name;
    });
    return D;
}

// psi_v(u) for a LogLinear point u; canonical and unlisted places use Psi_Delta.
inline LogLinear metric_value(const ToricAdelicDivisor& D, const PlaceData* p, const LVec& u) {
    if (!D.semipositive()) throw precondition_error("metric evaluation needs a semipositive divisor");
    const GlobalPA psi = p ? p->metric : support_function(D.polytope());
    bool first = true;
    LogLinear best;
    for (auto& a : psi.pieces) {
        LogLinear v = dot(a.gradient, u) + (p ? a.constant * D.unit : LogLinear());
        if (first || compare(v, best) < 0) best = v;
        first = false;
    }
    return best;
}

// ---- reports ----

struct Minima {
    LogLinear ess;
    std::optional<LogLinear> abs;
};

inline Minima minima(const ToricAdelicDivisor& D) {
    PAConcave th = D.global_roof();
    Minima m;
    m.ess = D.scaled(maximize(th).mu);
    if (D.semipositive()) m.abs = D.scaled(minimum(th));
    return m;
}

inline LogLinear abs_minimum(const ToricAdelicDivisor& D) {
    if (!D.semipositive()) throw precondition_error("absolute minimum requested on a non-semipositive divisor");
    return *minima(D).abs;
}

struct Volumes {
    Q vol;
    LogLinear vol_hat, vol_chi_hat;
    std::optional<Polytope> gamma;
};

inline Volumes volumes(const ToricAdelicDivisor& D) {
    const Polytope& delta = D.polytope();
    PAConcave th = D.global_roof();
    Volumes v;
    unsigned d = static_cast<unsigned>(D.dim);
    v.vol = Q(factorial(d)) * volume(delta);
    v.vol_chi_hat = D.scaled(Q(factorial(d + 1)) * integral(th));
    if (sgn(maximize(th).mu) >= 0) {
        v.gamma = sup_level(th, 0);
        v.vol_hat = D.scaled(Q(factorial(d + 1)) * integral(restrict_to(th, *v.gamma)));
    }
    return v;
}

struct Positivity {
    bool pseudo_effective = false, big = false, semipositive = false, nef = false;
};

inline Positivity positivity(const ToricAdelicDivisor& D) {
    Positivity f;
    f.semipositive = D.semipositive();
    if (!D.delta) return f;
    PAConcave th = D.global_roof();
    Q mu = maximize(th).mu;
    f.pseudo_effective = sgn(mu) >= 0;
    f.big = D.delta->full_dimensional() && sgn(mu) > 0;
    f.nef = f.semipositive && sgn(minimum(th)) >= 0;
    return f;
}

// max over dom of (f - piece), concave
inline Q max_excess(const PAConcave& f, const AffineForm& piece) {
    std::vector<AffineForm> ps;
    for (auto& a : f.pieces()) ps.push_back({a.gradient - piece.gradient, a.constant - piece.constant});
    return maximize(PAConcave(f.domain(), ps)).mu;
}

namespace detail {

inline void same_unit_or_throw(const ToricAdelicDivisor& a, const ToricAdelicDivisor& b) {
    if (a.all_canonical() || b.all_canonical()) return;
    if (a.unit != b.unit) throw semantic_error("divisors carry different units (" + a.unit.str() + " vs " + b.unit.str() + ")");
}

}  // namespace detail

// Is D - E pseudo-effective? E must be semipositive.
inline bool difference_pseudo_effective(const ToricAdelicDivisor& D, const ToricAdelicDivisor& E) {
    if (!E.semipositive()) throw precondition_error("the subtracted divisor must be semipositive");
    if (!D.delta || !D.delta->contains(E.polytope())) return false;
    detail::same_unit_or_throw(D, E);
    std::set<std::string> names;
    for (auto& p : D.places) names.insert(p.place.name);
    for (auto& p : E.places) names.insert(p.place.name);
    for (auto& n : names) {
        const PlaceData* pd = D.find(n);
        const PlaceData* pe = E.find(n);
        Q wd = pd ? pd->place.weight : Q(1), we = pe ? pe->place.weight : Q(1);
        if (pd && pe && wd != we) throw semantic_error("place " + n + " has different weights");
        PAConcave te = pe ? E.roof_of(*pe) : PAConcave::constant(E.polytope(), 0);
        PAConcave td = pd ? D.roof_of(*pd) : PAConcave::constant(*D.delta, 0);
        for (auto& piece : td.pieces())
            if (sgn(max_excess(te, piece)) > 0) return false;
    }
    return true;
}

struct ZhangReport {
    Q max, mean_delta;
    std::optional<Q> mean_gamma;
    bool holds = false, equality = false, constant = false;
};

// In units of D.unit: max theta >= mean of theta over Delta (and over Gamma).
inline ZhangReport zhang_check(const ToricAdelicDivisor& D) {
    const Polytope& delta = D.polytope();
    if (!delta.full_dimensional()) throw precondition_error("Zhang check needs a full-dimensional polytope");
    PAConcave th = D.global_roof();
    ZhangReport z;
    z.max = maximize(th).mu;
    z.mean_delta = integral(th) / volume(delta);
    if (sgn(z.max) >= 0) {
        Polytope g = sup_level(th, 0);
        if (g.full_dimensional()) z.mean_gamma = integral(restrict_to(th, g)) / volume(g);
    }
    z.holds = z.max >= z.mean_delta && (!z.mean_gamma || z.max >= *z.mean_gamma);
    z.equality = z.max == z.mean_delta;
    z.constant = th.is_constant();
    return z;
}

// (D_0 ... D_d) = sum_v n_v MI(theta_{0,v}, ..., theta_{d,v})
inline LogLinear intersection_number(const std::vector<ToricAdelicDivisor>& Ds) {
    if (Ds.empty()) throw semantic_error("intersection needs d+1 divisors");
    size_t d = Ds[0].dim;
    if (Ds.size() != d + 1) throw semantic_error("intersection needs exactly d+1 divisors");
    for (auto& D : Ds) {
        if (D.dim != d) throw semantic_error("dimension mismatch in intersection");
        if (!D.semipositive()) throw precondition_error("intersection numbers need semipositive divisors");
        if (D.mode != Ds[0].mode) throw semantic_error("mixed Q and abstract modes");
    }
    std::map<std::string, Q> weights;
    for (auto& D : Ds)
        for (auto& p : D.places) {
            auto [it, fresh] = weights.emplace(p.place.name, p.place.weight);
            if (!fresh && it->second != p.place.weight) throw semantic_error("place " + p.place.name + " has different weights");
        }
    LogLinear total;
    for (auto& [name, w] : weights) {
        std::optional<LogLinear> unit;
        std::vector<PAConcave> fs;
        for (auto& D : Ds) {
            const PlaceData* p = D.find(name);
            if (p && p->type != DatumType::canonical) {
                if (unit && *unit != D.unit) throw semantic_error("place " + name + " mixes units");
                unit = D.unit;
                fs.push_back(*p->roof);
            } else {
                fs.push_back(PAConcave::constant(D.polytope(), 0));
            }
        }
        if (!unit) continue;  // all canonical: contributes zero
        total += (w * mixed_integral(fs)) * *unit;
    }
    return total;
}

// Degree-d geometric intersection (D_1 ... D_d) = MV(Delta_1, ..., Delta_d).
inline Q geometric_intersection(const std::vector<ToricAdelicDivisor>& Ds) {
    std::vector<Polytope> bodies;
    for (auto& D : Ds) bodies.push_back(D.polytope());
    return mixed_volume(bodies);
}

// D - t[place]: the roof at `place` drops by t / n_v, so the global roof drops by t.
inline ToricAdelicDivisor twist(const ToricAdelicDivisor& D, const std::string& place, const LogLinear& t) {
    ToricAdelicDivisor E = D;
    if (E.all_canonical() && E.unit == LogLinear(1) && !t.is_rational()) E.unit = detail::leading_normalized(t);
    Q tq = detail::in_units(t, E.unit, place);
    PlaceData* pd = nullptr;
    for (auto& p : E.places)
        if (p.place.name == place) pd = &p;
    if (!pd) throw semantic_error("twist at unknown place " + place);
    PAConcave r = E.roof_of(*pd);
    pd->roof = shifted(r, -tq / pd->place.weight);
    pd->metric = legendre_dual(*pd->roof);
    pd->type = DatumType::roof;
    pd->given.clear();
    for (auto& a : pd->roof->pieces()) {
        LAffine la;
        for (auto& g : a.gradient) la.gradient.push_back(g * E.unit);
        la.constant = a.constant * E.unit;
        pd->given.push_back(la);
    }
    return E;
}

// Per-place sup-gradients u_v (in units) at x0 with sum n_v u_v = 0; canonical places get 0.
struct BalancedFamily {
    Vec x0;
    std::vector<Vec> u;  // aligned with D.places
    bool unique = false;
};

inline BalancedFamily balanced_family(const ToricAdelicDivisor& D, const Vec& x0, bool check_unique) {
    size_t d = D.dim;
    std::vector<size_t> active;
    std::vector<SupDifferential> sds;
    for (size_t i = 0; i < D.places.size(); ++i)
        if (D.places[i].type != DatumType::canonical) {
            active.push_back(i);
            sds.push_back(sup_differential(*D.places[i].roof, x0));
        }
    size_t n = active.size() * d, wcol = n;
    std::vector<size_t> wstart;
    for (auto& s : sds) {
        wstart.push_back(wcol);
        wcol += s.gradients.size() + s.recession.size();
    }
    LinearProgram base;
    base.objective = zeros(wcol);
    for (size_t a = 0; a < active.size(); ++a) detail::add_membership(base, sds[a], d, a * d, 1, wstart[a]);
    for (size_t k = 0; k < d && !active.empty(); ++k) {
        Vec row = zeros(wcol);
        for (size_t a = 0; a < active.size(); ++a) row[a * d + k] = D.places[active[a]].place.weight;
        base.eq(row, 0);
    }
    BalancedFamily bf;
    bf.x0 = x0;
    bf.u.assign(D.places.size(), zeros(d));
    if (active.empty()) {
        bf.unique = true;
        return bf;
    }
    LPResult r = lp_solve(base);
    if (!r.optimal()) throw std::logic_error("no balanced family of sup-gradients (internal inconsistency)");
    for (size_t a = 0; a < active.size(); ++a)
        bf.u[active[a]] = Vec(r.x.begin() + static_cast<long>(a * d), r.x.begin() + static_cast<long>((a + 1) * d));
    if (check_unique) {
        bf.unique = true;
        for (size_t c = 0; c < n && bf.unique; ++c)
            for (int s : {1, -1}) {
                LinearProgram lp = base;
                lp.objective = Q(s) * unit(wcol, c);
                LPResult q = simplex(lp);
                if (!q.optimal() || Q(s) * q.value != r.x[c]) {
                    bf.unique = false;
                    break;
                }
            }
    }
    return bf;
}

inline Vec max_face_point(const ToricAdelicDivisor& D) { return maximize(D.global_roof()).max_face.centroid_of_vertices(); }

// Example-2 type divisor dominating D with mu_ess = mu_abs = mu_ess(D).
inline ToricAdelicDivisor tilde_upper_bound(const ToricAdelicDivisor& D) {
    if (!D.semipositive()) throw precondition_error("upper bound construction needs a semipositive divisor");
    if (!D.polytope().full_dimensional()) throw precondition_error("upper bound construction needs a full-dimensional polytope");
    Vec x0 = max_face_point(D);
    BalancedFamily bf = balanced_family(D, x0, false);
    ToricAdelicDivisor T = D;
    for (size_t i = 0; i < T.places.size(); ++i) {
        PlaceData& p = T.places[i];
        if (p.type == DatumType::canonical) continue;
        Q c = (*D.places[i].roof)(x0) - dot(bf.u[i], x0);
        AffineForm a{bf.u[i], c};
        p.type = DatumType::roof;
        p.roof = PAConcave(D.polytope(), {a});
        p.metric = legendre_dual(*p.roof);
        LAffine la;
        for (auto& g : a.gradient) la.gradient.push_back(g * D.unit);
        la.constant = c * D.unit;
        p.given = {la};
    }
    Minima mt = minima(T), md = minima(D);
    if (!difference_pseudo_effective(T, D) || mt.ess != md.ess || !mt.abs || *mt.abs != md.ess)
        throw std::logic_error("upper bound construction failed verification (internal error)");
    return T;
}

// Same divisor up to presentation (metric vs roof data).
inline bool same_roofs(const ToricAdelicDivisor& a, const ToricAdelicDivisor& b) {
    if (a.dim != b.dim || a.delta.has_value() != b.delta.has_value()) return false;
    if (a.delta && *a.delta != *b.delta) return false;
    std::set<std::string> names;
    for (auto& p : a.places) names.insert(p.place.name);
    for (auto& p : b.places) names.insert(p.place.name);
    for (auto& n : names) {
        const PlaceData* pa = a.find(n);
        const PlaceData* pb = b.find(n);
        bool ca = !pa || pa->type == DatumType::canonical, cb = !pb || pb->type == DatumType::canonical;
        if (ca && cb) continue;
        if (ca != cb) {
            const PlaceData* q = ca ? pb : pa;
            if (!q->roof->is_constant() || sgn(q->roof->pieces()[0].constant) != 0) return false;
            continue;
        }
        if (pa->place.weight != pb->place.weight) return false;
        if (a.unit == b.unit) {
            if (!(*pa->roof == *pb->roof)) return false;
        } else {
            Q r;
            if (!a.unit.ratio_to(b.unit, r) || !(r * *pa->roof == *pb->roof)) return false;
        }
    }
    return true;
}

// d! vol of the hull of the grid points of p on (1/n)Z^d; increases to d! vol(p).
inline Q inner_lattice_volume(const Polytope& p, long n) {
    size_t d = p.ambient_dim();
    Vec lo = p.vertices()[0], hi = lo;
    for (auto& v : p.vertices())
        for (size_t k = 0; k < d; ++k) {
            if (v[k] < lo[k]) lo[k] = v[k];
            if (hi[k] < v[k]) hi[k] = v[k];
        }
    std::vector<long> a(d), b(d), idx(d);
    for (size_t k = 0; k < d; ++k) {
        mpz_class t;
        mpz_cdiv_q(t.get_mpz_t(), Q(lo[k] * n).get_num_mpz_t(), Q(lo[k] * n).get_den_mpz_t());
        a[k] = t.get_si();
        mpz_fdiv_q(t.get_mpz_t(), Q(hi[k] * n).get_num_mpz_t(), Q(hi[k] * n).get_den_mpz_t());
        b[k] = t.get_si();
        if (a[k] > b[k]) return 0;
    }
    std::vector<Vec> pts;
    idx = a;
    for (;;) {
        Vec x(d);
        for (size_t k = 0; k < d; ++k) x[k] = make_q(idx[k], n);
        if (p.contains(x)) pts.push_back(x);
        size_t k = 0;
        while (k < d && idx[k] == b[k]) idx[k] = a[k], ++k;
        if (k == d) break;
        ++idx[k];
    }
    if (pts.empty()) return 0;
    return Q(factorial(static_cast<unsigned>(d))) * volume(hull(pts));
}

}  // namespace toricadelic
