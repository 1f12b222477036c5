// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <toricadelic/dynamical.hpp>
#include <toricadelic/equidist.hpp>
#include <toricadelic/heights.hpp>
#include <toricadelic/io.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <sys/wait.h>

#include "corpus.hpp"

using namespace toricadelic;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double x, int prec = 2) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << x;
    return os.str();
}

int failures = 0;

void criterion(int id, const std::string& name, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << detail << std::endl;
}

// ---------- shared oracles ----------

using Pieces = std::vector<std::pair<Vec, Q>>;

Pieces pieces_of(const PAConcave& f) {
    Pieces ps;
    for (auto& a : f.pieces()) ps.emplace_back(a.gradient, a.constant);
    return ps;
}

Q oracle_integral(const PAConcave& f) {
    auto vs = f.domain().vertices();
    if (f.dim() == 1) {
        Q lo = vs[0][0], hi = lo;
        for (auto& v : vs) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
        return oracle::integral1d(pieces_of(f), lo, hi);
    }
    return oracle::integral2d(vs, pieces_of(f));
}

// Vertex sums of several bodies, hulled independently of the library (d <= 2).
std::vector<Vec> oracle_minkowski(const std::vector<const Polytope*>& bodies) {
    std::vector<Vec> pts = {zeros(bodies[0]->ambient_dim())};
    for (auto* b : bodies) {
        std::vector<Vec> next;
        for (auto& p : pts)
            for (auto& v : b->vertices()) next.push_back(p + v);
        pts = next;
        if (pts[0].size() == 2) pts = oracle::hull2d(pts);
    }
    if (pts[0].size() == 1) {
        Q lo = pts[0][0], hi = lo;
        for (auto& p : pts) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
        return {{lo}, {hi}};
    }
    return pts;
}

// Integral of <u,x> over the hull of pts: interval or counter-clockwise polygon.
Q oracle_linear_integral(const std::vector<Vec>& pts, const Vec& u) {
    if (pts[0].size() == 1) return u[0] * (pts[1][0] * pts[1][0] - pts[0][0] * pts[0][0]) / 2;
    Q total = 0;
    for (size_t k = 1; k + 1 < pts.size(); ++k) {
        Q area = abs(oracle::cross(pts[0], pts[k], pts[k + 1])) / 2;
        total += area * dot(u, pts[0] + pts[k] + pts[k + 1]) / 3;
    }
    return total;
}

// ---------- 1. convex kernel ----------

Polytope random_full(std::mt19937_64& g, size_t d) {
    for (;;) {
        Polytope p = hull(oracle::rand_points(g, d + 2 + g() % 3, d, -3, 3, 2));
        if (p.full_dimensional()) return p;
    }
}

std::string convex_kernel() {
    auto t0 = Clock::now();
    std::mt19937_64 g(1001);
    const int n = 210;
    for (int it = 0; it < n; ++it) {
        size_t d = 1 + it % 3;
        std::string tag = "instance " + std::to_string(it) + " (d=" + std::to_string(d) + "): ";
        std::vector<Polytope> ks;
        for (size_t i = 0; i < d; ++i) ks.push_back(random_full(g, d));
        Q mv = mixed_volume(ks);
        auto perm = ks;
        std::sort(perm.begin(), perm.end(), [](const Polytope& a, const Polytope& b) { return a.str() < b.str(); });
        do require(mixed_volume(perm) == mv, tag + "mixed volume not symmetric");
        while (std::next_permutation(perm.begin(), perm.end(),
                                     [](const Polytope& a, const Polytope& b) { return a.str() < b.str(); }));
        Q df = Q(factorial(unsigned(d)));
        require(mixed_volume(std::vector<Polytope>(d, ks[0])) == df * volume(ks[0]), tag + "MV(C,...,C) != d! vol(C)");

        Vec t = oracle::rand_points(g, 1, d, -5, 5, 3)[0];
        std::vector<Polytope> kt;
        for (auto& k : ks) kt.push_back(translate(k, t));
        require(volume(kt[0]) == volume(ks[0]), tag + "volume not translation invariant");
        require(mixed_volume(kt) == mv, tag + "mixed volume not translation invariant");
        Polytope P = ks[0], A1 = random_full(g, d), A2 = random_full(g, d);
        require(inradius(translate(P, t), A1) == inradius(P, A1), tag + "inradius not translation invariant");
        for (auto& f : P.facets())
            require(width_along(translate(P, t), f.normal) == width_along(P, f.normal), tag + "width not translation invariant");

        std::vector<Polytope> pa(d, P);
        pa.back() = A1;
        Q top = df * volume(P) / mixed_volume(pa), r = inradius(P, A1);
        require(top / Q(d) <= r && r <= top, tag + "inradius sandwich violated");
        require(inradius(A2, A1) * inradius(P, A2) <= inradius(P, A1), tag + "inradius chain rule violated");
    }
    double s = seconds_since(t0);
    require(s < 60, "runtime " + fixed(s) + " s exceeds 60 s");
    return std::to_string(n) + " instances, d<=3, " + fixed(s) + " s (limit 60 s)";
}

// ---------- 2. duality and normalization ----------

std::string duality() {
    auto t0 = Clock::now();
    std::mt19937_64 g(1002);
    const int n = 200;
    for (int it = 0; it < n; ++it) {
        size_t d = 1 + it % 2;
        std::string tag = "instance " + std::to_string(it) + " (d=" + std::to_string(d) + "): ";
        PAConcave f = corpus::random_concave(g, d);
        GlobalPA psi = legendre_dual(f);
        require(legendre_dual(psi) == f, tag + "theta^** != theta");
        GlobalPA psi2 = legendre_dual(legendre_dual(psi));
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b) {
                Vec u = d == 1 ? Vec{Q(a)} : Vec{Q(a), Q(b)};
                require(psi2(u) == psi(u), tag + "psi^** != psi at " + str(u));
                // psi(u) = inf over the hypograph of <u,x> - y
                Vec w = -u;
                w.push_back(1);
                require(psi(u) == -support(f.hypograph(), w), tag + "dual is not the infimum at " + str(u));
                if (d == 1) break;
            }
        Q df1 = Q(factorial(unsigned(d + 1)));
        require(mixed_integral(std::vector<PAConcave>(d + 1, f)) == df1 * oracle_integral(f),
                tag + "MI(f,...,f) != (d+1)! integral");
        std::vector<PAConcave> fs;
        for (size_t i = 0; i <= d; ++i) fs.push_back(corpus::random_concave(g, d));
        Q mi = mixed_integral(fs);
        std::vector<size_t> idx(d + 1);
        for (size_t i = 0; i <= d; ++i) idx[i] = i;
        while (std::next_permutation(idx.begin(), idx.end())) {
            std::vector<PAConcave> p;
            for (size_t i : idx) p.push_back(fs[i]);
            require(mixed_integral(p) == mi, tag + "MI not symmetric");
        }
    }
    double s = seconds_since(t0);
    require(s < 120, "runtime " + fixed(s) + " s exceeds 120 s");
    return std::to_string(n) + " instances, d<=2, all permutations, " + fixed(s) + " s (limit 120 s)";
}

// ---------- 3. affine-against-concave closed form ----------

std::string affine_closed_form() {
    std::mt19937_64 g(1003);
    const int n = 60;
    for (int it = 0; it < n; ++it) {
        size_t d = 1 + it % 2;
        Polytope C = corpus::random_body(g, d);
        PAConcave gf = corpus::random_concave(g, d);
        const Polytope& B = gf.domain();
        AffineForm l = corpus::random_form(g, d);
        std::vector<PAConcave> args(d, PAConcave(C, {l}));
        args.push_back(gf);
        Q lhs = mixed_integral(args);

        // MI(u|C,...,u|C,u|B) = sum_J (-1)^{d+1-|J|} int_{sum_J K_j} <u,x>
        std::vector<const Polytope*> doms(d, &C);
        doms.push_back(&B);
        Q first = 0;
        for (size_t J = 1; J < (size_t(1) << (d + 1)); ++J) {
            std::vector<const Polytope*> sel;
            for (size_t j = 0; j <= d; ++j)
                if (J >> j & 1) sel.push_back(doms[j]);
            auto K = oracle_minkowski(sel);
            Q v = K.size() < d + 1 ? Q(0) : oracle_linear_integral(K, l.gradient);
            if ((d + 1 - sel.size()) % 2) first -= v;
            else first += v;
        }
        std::vector<Polytope> bodies(d - 1, C);
        bodies.push_back(B);
        Vec w = -l.gradient;
        w.push_back(1);
        Q gdual = -support(gf.hypograph(), w);
        Q rhs = first + l.constant * Q(d) * mixed_volume(bodies) - Q(factorial(unsigned(d))) * volume(C) * gdual;
        require(lhs == rhs, "instance " + std::to_string(it) + ": " + lhs.get_str() + " != " + rhs.get_str());
    }
    return std::to_string(n) + " instances (C, B, l, g), d<=2, exact";
}

// ---------- 4. vertex test against decay probe ----------

std::vector<Vec> probe_directions(const SupDifferential& s, size_t d, const std::optional<Vec>& witness) {
    std::set<Vec> dirs;
    std::vector<Vec> pts;
    for (auto& gr : s.gradients) {
        pts.push_back(gr);
        for (auto& r : s.recession) pts.push_back(gr + Q(4) * r);
    }
    Polytope sd = hull(pts);
    for (auto& f : sd.facets()) dirs.insert(primitive(f.normal));
    for (auto& e : sd.equations()) dirs.insert(primitive(e.normal));
    for (size_t k = 0; k < d; ++k) dirs.insert(unit(d, k));
    if (witness) dirs.insert(primitive(*witness));
    return {dirs.begin(), dirs.end()};
}

std::string wideness() {
    std::mt19937_64 g(1004);
    const int n = 100;
    const int kmax = 20;
    const Q small = make_q(1, 1000);
    int wide = 0, probes = 0;
    for (int it = 0; it < n; ++it) {
        size_t d = 1 + it % 2;
        std::string tag = "function " + std::to_string(it) + ": ";
        PAConcave f = corpus::random_wide_or_not(g, d);
        Maximum m = maximize(f);
        Vec x0 = m.max_face.centroid_of_vertices();
        SupDifferential s = sup_differential(f, x0);
        auto witness = symmetric_direction(s);
        bool vertex_wide = !witness;
        std::vector<Q> levels;
        for (int k = 0; k <= kmax; ++k) levels.push_back(m.mu - Q(1) / Q(Z(1) << k));

        bool probe_wide = true;
        for (auto& u : probe_directions(s, d, witness)) {
            auto r = decay_probe(f, u, levels);
            ++probes;
            for (size_t i = 1; i < r.size(); ++i) require(r[i] <= r[i - 1], tag + "probe ratios increase along " + str(u));
            if (r.back() >= small) probe_wide = false;
        }
        if (!vertex_wide) {
            // Below mu the graph is a cone over the top face down to the next breakpoint value t1;
            // there the ratio along the witness is constant, which is its limit.
            Q t1 = minimum(f);
            for (auto& [x, y] : f.breakpoints())
                if (y < m.mu) t1 = std::max(t1, y);
            Q c = decay_probe(f, *witness, {t1})[0];
            require(sgn(c) > 0, tag + "limit ratio along the witness is zero");
            auto r = decay_probe(f, *witness, levels);
            for (size_t k = 0; k <= size_t(kmax); ++k)
                if (levels[k] >= t1) require(r[k] == c, tag + "witness ratio not constant near the maximum");
            require(r.back() == c && c >= small, tag + "witness ratio limit " + c.get_str() + " below 1e-3");
        }
        require(vertex_wide == probe_wide, tag + "vertex test and decay probe disagree");
        wide += vertex_wide;
    }
    return std::to_string(n) + " functions (" + std::to_string(wide) + " wide), " + std::to_string(probes) +
           " probe directions, levels mu-2^-k for k<=20, threshold 1e-3";
}

// ---------- 5, 6. divisor corpus ----------

LAffine lift(const AffineForm& a) { return {toricadelic::lift(a.gradient), LogLinear(a.constant)}; }

ToricAdelicDivisor abstract_divisor(const Polytope& dom, const std::vector<std::vector<AffineForm>>& roofs) {
    DivisorInput in;
    in.dim = dom.ambient_dim();
    in.mode = Mode::abstract;
    in.polytope = dom.vertices();
    for (size_t i = 0; i < roofs.size(); ++i) {
        PlaceInput p{{"v" + std::to_string(i), PlaceKind::abstract, 0, make_q(long(i) + 1, 2)}, DatumType::roof, {}};
        for (auto& a : roofs[i]) p.pieces.push_back(lift(a));
        in.places.push_back(p);
    }
    return make_divisor(in);
}

struct Member {
    std::string name;
    ToricAdelicDivisor D;
};

std::vector<Member> divisor_corpus() {
    std::vector<Member> out;
    std::mt19937_64 g(1005);
    for (int it = 0; it < 40; ++it) {
        size_t d = 1 + it % 2;
        Polytope dom = corpus::random_body(g, d);
        std::vector<std::vector<AffineForm>> roofs;
        size_t places = 1 + g() % 3;
        for (size_t i = 0; i < places; ++i) {
            std::vector<AffineForm> ps;
            for (size_t j = 0, k = 1 + g() % 3; j < k; ++j) ps.push_back(corpus::random_form(g, d));
            roofs.push_back(ps);
        }
        out.push_back({"random " + std::to_string(it), abstract_divisor(dom, roofs)});
    }
    for (int it = 0; it < 10; ++it) {
        size_t d = 1 + it % 2;
        Polytope dom = corpus::random_body(g, d);
        std::vector<std::vector<AffineForm>> roofs;
        for (int i = 0; i < 2; ++i) roofs.push_back({{zeros(d), oracle::rand_q(g, -2, 2, 3)}});
        out.push_back({"constant " + std::to_string(it), abstract_divisor(dom, roofs)});
    }
    // affine roofs with weights 1/2, 1, 3/2; balanced gradients give a constant global roof
    for (int it = 0; it < 10; ++it) {
        size_t d = 1 + it % 2;
        Polytope dom = corpus::random_body(g, d);
        AffineForm a = corpus::random_form(g, d), b = corpus::random_form(g, d), c{zeros(d), oracle::rand_q(g, -2, 2, 2)};
        c.gradient = -(Q(1, 2) * a.gradient + b.gradient);
        c.gradient = make_q(2, 3) * c.gradient;
        if (it % 2) c.gradient = c.gradient + unit(d, 0);
        out.push_back({"affine " + std::to_string(it), abstract_divisor(dom, {{a}, {b}, {c}})});
    }
    for (const char* f : {"canonical_p1", "affine_log3", "tent", "log2_scenario"})
        out.push_back({f, load_divisor(std::string(TORICADELIC_DATA_DIR) + "/" + f + ".json")});
    // P^1 supports that are not nef
    for (auto [a, b] : {std::pair{"1", "0"}, std::pair{"2", "1"}}) {
        DivisorInput in;
        in.dim = 1;
        in.mode = Mode::q;
        in.fan = VirtualSupport{{Cone{{{Q(1)}}}, Cone{{{Q(-1)}}}}, {{parse_q(a)}, {parse_q(b)}}};
        in.places = {{{"inf", PlaceKind::archimedean, 0, 1}, DatumType::canonical, {}}};
        out.push_back({std::string("fan ") + a + "," + b, make_divisor(in)});
    }
    return out;
}

std::pair<Q, std::optional<Q>> oracle_means(const PAConcave& th) {
    Q vol, integ;
    std::optional<Q> gamma_mean;
    Maximum m = maximize(th);
    auto ps = pieces_of(th);
    auto vs = th.domain().vertices();
    if (th.dim() == 1) {
        Q lo = vs[0][0], hi = lo;
        for (auto& v : vs) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
        Q mean = oracle::integral1d(ps, lo, hi) / (hi - lo);
        if (sgn(m.mu) >= 0) {
            Q glo = lo, ghi = hi;
            for (auto& [gr, c] : ps) {
                if (sgn(gr[0]) > 0) glo = std::max(glo, Q(-c / gr[0]));
                if (sgn(gr[0]) < 0) ghi = std::min(ghi, Q(-c / gr[0]));
            }
            if (ghi > glo) gamma_mean = oracle::integral1d(ps, glo, ghi) / (ghi - glo);
        }
        return {mean, gamma_mean};
    }
    auto poly = oracle::hull2d(vs);
    Q mean = oracle::integral2d(poly, ps) / oracle::shoelace(poly);
    if (sgn(m.mu) >= 0) {
        auto gam = poly;
        for (auto& [gr, c] : ps)
            if (gam.size() >= 3) gam = oracle::clip(gam, -gr, c);
        if (gam.size() >= 3 && sgn(oracle::shoelace(gam)) > 0)
            gamma_mean = oracle::integral2d(gam, ps) / oracle::shoelace(gam);
    }
    return {mean, gamma_mean};
}

std::string zhang(const std::vector<Member>& members) {
    int checked = 0, equal = 0;
    for (auto& [name, D] : members) {
        if (!D.semipositive()) continue;
        PAConcave th = D.global_roof();
        ZhangReport z = zhang_check(D);
        auto [mean, gmean] = oracle_means(th);
        require(z.mean_delta == mean, name + ": mean over the polytope " + z.mean_delta.get_str() + " != " + mean.get_str());
        require(z.mean_gamma.has_value() == gmean.has_value(), name + ": disagreement on where the roof is non-negative");
        if (gmean) require(*z.mean_gamma == *gmean, name + ": mean over the non-negative region differs");
        require(z.max == maximize(th).mu, name + ": maximum differs");
        require(z.holds && z.max >= mean && (!gmean || z.max >= *gmean), name + ": Zhang inequality fails");
        bool constant = th.pieces().size() == 1 && is_zero(th.pieces()[0].gradient);
        require(z.equality == (z.max == mean), name + ": equality flag wrong");
        require(z.equality == constant, name + ": equality without a constant roof");
        if (name.rfind("affine ", 0) == 0) require(constant == ((name.back() - '0') % 2 == 0), name + ": balanced affine roofs");
        ++checked;
        equal += z.equality;
    }
    return std::to_string(checked) + " semipositive divisors, " + std::to_string(equal) +
           " with equality, all of them constant roofs";
}

std::string upper_bound(const std::vector<Member>& members) {
    int checked = 0, skipped = 0;
    for (auto& [name, D] : members) {
        if (!D.semipositive()) {
            ++skipped;
            continue;
        }
        ToricAdelicDivisor T = tilde_upper_bound(D);
        Minima mt = minima(T), md = minima(D);
        require(mt.ess == md.ess && mt.abs && *mt.abs == md.ess, name + ": minima of the upper bound");
        require(T.unit == D.unit || D.all_canonical(), name + ": unit changed");
        for (auto& p : D.places) {
            const PlaceData* q = T.find(p.place.name);
            require(q != nullptr, name + ": place dropped");
            PAConcave a = D.roof_of(p), b = T.roof_of(*q);
            // roof of T minus roof of D is >= 0 at every breakpoint of both and every vertex
            for (auto& [x, y] : a.breakpoints()) require(b(x) >= y, name + ": not dominant at " + p.place.name);
            for (auto& [x, y] : b.breakpoints()) require(y >= a(x), name + ": not dominant at " + p.place.name);
        }
        ++checked;
    }
    return std::to_string(checked) + " semipositive divisors verified, " + std::to_string(skipped) +
           " non-semipositive skipped";
}

// ---------- 7. convergence experiment ----------

std::string experiment() {
    auto t0 = Clock::now();
    auto D = load_divisor(std::string(TORICADELIC_DATA_DIR) + "/log2_scenario.json");
    auto E = canonical_like(D);
    const LogLinear L2 = LogLinear::log_prime(2);
    require(derivative_essmin(D, E) == L2, "derivative is " + derivative_essmin(D, E).str());
    Experiment ex = convergence_experiment(D, E, 50);
    require(ex.rows.size() == 50, "expected 50 rows");
    for (auto& row : ex.rows) {
        std::string k = std::to_string(row.k);
        require(row.h_d == L2 / Q(row.k), "h_D at k=" + k + " is " + row.h_d.str());
        require(row.h_e == L2 * make_q(row.k + 1, row.k), "h_E at k=" + k + " is " + row.h_e.str());
    }
    require(ex.derivative == L2, "experiment derivative is " + ex.derivative.str());
    require(ex.rows.back().gap == L2 / Q(50), "gap at k=50 is " + ex.rows.back().gap.str());
    double s = seconds_since(t0);
    require(s < 5, "runtime " + fixed(s, 3) + " s exceeds 5 s");
    return "h_D = log(2)/k and h_E = (k+1)/k log(2) for k<=50, derivative log(2), gap " + ex.rows.back().gap.str() +
           ", " + fixed(s, 3) + " s (limit 5 s)";
}

// ---------- 8. Gauss-Mahler ----------

ToricAdelicDivisor q_box(size_t d) {
    DivisorInput in;
    in.dim = d;
    in.mode = Mode::q;
    in.polytope = d == 1 ? std::vector<Vec>{{Q(0)}, {Q(1)}} : std::vector<Vec>{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    in.places = {{{"inf", PlaceKind::archimedean, 0, 1}, DatumType::canonical, {}},
                 {{"2", PlaceKind::nonarchimedean, 2, 1}, DatumType::canonical, {}}};
    return make_divisor(in);
}

Q rand_coefficient(std::mt19937_64& g) {
    Q c = make_q(1 + long(g() % 9), 1 + long(g() % 4));
    return g() % 2 ? Q(-c) : c;
}

Exponent rand_exponent(std::mt19937_64& g, size_t d) {
    Exponent e;
    int span = d == 1 ? 4 : 2;
    for (size_t i = 0; i < d; ++i) e.push_back(long(g() % (2 * span + 1)) - span);
    return e;
}

std::string gauss_mahler_checks() {
    std::mt19937_64 g(1008);
    std::vector<ToricAdelicDivisor> Ds = {q_box(1), load_divisor(std::string(TORICADELIC_DATA_DIR) + "/log2_scenario.json"),
                                          q_box(2)};
    const long points = 65536;
    double worst = 0;
    int binomials = 0;
    while (binomials < 50) {
        const ToricAdelicDivisor& D = Ds[binomials % 3];
        size_t d = D.dim;
        auto b = balanced_gradients(D);
        Exponent m1 = rand_exponent(g, d), m2 = rand_exponent(g, d);
        if (m1 == m2) continue;
        Q a = rand_coefficient(g), c = rand_coefficient(g);
        // moduli of the two monomials on the sampled torus; skip near-cancelling pairs
        double l1 = std::log(std::fabs(a.get_d())), l2 = std::log(std::fabs(c.get_d()));
        for (size_t k = 0; k < d; ++k) {
            l1 -= double(b.u[0][k].value()) * double(m1[k]);
            l2 -= double(b.u[0][k].value()) * double(m2[k]);
        }
        if (std::fabs(l1 - l2) < std::log(1.5)) continue;
        Laurent f;
        f.dim = d;
        f.add(m1, a);
        f.add(m2, c);
        Factored F{d, {{f, 1}}};
        MahlerValue closed = gauss_mahler(D, b, F, points);
        MahlerValue quad = gauss_mahler(D, b, F, points, false);
        require(closed.is_exact && !quad.is_exact, str(f) + ": path selection");
        double diff = std::fabs(quad.value() - closed.value());
        worst = std::max(worst, diff);
        require(diff <= 1e-6, str(f) + ": quadrature " + std::to_string(quad.value()) + " vs closed form " +
                                   std::to_string(closed.value()));
        ++binomials;
    }
    for (int it = 0; it < 50; ++it) {
        const ToricAdelicDivisor& D = Ds[it % 3];
        Laurent f;
        f.dim = D.dim;
        f.add(rand_exponent(g, D.dim), rand_coefficient(g));
        MahlerValue m = gauss_mahler(D, {D.dim, {{f, 1}}});
        require(m.is_exact && m.exact.is_zero(), str(f) + ": monomial measure is " + m.exact.str());
    }
    int polys = 0;
    double lowest = 1e300;
    while (polys < 50) {
        const ToricAdelicDivisor& D = Ds[polys % 3];
        Laurent f;
        f.dim = D.dim;
        for (int k = 0, n = 3 + int(g() % 2); k < n; ++k) f.add(rand_exponent(g, D.dim), rand_coefficient(g));
        if (f.is_zero() || f.is_monomial() || f.is_binomial()) continue;
        MahlerValue m = gauss_mahler(D, {D.dim, {{f, 1}}}, points);
        require(m.value() >= -m.error, str(f) + ": measure " + std::to_string(m.value()) + " below -" + std::to_string(m.error));
        lowest = std::min(lowest, m.value());
        ++polys;
    }
    std::ostringstream os;
    os << "50 binomials, max |quadrature - closed form| = " << std::scientific << std::setprecision(2) << worst
       << " (tol 1e-6, 2^16 points); 50 monomials exactly 0; 50 polynomials, min measure " << std::fixed
       << std::setprecision(4) << lowest << " >= -bound";
    return os.str();
}

// ---------- 9. semiabelian data ----------

Q rational_power(long base, long num_exp, long den_exp) {
    Z n, d;
    mpz_ui_pow_ui(n.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(num_exp));
    mpz_ui_pow_ui(d.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(den_exp));
    Q q(n, d);
    q.canonicalize();
    return q;
}

std::string semiabelian_checks() {
    int cases = 0;
    for (long l : {2L, 3L, 5L})
        for (long r = 0; r <= 4; ++r)
            for (long gg = 0; gg <= 4; ++gg) {
                if (r + gg < 1) continue;
                std::string tag = "r=" + std::to_string(r) + " g=" + std::to_string(gg) + " l=" + std::to_string(l) + ": ";
                DynamicalData data = semiabelian(r, gg, l);
                // brute force over (a1, a2) with q = (l, l^2) and l^{a1 + 2 a2} = l^{r + 2g}
                std::vector<std::pair<long, long>> want;
                for (long a1 = 0; a1 <= r + gg; ++a1) {
                    long a2 = r + gg - a1;
                    if (rational_power(l, a1 + 2 * a2, 0) == rational_power(l, r + 2 * gg, 0)) want.emplace_back(a1, a2);
                }
                std::vector<std::pair<long, long>> got;
                for (auto& a : index_set(data)) {
                    if (r > 0 && gg > 0) got.emplace_back(a[0], a[1]);
                    else if (r > 0) got.emplace_back(a[0], 0);
                    else got.emplace_back(0, a[0]);
                }
                require(want == std::vector<std::pair<long, long>>{{r, gg}}, tag + "brute force index set");
                require(got == want, tag + "index set differs");

                std::vector<long> exps;  // q_i = l^{exps_i}
                if (r > 0) exps.push_back(1);
                if (gg > 0) exps.push_back(2);
                auto steps = approximation_sequence(data, 20, Q(-1));
                require(steps.size() == 21, tag + "expected n = 0..20");
                for (long n = 0; n <= 20; ++n) {
                    auto& st = steps[size_t(n)];
                    std::string at = tag + "n=" + std::to_string(n) + ": ";
                    long es = exps.back();
                    for (size_t i = 0; i < exps.size(); ++i)
                        require(st.coefficients[i] == rational_power(l, exps[i] * n, es * n), at + "coefficient");
                    require(st.inradius_lower == rational_power(l, exps[0] * n, es * n), at + "inradius bound");
                    require(st.abs_min_scale == rational_power(l, 0, es * n), at + "scale");
                    require(st.ratio_bound && *st.ratio_bound == rational_power(l, 0, exps[0] * n), at + "ratio bound");
                }
                ++cases;
            }
    return std::to_string(cases) + " (r, g, l) cases, index set {(r,g)} and n<=20 sequences exact";
}

// ---------- 10. CLI determinism ----------

std::pair<std::string, int> run(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw Failure("cannot run " + cmd);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int st = pclose(p);
    return {out, WIFEXITED(st) ? WEXITSTATUS(st) : -1};
}

std::string cli_determinism() {
    int compared = 0;
    for (const char* file : {"canonical_p1", "affine_log3", "tent", "log2_scenario"})
        for (const char* cmd : {"analyze", "equidist", "demo"}) {
            std::string name = std::string(cmd) + "_" + file;
            std::string line = std::string("cd '") + TORICADELIC_DATA_DIR + "' && '" + TORICADELIC_CLI + "' " + cmd + " " +
                               file + ".json 2>&1";
            auto [a, ca] = run(line);
            auto [b, cb] = run(line);
            std::string got = a + "exit: " + std::to_string(ca) + "\n";
            require(a == b && ca == cb, name + ": two runs differ");
            std::ifstream in(std::string(TORICADELIC_GOLDEN_DIR) + "/" + name + ".txt", std::ios::binary);
            require(in.good(), name + ": golden file missing");
            std::stringstream golden;
            golden << in.rdbuf();
            require(golden.str() == got, name + ": output differs from golden file");
            ++compared;
        }
    return std::to_string(compared) + " command/file pairs byte-identical across two runs and to tests/golden";
}

}  // namespace

int main() {
    criterion(1, "convex kernel exactness", convex_kernel);
    criterion(2, "Legendre duality and mixed-integral normalization", duality);
    criterion(3, "mixed integral of affine roofs, closed form", affine_closed_form);
    criterion(4, "wideness: vertex test vs decay probe", wideness);
    std::vector<Member> members;
    try {
        members = divisor_corpus();
    } catch (const std::exception& e) {
        std::cout << "corpus construction failed: " << e.what() << std::endl;
    }
    criterion(5, "Zhang inequality", [&] { return zhang(members); });
    criterion(6, "upper-bound construction", [&] { return upper_bound(members); });
    criterion(7, "log 2 convergence experiment", experiment);
    criterion(8, "Gauss-Mahler measure", gauss_mahler_checks);
    criterion(9, "semiabelian dynamical data", semiabelian_checks);
    criterion(10, "CLI determinism", cli_determinism);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failures ? 1 : 0;
}
