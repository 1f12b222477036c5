#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>

#include "dynamical.hpp"
#include "heights.hpp"

namespace toricadelic {

using ojson = nlohmann::ordered_json;

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io {

// Reads a JSON tree and reports errors with the JSON pointer of the offending field.
class Reader {
public:
    Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error("field " + (path_.empty() ? std::string("/") : path_) + ": " + what);
    }
    const nlohmann::json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    Reader operator[](const std::string& key) const {
        if (!j_.is_object()) fail("expected an object");
        if (!j_.contains(key)) fail("missing field '" + key + "'");
        return {j_.at(key), path_ + "/" + key};
    }
    std::vector<Reader> items() const {
        if (!j_.is_array()) fail("expected an array");
        std::vector<Reader> out;
        for (size_t i = 0; i < j_.size(); ++i) out.push_back({j_[i], path_ + "/" + std::to_string(i)});
        return out;
    }
    std::vector<std::pair<std::string, Reader>> entries() const {
        if (!j_.is_object()) fail("expected an object");
        std::vector<std::pair<std::string, Reader>> out;
        for (auto it = j_.begin(); it != j_.end(); ++it) out.push_back({it.key(), {it.value(), path_ + "/" + it.key()}});
        return out;
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    long integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<long>();
    }
    Q rational() const {
        if (j_.is_number_integer()) return Q(j_.get<long>());
        if (!j_.is_string()) fail("expected a rational written as a \"p/q\" string");
        try {
            return parse_q(j_.get<std::string>());
        } catch (const std::exception&) {
            fail("malformed rational '" + j_.get<std::string>() + "'");
        }
    }
    LogLinear loglinear() const {
        if (j_.is_number_integer()) return LogLinear(j_.get<long>());
        if (!j_.is_string()) fail("expected a number written as a string");
        try {
            return LogLinear::parse(j_.get<std::string>());
        } catch (const std::exception&) {
            fail("malformed number '" + j_.get<std::string>() + "'");
        }
    }
    Vec vec(size_t d) const {
        Vec v;
        for (auto& x : items()) v.push_back(x.rational());
        if (v.size() != d) fail("expected " + std::to_string(d) + " coordinates");
        return v;
    }
    LVec lvec(size_t d) const {
        LVec v;
        for (auto& x : items()) v.push_back(x.loglinear());
        if (v.size() != d) fail("expected " + std::to_string(d) + " coordinates");
        return v;
    }

private:
    const nlohmann::json& j_;
    std::string path_;
};

inline nlohmann::json parse_text(const std::string& text, const std::string& source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw parse_error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path + ": cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string q(const Q& x) { return str(x); }

inline ojson vec_json(const Vec& v) {
    ojson a = ojson::array();
    for (auto& x : v) a.push_back(q(x));
    return a;
}

inline ojson lvec_json(const LVec& v) {
    ojson a = ojson::array();
    for (auto& x : v) a.push_back(x.str());
    return a;
}

inline std::string fmt(long double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12Lg", x);
    return buf;
}

inline const char* kind_name(PlaceKind k) {
    switch (k) {
        case PlaceKind::archimedean: return "archimedean";
        case PlaceKind::nonarchimedean: return "nonarchimedean";
        default: return "abstract";
    }
}

inline const char* type_name(DatumType t) {
    switch (t) {
        case DatumType::metric: return "metric";
        case DatumType::roof: return "roof";
        default: return "canonical";
    }
}

}  // namespace io

inline DivisorInput divisor_input(const nlohmann::json& j) {
    io::Reader r(j, "");
    DivisorInput in;
    long d = r["dim"].integer();
    if (d < 0 || d > 6) r["dim"].fail("dimension must be between 0 and 6");
    in.dim = static_cast<size_t>(d);
    std::string mode = r["mode"].string();
    if (mode == "q")
        in.mode = Mode::q;
    else if (mode == "abstract")
        in.mode = Mode::abstract;
    else
        r["mode"].fail("expected \"q\" or \"abstract\"");
    io::Reader sup = r["support"];
    if (sup.has("fan") == sup.has("polytope")) sup.fail("expected exactly one of 'fan' or 'polytope'");
    if (sup.has("fan")) {
        VirtualSupport vs;
        for (auto& c : sup["fan"]["cones"].items()) {
            Cone cone;
            for (auto& g : c.items()) cone.generators.push_back(g.vec(in.dim));
            vs.cones.push_back(cone);
        }
        for (auto& m : sup["fan"]["forms"].items()) vs.forms.push_back(m.vec(in.dim));
        in.fan = vs;
    } else {
        std::vector<Vec> pts;
        for (auto& p : sup["polytope"].items()) pts.push_back(p.vec(in.dim));
        in.polytope = pts;
    }
    for (auto& p : r["places"].items()) {
        PlaceInput pi;
        pi.place.name = p["name"].string();
        if (pi.place.name.empty()) p["name"].fail("empty place name");
        std::string kind = p["kind"].string();
        if (kind == "archimedean")
            pi.place.kind = PlaceKind::archimedean;
        else if (kind == "nonarchimedean")
            pi.place.kind = PlaceKind::nonarchimedean;
        else if (kind == "abstract")
            pi.place.kind = PlaceKind::abstract;
        else
            p["kind"].fail("expected archimedean, nonarchimedean or abstract");
        if (pi.place.kind == PlaceKind::nonarchimedean) {
            Q pr = p["prime"].rational();
            if (pr.get_den() != 1) p["prime"].fail("expected an integer");
            pi.place.prime = pr.get_num();
        }
        pi.place.weight = p.has("weight") ? p["weight"].rational() : Q(1);
        io::Reader dat = p["datum"];
        std::string type = dat["type"].string();
        if (type == "canonical")
            pi.type = DatumType::canonical;
        else if (type == "metric")
            pi.type = DatumType::metric;
        else if (type == "roof")
            pi.type = DatumType::roof;
        else
            dat["type"].fail("expected canonical, metric or roof");
        if (pi.type != DatumType::canonical)
            for (auto& a : dat["pieces"].items()) pi.pieces.push_back({a["gradient"].lvec(in.dim), a["constant"].loglinear()});
        in.places.push_back(pi);
    }
    return in;
}

inline ToricAdelicDivisor parse_divisor(const std::string& text, const std::string& source = "input") {
    return make_divisor(divisor_input(io::parse_text(text, source)));
}

inline ToricAdelicDivisor load_divisor(const std::string& path) { return parse_divisor(io::read_file(path), path); }

// Normalized form: places in canonical order, polytope given by its sorted vertices.
inline ojson divisor_json(const ToricAdelicDivisor& D) {
    ojson j;
    j["dim"] = D.dim;
    j["mode"] = D.mode == Mode::q ? "q" : "abstract";
    ojson sup;
    if (D.fan) {
        ojson cones = ojson::array(), forms = ojson::array();
        for (auto& c : D.fan->cones) {
            ojson gs = ojson::array();
            for (auto& g : c.generators) gs.push_back(io::vec_json(g));
            cones.push_back(gs);
        }
        for (auto& m : D.fan->forms) forms.push_back(io::vec_json(m));
        sup["fan"] = {{"cones", cones}, {"forms", forms}};
    } else {
        ojson vs = ojson::array();
        for (auto& v : D.polytope().vertices()) vs.push_back(io::vec_json(v));
        sup["polytope"] = vs;
    }
    j["support"] = sup;
    ojson places = ojson::array();
    for (auto& p : D.places) {
        ojson o;
        o["name"] = p.place.name;
        o["kind"] = io::kind_name(p.place.kind);
        if (p.place.kind == PlaceKind::nonarchimedean) o["prime"] = p.place.prime.get_str();
        o["weight"] = io::q(p.place.weight);
        ojson dat;
        dat["type"] = io::type_name(p.type);
        if (p.type != DatumType::canonical) {
            ojson ps = ojson::array();
            for (auto& a : p.given) ps.push_back({{"gradient", io::lvec_json(a.gradient)}, {"constant", a.constant.str()}});
            dat["pieces"] = ps;
        }
        o["datum"] = dat;
        places.push_back(o);
    }
    j["places"] = places;
    return j;
}

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

// ---- reports ----

namespace io {

// affine form f scaled by unit, as gradient/constant strings
inline ojson scaled_form(const AffineForm& a, const LogLinear& unit) {
    LVec g;
    for (auto& x : a.gradient) g.push_back(x * unit);
    return {{"gradient", lvec_json(g)}, {"constant", (a.constant * unit).str()}};
}

inline ojson function_json(const PAConcave& f, const LogLinear& unit) {
    ojson ps = ojson::array();
    for (auto& a : f.pieces()) ps.push_back(scaled_form(a, unit));
    return ps;
}

inline ojson polytope_json(const Polytope& p) {
    ojson vs = ojson::array(), fs = ojson::array();
    for (auto& v : p.vertices()) vs.push_back(vec_json(v));
    for (auto& h : p.halfspaces()) fs.push_back({{"normal", vec_json(h.normal)}, {"offset", q(h.offset)}});
    return {{"dim", p.dim()}, {"vertices", vs}, {"halfspaces", fs}};
}

inline ojson number(const LogLinear& x) { return {{"exact", x.str()}, {"float", fmt(x.value())}}; }

}  // namespace io

inline ojson analyze_report(const ToricAdelicDivisor& D) {
    ojson j;
    j["dim"] = D.dim;
    j["mode"] = D.mode == Mode::q ? "q" : "abstract";
    j["unit"] = D.unit.str();
    if (!D.delta) {
        j["polytope"] = nullptr;
        Positivity f = positivity(D);
        j["positivity"] = {{"pseudo_effective", f.pseudo_effective}, {"big", f.big}, {"semipositive", f.semipositive}, {"nef", f.nef}};
        j["note"] = "the polytope of the support is empty";
        return j;
    }
    j["polytope"] = io::polytope_json(*D.delta);
    j["nef_support"] = D.nef_support;
    ojson roofs = ojson::array();
    for (auto& p : D.places)
        roofs.push_back({{"place", p.place.name}, {"weight", io::q(p.place.weight)}, {"type", io::type_name(p.type)},
                         {"roof", io::function_json(D.roof_of(p), D.unit)}});
    j["roofs"] = roofs;
    j["global_roof"] = io::function_json(D.global_roof(), D.unit);
    Minima m = minima(D);
    j["minima"] = {{"ess", io::number(m.ess)}, {"abs", m.abs ? io::number(*m.abs) : ojson(nullptr)}};
    Volumes v = volumes(D);
    j["volumes"] = {{"vol", io::q(v.vol)},
                    {"vol_hat", io::number(v.vol_hat)},
                    {"vol_chi_hat", io::number(v.vol_chi_hat)},
                    {"gamma", v.gamma ? io::polytope_json(*v.gamma) : ojson(nullptr)}};
    Positivity f = positivity(D);
    j["positivity"] = {{"pseudo_effective", f.pseudo_effective}, {"big", f.big}, {"semipositive", f.semipositive}, {"nef", f.nef}};
    if (D.delta->full_dimensional()) {
        ZhangReport z = zhang_check(D);
        j["zhang"] = {{"max", io::number(D.scaled(z.max))},
                      {"mean_over_polytope", io::number(D.scaled(z.mean_delta))},
                      {"mean_over_gamma", z.mean_gamma ? io::number(D.scaled(*z.mean_gamma)) : ojson(nullptr)},
                      {"holds", z.holds},
                      {"roof_constant", z.constant},
                      {"verdict", z.equality ? "Zhang equality attained" : "strict Zhang inequality"}};
    } else {
        j["zhang"] = "skipped: the polytope is not full-dimensional";
    }
    return j;
}

struct EquidistOptions {
    std::optional<ToricAdelicDivisor> along;
    std::optional<std::string> poly;
    long points = 65536;
};

inline ojson equidist_report(const ToricAdelicDivisor& D, const EquidistOptions& opt) {
    ojson j;
    WideReport w = is_wide(D);
    j["wide"] = w.wide;
    j["verdict"] = w.wide ? "WIDE" : "NOT WIDE";
    j["base_point"] = io::vec_json(w.x0);
    ojson sd = ojson::array(), rec = ojson::array();
    for (auto& g : w.differential.gradients) {
        LVec l;
        for (auto& x : g) l.push_back(x * D.unit);
        sd.push_back(io::lvec_json(l));
    }
    for (auto& g : w.differential.recession) rec.push_back(io::vec_json(g));
    j["sup_differential"] = {{"gradients", sd}, {"recession", rec}};
    j["witness"] = w.witness ? io::vec_json(*w.witness) : ojson(nullptr);
    BalancedGradients b = balanced_gradients(D);
    ojson bal = ojson::array();
    for (size_t i = 0; i < D.places.size(); ++i) bal.push_back({{"place", D.places[i].place.name}, {"u", io::lvec_json(b.u[i])}});
    j["balanced_gradients"] = {{"unique", b.unique}, {"family", bal}};
    if (!w.wide) {
        j["measures"] = "refused: the roof is not wide, so equidistribution is not asserted";
        return j;
    }
    ojson ms = ojson::array();
    for (auto& m : equidistribution_measures(D))
        ms.push_back({{"place", m.place.name}, {"kind", str(m.kind)}, {"u", io::lvec_json(m.u)}});
    j["measures"] = ms;
    if (opt.along) j["derivative"] = io::number(derivative_essmin(D, *opt.along, b));
    if (opt.poly) {
        Factored f = parse_polynomial(*opt.poly, D.dim);
        MahlerValue m = gauss_mahler(D, b, f, opt.points);
        ojson mj;
        mj["polynomial"] = str(f.expand());
        mj["exact"] = m.is_exact;
        mj["exact_part"] = m.exact.str();
        mj["value"] = io::fmt(m.value());
        if (!m.is_exact) {
            mj["error_bound"] = io::fmt(m.error);
            mj["singular_samples"] = m.singular;
        }
        mj["eligibility"] = str(log_equidistribution_eligible(m));
        j["gauss_mahler"] = mj;
        if (opt.along) {
            LogLinear der = derivative_essmin(D, *opt.along, b) + m.exact;
            j["derivative_with_twist"] = {{"exact_part", der.str()}, {"value", io::fmt(der.value() + m.numeric)}};
        }
    }
    return j;
}

inline DynamicalData dynamical_input(const nlohmann::json& j, long* n_max, std::optional<Q>* mu_abs) {
    io::Reader r(j, "");
    DynamicalData data;
    if (r.has("semiabelian")) {
        io::Reader s = r["semiabelian"];
        data = semiabelian(s["r"].integer(), s["g"].integer(), s["l"].integer());
    } else {
        for (auto& x : r["q"].items()) data.q.push_back(x.rational());
        data.dim = r["d"].integer();
        data.degree = r["deg"].rational();
        if (r.has("s") && r["s"].integer() != static_cast<long>(data.q.size())) r["s"].fail("does not match the length of q");
    }
    auto table = [&](const char* key, std::map<IndexTuple, TableEntry>& out) {
        if (!r.has(key)) return;
        for (auto& [k, v] : r[key].entries()) {
            IndexTuple a;
            std::stringstream ss(k);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    a.push_back(std::stol(tok));
                } catch (const std::exception&) {
                    v.fail("malformed index tuple '" + k + "'");
                }
            }
            if (v.raw().is_string()) {
                try {
                    out[a] = parse_q(v.raw().get<std::string>());
                } catch (const std::exception&) {
                    out[a] = v.raw().get<std::string>();
                }
            } else {
                out[a] = v.rational();
            }
        }
    };
    table("table", data.table);
    table("geometric", data.geometric);
    if (r.has("self_intersection")) data.self_intersection = r["self_intersection"].rational();
    if (r.has("n_max") && n_max) *n_max = r["n_max"].integer();
    if (r.has("mu_abs") && mu_abs) *mu_abs = r["mu_abs"].rational();
    return data;
}

inline ojson dynamics_report(const DynamicalData& data, long n_max, std::optional<Q> mu_abs) {
    ojson j;
    ojson qs = ojson::array();
    for (auto& x : data.q) qs.push_back(io::q(x));
    j["q"] = qs;
    j["d"] = data.dim;
    j["deg"] = io::q(data.degree);
    auto I = index_set(data);
    ojson is = ojson::array();
    for (auto& a : I) is.push_back(index_str(a));
    j["index_set"] = is;
    DerivativeFormula f = derivative_formula(data, I);
    ojson terms = ojson::array();
    for (auto& t : f.terms) terms.push_back({{"a", index_str(t.a)}, {"coefficient", t.coefficient.get_str()}, {"symbol", t.symbol}});
    j["formula"] = {{"terms", terms}, {"symbolic", f.symbolic}};
    if (f.geometric_sum) j["formula"]["geometric_sum"] = io::q(*f.geometric_sum);
    if (f.value) j["formula"]["value"] = io::q(*f.value);
    ojson warn = ojson::array();
    for (auto& w : f.warnings) warn.push_back(w);
    j["warnings"] = warn;
    ojson steps = ojson::array();
    for (auto& s : approximation_sequence(data, n_max, mu_abs)) {
        ojson o;
        o["n"] = s.n;
        o["coefficients"] = io::vec_json(s.coefficients);
        o["inradius_lower"] = io::q(s.inradius_lower);
        o["abs_min_scale"] = io::q(s.abs_min_scale);
        if (s.ratio_bound) o["ratio_bound"] = io::q(*s.ratio_bound);
        steps.push_back(o);
    }
    j["approximation"] = steps;
    return j;
}

// Canonical divisor with the polytope and places of D.
inline ToricAdelicDivisor canonical_like(const ToricAdelicDivisor& D) {
    DivisorInput in;
    in.dim = D.dim;
    in.mode = D.mode;
    in.polytope = D.polytope().vertices();
    for (auto& p : D.places) in.places.push_back({p.place, DatumType::canonical, {}});
    return make_divisor(in);
}

inline ojson demo_report(const Experiment& ex) {
    ojson j;
    j["mu_ess"] = io::number(ex.mu_ess);
    j["derivative"] = io::number(ex.derivative);
    j["rate_constant"] = io::number(ex.constant);
    ojson rows = ojson::array();
    for (auto& r : ex.rows)
        rows.push_back({{"k", r.k},
                        {"n", r.x.n},
                        {"r", io::q(r.x.r)},
                        {"h_D", r.h_d.str()},
                        {"h_D_float", io::fmt(r.h_d.value())},
                        {"h_E", r.h_e.str()},
                        {"h_E_float", io::fmt(r.h_e.value())},
                        {"gap", r.gap.str()}});
    j["rows"] = rows;
    if (!ex.rows.empty()) j["final_gap"] = io::number(ex.rows.back().gap);
    return j;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
    return r + "\"";
}

inline std::string demo_csv(const Experiment& ex) {
    std::string s = "k,n,r,h_D,h_D_float,h_E,h_E_float,gap\n";
    for (auto& r : ex.rows) {
        s += std::to_string(r.k) + "," + std::to_string(r.x.n) + "," + csv_field(io::q(r.x.r)) + "," + csv_field(r.h_d.str()) +
             "," + io::fmt(r.h_d.value()) + "," + csv_field(r.h_e.str()) + "," + io::fmt(r.h_e.value()) + "," +
             csv_field(r.gap.str()) + "\n";
    }
    return s;
}

// Indented key: value rendering of a report.
inline void render_text(const ojson& j, std::string& out, int indent = 0) {
    std::string pad(static_cast<size_t>(indent), ' ');
    auto scalar = [](const ojson& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return std::string("none");
        return v.dump();
    };
    auto flat = [&](const ojson& v) {
        if (!v.is_array()) return false;
        for (auto& x : v)
            if (x.is_structured() && !(x.is_array() && std::all_of(x.begin(), x.end(), [](auto& y) { return !y.is_structured(); })))
                return false;
        return true;
    };
    auto inline_array = [&](const ojson& v) {
        std::string s = "[";
        bool first = true;
        for (auto& x : v) {
            if (!first) s += ", ";
            first = false;
            if (x.is_array()) {
                s += "(";
                bool f2 = true;
                for (auto& y : x) {
                    if (!f2) s += ", ";
                    f2 = false;
                    s += scalar(y);
                }
                s += ")";
            } else {
                s += scalar(x);
            }
        }
        return s + "]";
    };
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const ojson& v = it.value();
            if (v.is_object() || (v.is_array() && !flat(v))) {
                out += pad + it.key() + ":\n";
                render_text(v, out, indent + 2);
            } else if (v.is_array()) {
                out += pad + it.key() + ": " + inline_array(v) + "\n";
            } else {
                out += pad + it.key() + ": " + scalar(v) + "\n";
            }
        }
    } else if (j.is_array()) {
        for (auto& v : j) {
            if (v.is_object()) {
                std::string sub;
                render_text(v, sub, indent + 2);
                sub.replace(static_cast<size_t>(indent), 2, "- ");
                out += sub;
            } else if (v.is_array()) {
                out += pad + "- " + (flat(v) ? inline_array(v) : std::string("")) + "\n";
                if (!flat(v)) render_text(v, out, indent + 2);
            } else {
                out += pad + "- " + scalar(v) + "\n";
            }
        }
    } else {
        out += pad + scalar(j) + "\n";
    }
}

inline std::string text(const ojson& j) {
    std::string s;
    render_text(j, s);
    return s;
}

}  // namespace toricadelic
