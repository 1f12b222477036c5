#pragma once

#include <variant>

#include "toric.hpp"

namespace toricadelic {

using IndexTuple = std::vector<long>;
using TableEntry = std::variant<std::string, Q>;  // symbol or value

struct DynamicalData {
    std::vector<Q> q;  // 1 < q_1 <= ... <= q_s
    Q degree;          // deg(phi)
    long dim = 0;
    std::map<IndexTuple, TableEntry> table;      // (E . prod D_i^{a_i}), arithmetic
    std::map<IndexTuple, TableEntry> geometric;  // (prod D_i^{a_i})
    std::optional<Q> self_intersection;          // (D^d) when known

    size_t s() const { return q.size(); }
};

inline void validate(const DynamicalData& data) {
    if (data.q.empty()) throw semantic_error("dynamical data needs at least one degree q_i");
    for (size_t i = 0; i < data.q.size(); ++i) {
        if (data.q[i] <= 1) throw semantic_error("degree q_" + std::to_string(i + 1) + " must exceed 1");
        if (i && data.q[i] < data.q[i - 1]) throw semantic_error("degrees q_i must be non-decreasing");
    }
    if (sgn(data.degree) <= 0) throw semantic_error("map degree must be positive");
    if (data.dim < 0) throw semantic_error("dimension must be non-negative");
    for (auto* t : {&data.table, &data.geometric})
        for (auto& [a, e] : *t)
            if (a.size() != data.s()) throw semantic_error("table index of the wrong length");
}

namespace detail {

inline void compositions(long total, size_t parts, IndexTuple& cur, std::vector<IndexTuple>& out) {
    if (cur.size() + 1 == parts) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (long a = total; a >= 0; --a) {
        cur.push_back(a);
        compositions(total - a, parts, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

// All a in N^s with sum a_i = d, ordered lexicographically.
inline std::vector<IndexTuple> compositions(long d, size_t s) {
    std::vector<IndexTuple> out;
    IndexTuple cur;
    detail::compositions(d, s, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

// a with sum a_i = d and prod q_i^{a_i} = deg(phi)
inline std::vector<IndexTuple> index_set(const DynamicalData& data) {
    validate(data);
    std::vector<IndexTuple> out;
    for (auto& a : compositions(data.dim, data.s())) {
        Q p = 1;
        for (size_t i = 0; i < a.size(); ++i) p *= power(data.q[i], a[i]);
        if (p == data.degree) out.push_back(a);
    }
    return out;
}

inline Z multinomial(const IndexTuple& a) {
    long n = 0;
    for (long x : a) n += x;
    Z r = factorial(static_cast<unsigned>(n));
    for (long x : a) r /= factorial(static_cast<unsigned>(x));
    return r;
}

inline std::string index_str(const IndexTuple& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s + ")";
}

inline std::string entry_str(const TableEntry& e) {
    return std::holds_alternative<Q>(e) ? str(std::get<Q>(e)) : std::get<std::string>(e);
}

struct FormulaTerm {
    IndexTuple a;
    Z coefficient;  // d! / prod a_i!
    std::string symbol;
    std::optional<TableEntry> value;
};

struct DerivativeFormula {
    std::vector<FormulaTerm> terms;
    std::string symbolic;
    std::optional<Q> numerator, denominator, value;
    std::optional<Q> geometric_sum;  // sum over I of coefficient * (prod D_i^{a_i})
    bool self_intersection_consistent = true;
    std::vector<std::string> warnings;
};

inline std::string default_symbol(const IndexTuple& a) {
    std::string s = "(E";
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        s += ".D" + std::to_string(i + 1);
        if (a[i] != 1) s += "^" + std::to_string(a[i]);
    }
    return s + ")";
}

// (1/(D^d)) sum_{a in I} (d choose a) (E . prod D_i^{a_i})
inline DerivativeFormula derivative_formula(const DynamicalData& data, const std::vector<IndexTuple>& I) {
    DerivativeFormula f;
    if (I.empty()) f.warnings.push_back("index set is empty; (D^d) = 0 or the degrees are inconsistent");
    bool numeric = !data.table.empty(), all_values = true;
    Q num = 0;
    for (auto& a : I) {
        FormulaTerm t{a, multinomial(a), default_symbol(a), std::nullopt};
        auto it = data.table.find(a);
        if (it != data.table.end()) {
            t.value = it->second;
            if (std::holds_alternative<std::string>(it->second)) {
                t.symbol = std::get<std::string>(it->second);
                all_values = false;
            } else {
                num += Q(t.coefficient) * std::get<Q>(it->second);
            }
        } else {
            if (numeric) throw semantic_error("intersection table has no entry for a = " + index_str(a));
            all_values = false;
        }
        f.terms.push_back(t);
    }
    std::string sum;
    for (auto& t : f.terms) {
        if (!sum.empty()) sum += " + ";
        sum += (t.coefficient == 1 ? "" : t.coefficient.get_str() + "*") + t.symbol;
    }
    f.symbolic = "(" + (sum.empty() ? std::string("0") : sum) + ") / (D^" + std::to_string(data.dim) + ")";

    bool geo_numeric = !I.empty();
    Q geo = 0;
    for (auto& a : I) {
        auto it = data.geometric.find(a);
        if (it == data.geometric.end() || !std::holds_alternative<Q>(it->second)) {
            geo_numeric = false;
            break;
        }
        geo += Q(multinomial(a)) * std::get<Q>(it->second);
    }
    if (geo_numeric) f.geometric_sum = geo;
    if (data.self_intersection)
        f.denominator = data.self_intersection;
    else if (geo_numeric)
        f.denominator = geo;
    if (data.self_intersection && geo_numeric && geo != *data.self_intersection) {
        f.self_intersection_consistent = false;
        f.warnings.push_back("sum over the index set of geometric terms differs from the given (D^d)");
    }
    if (numeric && all_values && !I.empty()) {
        f.numerator = num;
        if (f.denominator && sgn(*f.denominator) != 0) f.value = num / *f.denominator;
    }
    return f;
}

struct ApproximationStep {
    long n = 0;
    std::vector<Q> coefficients;  // (q_i / q_s)^n
    Q inradius_lower;             // (q_1 / q_s)^n
    Q abs_min_scale;              // q_s^{-n}
    std::optional<Q> ratio_bound; // -mu_abs / q_1^n
};

inline std::vector<ApproximationStep> approximation_sequence(const DynamicalData& data, long n_max,
                                                             std::optional<Q> mu_abs = std::nullopt) {
    validate(data);
    if (n_max < 0) throw semantic_error("n_max must be non-negative");
    if (mu_abs && sgn(*mu_abs) > 0) throw semantic_error("the ratio bound assumes mu_abs <= 0");
    const Q& qs = data.q.back();
    std::vector<ApproximationStep> out;
    for (long n = 0; n <= n_max; ++n) {
        ApproximationStep st;
        st.n = n;
        for (auto& qi : data.q) st.coefficients.push_back(power(qi / qs, n));
        st.inradius_lower = power(data.q.front() / qs, n);
        st.abs_min_scale = power(qs, -n);
        if (mu_abs) st.ratio_bound = -*mu_abs / power(data.q.front(), n);
        out.push_back(st);
    }
    return out;
}

// M ~ q = l, pi^* N ~ q = l^2, d = r + g, deg = l^(r + 2g)
inline DynamicalData semiabelian(long r, long g, long l) {
    if (r < 0 || g < 0 || r + g < 1) throw semantic_error("semiabelian data needs r, g >= 0 and r + g >= 1");
    if (l < 2) throw semantic_error("semiabelian data needs l >= 2");
    DynamicalData data;
    Q L(l);
    if (r > 0) data.q.push_back(L);
    if (g > 0) data.q.push_back(L * L);
    data.dim = r + g;
    data.degree = power(L, r + 2 * g);
    return data;
}

}  // namespace toricadelic
