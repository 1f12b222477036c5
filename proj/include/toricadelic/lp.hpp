#pragma once

#include "rational.hpp"

namespace toricadelic {

// maximize <c,x> subject to A x <= b, E x = e; x free.
struct LinearProgram {
    Vec objective;
    std::vector<Vec> A;
    Vec b;
    std::vector<Vec> E;
    Vec e;

    size_t dim() const { return objective.size(); }
    void leq(Vec a, Q rhs) { A.push_back(std::move(a)); b.push_back(std::move(rhs)); }
    void eq(Vec a, Q rhs) { E.push_back(std::move(a)); e.push_back(std::move(rhs)); }
};

enum class LPStatus { optimal, infeasible, unbounded };

struct LPResult {
    LPStatus status = LPStatus::infeasible;
    Q value;
    Vec x;
    bool optimal() const { return status == LPStatus::optimal; }
};

struct lp_error : geometry_error {
    using geometry_error::geometry_error;
};

namespace detail {

// Dense two-phase tableau simplex over Q with Bland's rule.
class Tableau {
public:
    Tableau(const LinearProgram& lp) : n_(lp.dim()) {
        size_t mi = lp.A.size(), me = lp.E.size();
        m_ = mi + me;
        slack0_ = 2 * n_;
        art0_ = slack0_ + mi;
        cols_ = art0_ + m_;
        T_.assign(m_, Vec(cols_ + 1, Q(0)));
        basis_.assign(m_, 0);
        for (size_t i = 0; i < m_; ++i) {
            const Vec& a = i < mi ? lp.A[i] : lp.E[i - mi];
            Q rhs = i < mi ? lp.b[i] : lp.e[i - mi];
            if (a.size() != n_) throw lp_error("constraint dimension mismatch");
            int s = sgn(rhs) < 0 ? -1 : 1;
            for (size_t j = 0; j < n_; ++j) {
                T_[i][j] = s * a[j];
                T_[i][n_ + j] = -s * a[j];
            }
            if (i < mi) T_[i][slack0_ + i] = s;
            T_[i][cols_] = s * rhs;
            if (i < mi && s > 0) {
                basis_[i] = slack0_ + i;
            } else {
                T_[i][art0_ + i] = 1;
                basis_[i] = art0_ + i;
            }
        }
        allowed_.assign(cols_, true);
    }

    LPResult run(const Vec& c) {
        LPResult res;
        Vec phase1(cols_, Q(0));
        bool need1 = false;
        for (size_t i = 0; i < m_; ++i)
            if (basis_[i] >= art0_) {
                phase1[basis_[i]] = -1;
                need1 = true;
            }
        if (need1) {
            optimize(phase1);
            if (sgn(value(phase1)) < 0) return res;
            drive_out_artificials();
        }
        for (size_t j = art0_; j < cols_; ++j) allowed_[j] = false;
        Vec cost(cols_, Q(0));
        for (size_t j = 0; j < n_; ++j) {
            cost[j] = c[j];
            cost[n_ + j] = -c[j];
        }
        if (!optimize(cost)) {
            res.status = LPStatus::unbounded;
            return res;
        }
        res.status = LPStatus::optimal;
        res.value = value(cost);
        Vec y(cols_, Q(0));
        for (size_t i = 0; i < m_; ++i) y[basis_[i]] = T_[i][cols_];
        res.x.assign(n_, Q(0));
        for (size_t j = 0; j < n_; ++j) res.x[j] = y[j] - y[n_ + j];
        return res;
    }

private:
    Q value(const Vec& cost) const {
        Q v = 0;
        for (size_t i = 0; i < m_; ++i) v += cost[basis_[i]] * T_[i][cols_];
        return v;
    }

    void pivot(size_t r, size_t c) {
        Q inv = 1 / T_[r][c];
        for (auto& x : T_[r]) x *= inv;
        for (size_t i = 0; i < m_; ++i) {
            if (i == r || sgn(T_[i][c]) == 0) continue;
            Q f = T_[i][c];
            for (size_t k = 0; k <= cols_; ++k)
                if (sgn(T_[r][k]) != 0) T_[i][k] -= f * T_[r][k];
        }
        basis_[r] = c;
    }

    // returns false when unbounded
    bool optimize(const Vec& cost) {
        for (;;) {
            Vec d(cols_);
            for (size_t j = 0; j < cols_; ++j) d[j] = cost[j];
            for (size_t i = 0; i < m_; ++i) {
                const Q& cb = cost[basis_[i]];
                if (sgn(cb) == 0) continue;
                for (size_t j = 0; j < cols_; ++j)
                    if (sgn(T_[i][j]) != 0) d[j] -= cb * T_[i][j];
            }
            size_t enter = cols_;
            for (size_t j = 0; j < cols_; ++j)
                if (allowed_[j] && sgn(d[j]) > 0) {
                    enter = j;
                    break;
                }
            if (enter == cols_) return true;
            size_t leave = m_;
            Q best;
            for (size_t i = 0; i < m_; ++i) {
                if (sgn(T_[i][enter]) <= 0) continue;
                Q ratio = T_[i][cols_] / T_[i][enter];
                if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (size_t i = 0; i < m_;) {
            if (basis_[i] < art0_) {
                ++i;
                continue;
            }
            size_t j = 0;
            while (j < art0_ && sgn(T_[i][j]) == 0) ++j;
            if (j < art0_) {
                pivot(i, j);
                ++i;
            } else {
                T_.erase(T_.begin() + static_cast<long>(i));
                basis_.erase(basis_.begin() + static_cast<long>(i));
                --m_;
            }
        }
    }

    size_t n_, m_, slack0_, art0_, cols_;
    std::vector<Vec> T_;
    std::vector<size_t> basis_;
    std::vector<bool> allowed_;
};

}  // namespace detail

inline LPResult simplex(const LinearProgram& lp) {
    detail::Tableau t(lp);
    return t.run(lp.objective);
}

// Optimum plus the lexicographically smallest optimal point.
inline LPResult lp_solve(const LinearProgram& lp) {
    LPResult r = simplex(lp);
    if (!r.optimal()) return r;
    LinearProgram q = lp;
    size_t n = lp.dim();
    if (!is_zero(lp.objective)) q.eq(lp.objective, r.value);
    for (size_t k = 0; k < n; ++k) {
        q.objective = -unit(n, k);
        LPResult s = simplex(q);
        if (!s.optimal()) {
            // optimal face unbounded below in x_k: settle for a point honoring earlier stages
            q.objective = zeros(n);
            r.x = simplex(q).x;
            return r;
        }
        q.eq(unit(n, k), -s.value);
        r.x = s.x;
    }
    return r;
}

}  // namespace toricadelic
