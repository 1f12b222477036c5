#include <gtest/gtest.h>

#include <toricadelic/heights.hpp>

#include "oracles.hpp"

using namespace toricadelic;

namespace {

LAffine la(const char* g, const char* c) { return {{LogLinear::parse(g)}, LogLinear::parse(c)}; }

PlaceInput place(const char* name, long p, DatumType t = DatumType::canonical, std::vector<LAffine> ps = {}) {
    PlaceKind k = p == 0 ? PlaceKind::archimedean : PlaceKind::nonarchimedean;
    return {{name, k, p, 1}, t, std::move(ps)};
}

ToricAdelicDivisor segment(std::vector<PlaceInput> places) {
    DivisorInput in;
    in.dim = 1;
    in.mode = Mode::q;
    in.polytope = std::vector<Vec>{{Q(0)}, {Q(1)}};
    in.places = std::move(places);
    return make_divisor(in);
}

ToricAdelicDivisor canonical() { return segment({place("inf", 0)}); }

ToricAdelicDivisor log2_scenario() {
    return segment({place("inf", 0, DatumType::metric, {la("0", "0"), la("1", "-log(2)")}),
                    place("2", 2, DatumType::metric, {la("0", "0"), la("1", "log(2)")})});
}

const LogLinear L2 = LogLinear::log_prime(2);

}  // namespace

TEST(Valuations, ProductFormula) {
    std::mt19937_64 g(2);
    for (int it = 0; it < 50; ++it) {
        Q r = oracle::rand_q(g, 1, 200, 60);
        if (g() % 2) r = -r;
        RootPoint x{r, 1 + static_cast<long>(g() % 7)};
        LogLinear s = valuation_infinity(x);
        for (auto& p : primes_of(r)) s += valuation_at(x, p);
        EXPECT_TRUE(s.is_zero());
    }
}

TEST(Height, Examples) {
    auto C = canonical();
    for (long n = 1; n <= 6; ++n) EXPECT_EQ(height(C, {2, n}), L2 / Q(n));
    EXPECT_EQ(height(C, {1, 5}), LogLinear());
    auto T = twist(C, "inf", LogLinear(make_q(-3, 4)));
    EXPECT_EQ(height(T, {2, 3}), L2 / Q(3) + LogLinear(make_q(3, 4)));
    EXPECT_THROW(height(C, {0, 1}), semantic_error);
}

TEST(Height, WeilExamples) {
    EXPECT_EQ(weil_height(2, 1), L2);
    EXPECT_EQ(weil_height(1, 4), LogLinear());
    EXPECT_EQ(weil_height(make_q(4, 9), 3), LogLinear::log_prime(3, make_q(2, 3)));
}

TEST(Height, CanonicalEqualsWeil) {
    std::mt19937_64 g(9);
    auto C = segment({place("inf", 0), place("3", 3), place("7", 7)});
    for (int it = 0; it < 100; ++it) {
        Q r = oracle::rand_q(g, 1, 500, 90);
        if (g() % 3 == 0) r = -r;
        long n = 1 + static_cast<long>(g() % 9);
        EXPECT_EQ(height(C, {r, n}), weil_height(r, n)) << str(r) << " " << n;
    }
}

TEST(SmallSequence, Log2Scenario) {
    auto D = log2_scenario();
    auto s = small_sequence(D, 12);
    for (long k = 1; k <= 12; ++k) {
        const RootPoint& x = s.points[static_cast<size_t>(k - 1)];
        EXPECT_EQ(x.n, k);
        EXPECT_EQ(x.r, 1 / power(Q(2), k + 1));
        EXPECT_EQ(s.heights[static_cast<size_t>(k - 1)], L2 / Q(k));
    }
    EXPECT_EQ(s.mu_ess, LogLinear());
    EXPECT_EQ(s.constant, L2);
}

TEST(SmallSequence, CanonicalAndShifted) {
    auto C = canonical();
    auto s = small_sequence(C, 5);
    for (long k = 1; k <= 5; ++k) {
        EXPECT_EQ(s.points[static_cast<size_t>(k - 1)].r, 2);
        EXPECT_EQ(s.heights[static_cast<size_t>(k - 1)], weil_height(2, k));
    }
    auto K = twist(C, "inf", LogLinear(make_q(-1, 3)));
    auto t = small_sequence(K, 5);
    EXPECT_EQ(t.mu_ess, LogLinear(make_q(1, 3)));
    for (size_t i = 0; i < 5; ++i) EXPECT_EQ(t.heights[i], s.heights[i] + LogLinear(make_q(1, 3)));
}

TEST(SmallSequence, FractionalExponents) {
    // u_inf = 2/3 log 3, u_3 = -2/3 log 3
    auto D = segment({place("inf", 0, DatumType::roof, {la("2/3*log(3)", "0")}),
                      place("3", 3, DatumType::roof, {la("-2/3*log(3)", "0")})});
    auto s = small_sequence(D, 6);
    for (size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(s.points[i].n, 3 * static_cast<long>(i + 1));
        EXPECT_GE(compare(s.heights[i], s.mu_ess), 0);
        if (i) { EXPECT_LE(compare(s.heights[i], s.heights[i - 1]), 0); }
    }
    EXPECT_EQ(s.heights[5] * Q(6), s.constant);
}

TEST(SmallSequence, UnrealizableProfile) {
    auto D = segment({place("inf", 0, DatumType::roof, {la("log(3)", "0")}), place("2", 2, DatumType::roof, {la("-log(3)", "0")})});
    EXPECT_THROW(small_sequence(D, 3), semantic_error);
    auto T = segment({place("inf", 0, DatumType::roof, {la("1", "0"), la("-1", "1")})});
    EXPECT_THROW(small_sequence(T, 3), not_wide_error);
}

TEST(Experiment, Log2ScenarioExact) {
    auto D = log2_scenario();
    auto C = canonical();
    auto ex = convergence_experiment(D, C, 50);
    EXPECT_EQ(ex.derivative, L2);
    for (auto& row : ex.rows) {
        EXPECT_EQ(row.h_d, L2 / Q(row.k));
        EXPECT_EQ(row.h_e, L2 * make_q(row.k + 1, row.k));
        EXPECT_EQ(row.gap, L2 / Q(row.k));
        EXPECT_GE(compare(row.h_d, *minima(D).abs), 0);
    }
    EXPECT_EQ(ex.rows.back().gap, L2 / Q(50));
}

TEST(Experiment, SelfAndZeroDirections) {
    auto D = log2_scenario();
    auto ex = convergence_experiment(D, D, 10);
    EXPECT_EQ(ex.derivative, minima(D).ess);
    for (auto& row : ex.rows) EXPECT_EQ(row.h_e, row.h_d);
    DivisorInput in;
    in.dim = 1;
    in.mode = Mode::q;
    in.polytope = std::vector<Vec>{{Q(0)}};
    in.places = {place("inf", 0)};
    auto Z0 = make_divisor(in);
    ex = convergence_experiment(D, Z0, 10);
    for (auto& row : ex.rows) EXPECT_TRUE(row.h_e.is_zero());
    EXPECT_TRUE(ex.derivative.is_zero());
}
