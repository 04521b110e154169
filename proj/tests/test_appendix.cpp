#include <gtest/gtest.h>

#include <delta_lab/appendix.hpp>

using namespace delta_lab;
using namespace delta_lab::appendix;

namespace {
Freq F(Triple m, Triple n) { return Freq{m, n}; }
}  // namespace

TEST(Appendix, GaussClosedMatchesDirect) {
    for (int64_t p : arith::primes_up_to(61)) {
        if (p < 3) continue;
        for (int64_t a = 1; a < p; ++a)
            for (int64_t b = 0; b < p; ++b)
                ASSERT_TRUE(same_value(gauss_direct(p, a, b), gauss_closed(p, a, b))) << p << " " << a << " " << b;
    }
}

TEST(Appendix, GaussSquare) {
    for (int64_t p : {3, 5, 7, 11, 13}) {
        CycloInt g = gauss_direct(p, 1, 0);
        EXPECT_EQ(BigInt((g * g).to_integer()), BigInt(chi(-1, p) * p)) << p;
    }
}

TEST(Appendix, GaussEvaluationMatchesDefinition) {
    for (int64_t p : {3, 5})
        for (int64_t m1 = 0; m1 < p; ++m1)
            for (int64_t n2 = 0; n2 < p; ++n2) {
                Freq f = F({m1, 1, 0}, {1, n2, 2});
                ASSERT_EQ(s_p_f2(p, f), s_p_direct(p, Cubic{}, f)) << p << to_string(f);
            }
}

TEST(Appendix, SecondCharacterInvariance) {
    for (int64_t p : {5, 7})
        for (Freq f : {F({1, 1, 1}, {1, 1, 1}), F({1, 2, 0}, {1, 0, 3}), F({0, 0, 0}, {1, 2, 3})}) {
            EXPECT_EQ(s_p_f2(p, f, 2), s_p_f2(p, f, 1)) << p;
            if (p == 5) {
                EXPECT_EQ(s_p_direct(p, Cubic{}, f, 2), s_p_direct(p, Cubic{}, f, 1));
            }
        }
}

TEST(Appendix, SalieIdentity) {
    auto r = salie_identity_check(5, F({1, 2, 3}, {1, 1, 1}));
    EXPECT_FALSE(r.skipped);
    EXPECT_TRUE(r.holds) << r.lhs << " vs " << r.rhs;
    for (const Freq& f : random_unit_n(11, 50, 7)) {
        auto c = salie_identity_check(11, f);
        ASSERT_FALSE(c.skipped);
        ASSERT_TRUE(c.holds) << to_string(f);
    }
    EXPECT_TRUE(salie_identity_check(7, F({1, 1, 1}, {0, 1, 1})).skipped);
}

TEST(Appendix, CountAnchors) {
    int smooth = 0;
    for (int64_t p : {5, 7, 13})
        for (const Freq& f : random_unit_n(p, 40, 3)) {
            auto N = n_counts(p, f);
            EXPECT_EQ(N.n3, p * p * p + p * p - p) << p << to_string(f);
            if (smooth_conic(p, f)) {
                ++smooth;
                EXPECT_EQ(N.n1, p * p) << p << to_string(f);
            }
        }
    EXPECT_GT(smooth, 0);
}

TEST(Appendix, FamilyMatchesF2AndDirect) {
    for (int64_t p : {5, 7})
        for (const Freq& f : random_unit_n(p, 6, 11)) {
            ASSERT_EQ(s_p_family(p, Cubic{-1, 0}, f), s_p_f2(p, f)) << p << to_string(f);
            if (p != 5) continue;
            for (Cubic cb : {Cubic{1, 1}, Cubic{2, 3}, Cubic{0, 1}})
                ASSERT_EQ(s_p_family(p, cb, f), s_p_direct(p, cb, f)) << cb.c1 << "," << cb.c2 << to_string(f);
        }
}

TEST(Appendix, SmallScanOfF) {
    auto r = diamond_scan(CubicId::F, 31, 2, {}, 5, 1);
    EXPECT_GT(r.evaluated, 0u);
    EXPECT_LE(r.sup_ratio, Rational(4));
    EXPECT_FALSE(r.witnesses.empty());
}

TEST(Appendix, SmallScanOfF2IsSpotChecked) {
    auto r = diamond_scan(CubicId::F2, 13, 1, {}, 5, 1, 50);
    EXPECT_GT(r.evaluated, 0u);
    EXPECT_GT(r.spot_checks, 0u);
    EXPECT_EQ(r.spot_mismatches, 0u);
}

TEST(Appendix, Guards) {
    EXPECT_THROW(s_p_direct(17, Cubic{}, Freq{}), GuardError);
    EXPECT_THROW(s_p_f2(9, Freq{}), GuardError);
    EXPECT_THROW(s_p_family(67, Cubic{}, Freq{}), GuardError);
    EXPECT_THROW(diamond_scan(CubicId::F, 211, 1), GuardError);
    EXPECT_THROW(diamond_scan(CubicId::F2, 101, 1), GuardError);
}
