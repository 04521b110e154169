#include <cmath>

#include <gtest/gtest.h>

#include <delta_lab/counting.hpp>
#include <delta_lab/dualgeom.hpp>

using namespace delta_lab;
using namespace delta_lab::counting;
using densities::WeightSpec;

namespace {

// full-box oracle that eliminates x1 instead of x3
CountReport naive_eliminating_first(int64_t B, const WeightSpec& w, double theta) {
    double Bd = double(B);
    int64_t R = int64_t(std::ceil(w.scale * Bd));
    int64_t cut = int64_t(std::floor(std::pow(Bd, theta) + 1e-9));
    CompensatedSum tot[2];
    uint64_t raw[2] = {0, 0};
    for (int64_t y1 = -R; y1 <= R; ++y1) {
        if (y1 == 0) continue;
        for (int64_t y2 = -R; y2 <= R; ++y2)
            for (int64_t y3 = -R; y3 <= R; ++y3) {
                int s = std::gcd(std::gcd(y1, y2), y3) > cut ? 1 : 0;
                for (int64_t x2 = -R; x2 <= R; ++x2)
                    for (int64_t x3 = -R; x3 <= R; ++x3) {
                        int64_t num = -(x2 * y2 * y2 + x3 * y3 * y3);
                        if (num % (y1 * y1)) continue;
                        int64_t x1 = num / (y1 * y1);
                        double wt = densities::weight_eval(w, {x1 / Bd, x2 / Bd, x3 / Bd, y1 / Bd, y2 / Bd, y3 / Bd});
                        if (wt == 0) continue;
                        tot[s].add(wt);
                        ++raw[s];
                    }
            }
    }
    CountReport r;
    r.strata = {{1, cut, tot[0].value(), raw[0]}, {cut + 1, R, tot[1].value(), raw[1]}};
    r.raw_count = raw[0] + raw[1];
    r.weighted_count = tot[0].value() + tot[1].value();
    return r;
}

struct Hooley {
    BigInt s0 = 0, s1 = 0;
};

Hooley hooley_by_definition(int64_t T, const Triple& d) {
    Hooley h;
    Freq f;
    for (f.m[0] = -T; f.m[0] <= T; ++f.m[0])
        for (f.m[1] = -T; f.m[1] <= T; ++f.m[1])
            for (f.m[2] = -T; f.m[2] <= T; ++f.m[2]) {
                bool ok = true;
                for (int i = 0; i < 3; ++i) ok = ok && f.m[i] != 0 && f.m[i] % d[size_t(i)] == 0;
                if (!ok) continue;
                for (f.n[0] = -T; f.n[0] <= T; ++f.n[0])
                    for (f.n[1] = -T; f.n[1] <= T; ++f.n[1])
                        for (f.n[2] = -T; f.n[2] <= T; ++f.n[2]) {
                            i128 D = dualgeom::dual_form(f);
                            if (D == 0) continue;
                            int64_t v = arith::hooley_delta(int64_t(6 * D));
                            h.s0 += v;
                            h.s1 += BigInt(v) * v;
                        }
            }
    return h;
}

}  // namespace

TEST(Counting, WalkMatchesNaiveOracle) {
    WeightSpec w;
    for (int64_t B = 1; B <= 16; ++B) {
        auto walk = count_gcd_strata(B, w, 0.75, 1);
        auto naive = count_naive(B, w, 0.75);
        ASSERT_EQ(walk.raw_count, naive.raw_count) << B;
        ASSERT_DOUBLE_EQ(walk.weighted_count, naive.weighted_count) << B;
        for (size_t s = 0; s < 2; ++s) {
            ASSERT_EQ(walk.strata[s].raw, naive.strata[s].raw) << B;
            ASSERT_DOUBLE_EQ(walk.strata[s].weighted, naive.strata[s].weighted) << B;
        }
    }
}

TEST(Counting, WalkMatchesNaiveOffDefaultWeight) {
    WeightSpec w{0.1, 1.3, "mollifier"};
    for (int64_t B : {9, 13}) {
        auto walk = count_gcd_strata(B, w, 0.75, 1);
        auto naive = count_naive(B, w, 0.75);
        EXPECT_EQ(walk.raw_count, naive.raw_count);
        EXPECT_DOUBLE_EQ(walk.weighted_count, naive.weighted_count);
    }
}

TEST(Counting, StrataInvariantUnderCoordinatePermutation) {
    WeightSpec w;
    for (int64_t B : {8, 11}) {
        auto walk = count_gcd_strata(B, w, 0.75, 1);
        auto other = naive_eliminating_first(B, w, 0.75);
        EXPECT_EQ(walk.raw_count, other.raw_count);
        for (size_t s = 0; s < 2; ++s) {
            EXPECT_EQ(walk.strata[s].raw, other.strata[s].raw);
            EXPECT_NEAR(walk.strata[s].weighted, other.strata[s].weighted, 1e-9 * walk.weighted_count);
        }
    }
}

TEST(Counting, WorkerCountDoesNotChangeResult) {
    WeightSpec w;
    auto a = count_gcd_strata(24, w, 0.75, 1), b = count_gcd_strata(24, w, 0.75, 3);
    EXPECT_EQ(a.raw_count, b.raw_count);
    EXPECT_EQ(a.weighted_count, b.weighted_count);
}

TEST(Counting, StrataSumAndUpperStratumVanishesAtFullExponent) {
    WeightSpec w;
    auto r = count_gcd_strata(40, w, 0.75, 1);
    EXPECT_EQ(r.strata[0].raw + r.strata[1].raw, r.raw_count);
    EXPECT_NEAR(r.strata[0].weighted + r.strata[1].weighted, r.weighted_count, 1e-12 * r.weighted_count);
    auto full = count_gcd_strata(40, w, 1.0, 1);
    EXPECT_EQ(full.strata[1].raw, 0u);
    EXPECT_EQ(full.strata[1].weighted, 0);
    double prev = 1;
    for (double th : {0.5, 0.75, 0.9, 1.0}) {
        auto s = count_gcd_strata(40, w, th, 1);
        double share = s.strata[1].weighted / s.weighted_count;
        EXPECT_LE(share, prev);
        prev = share;
    }
}

TEST(Counting, WeightIsOddInX) {
    WeightSpec w;
    for (double a : {-0.7, -0.2, 0.0, 0.4})
        for (double b : {-0.5, 0.3})
            EXPECT_EQ(densities::weight_eval(w, {a, b, 0.1, 0.5, -0.6, 0.7}),
                      densities::weight_eval(w, {-a, -b, -0.1, 0.5, -0.6, 0.7}));
}

TEST(Counting, Guards) {
    WeightSpec w;
    EXPECT_THROW(count_gcd_strata(kCountMaxB + 1, w), GuardError);
    EXPECT_THROW(count_naive(17, w), GuardError);
    EXPECT_THROW(count_gcd_strata(10, w, 0.0), GuardError);
}

TEST(Counting, SeriesTerms) {
    auto f = series_terms(10);
    EXPECT_EQ(double(f[1]), 1.0);
    EXPECT_EQ(double(f[4]), 0.25);
    auto S = series_partial_sums(100000);
    for (size_t t = 2; t < S.size(); ++t) ASSERT_GE(S[t], S[t - 1]);
    EXPECT_DOUBLE_EQ(double(S[4] - S[3]), 0.25);
}

TEST(Counting, SeriesExactAudit) {
    auto a = series_exact_audit(300);
    EXPECT_EQ(a.term_mismatches, 0u);
    EXPECT_LT(a.max_rel_dev, 1e-14);
}

TEST(Counting, SlopeAndStability) {
    double target = double(1 / (2 * densities::zeta3()));
    auto fit = sigma_partial(1'000'000);
    EXPECT_NEAR(fit.slope / target, 1.0, 0.05);
    auto S = series_partial_sums(1'000'000);
    auto alt = fit_partial_sums(S, 1000, 100000);
    EXPECT_NEAR(alt.slope / fit.slope, 1.0, 0.10);
}

TEST(Counting, HooleyMatchesDefinition) {
    for (Triple d : {Triple{1, 1, 1}, Triple{2, 1, 1}}) {
        auto st = hooley_ST(2, d, 1);
        auto ref = hooley_by_definition(2, d);
        EXPECT_EQ(st.s0, ref.s0);
        EXPECT_EQ(st.s1, ref.s1);
    }
    auto st3 = hooley_ST(3, {1, 2, 1}, 1);
    auto ref3 = hooley_by_definition(3, {1, 2, 1});
    EXPECT_EQ(st3.s0, ref3.s0);
    EXPECT_EQ(st3.s1, ref3.s1);
}

TEST(Counting, HooleyMonotoneAndDivisorScaling) {
    BigInt prev = 0;
    for (int64_t T = 1; T <= 6; ++T) {
        auto st = hooley_ST(T, {1, 1, 1}, 1);
        EXPECT_GE(st.s0, prev);
        prev = st.s0;
    }
    auto base = hooley_ST(8, {1, 1, 1});
    auto doubled = hooley_ST(8, {2, 1, 1});
    double r = doubled.s0.convert_to<double>() / base.s0.convert_to<double>();
    EXPECT_GE(r, 0.3);
    EXPECT_LE(r, 0.8);
}

TEST(Counting, RhoCases) {
    auto a = rho_audit(5, {1, 1, 1}, {1, 1, 1});
    EXPECT_LE(std::fabs(double(a.rho) - std::pow(5.0, 5)), 10 * std::pow(5.0, 4.5));
    auto b = rho_audit(5, {5, 1, 1}, {1, 1, 1});
    EXPECT_EQ(b.main_coeff, 1);
    EXPECT_LE(std::fabs(double(b.rho) - std::pow(5.0, 5)), 10 * std::pow(5.0, 4));
    auto c = rho_audit(3, {3, 3, 1}, {1, 1, 1});
    EXPECT_EQ(c.main_coeff, 2);
    EXPECT_LE(std::fabs(double(c.rho) - 2 * std::pow(3.0, 5)), 10 * std::pow(3.0, 4));
    EXPECT_THROW(rho_g(17, {1, 1, 1}, {1, 1, 1}), GuardError);
    EXPECT_THROW(rho_g(5, {1, 1, 1}, {1, 2, 1}), GuardError);
}

TEST(Counting, RhoHistogramOracle) {
    for (int64_t p : {2, 3, 5, 7})
        for (Triple d : {Triple{1, 1, 1}, Triple{p, 1, 1}, Triple{1, p, p}, Triple{2, 3, 5}})
            for (Triple e : {Triple{1, 1, 1}, Triple{-1, 1, 1}, Triple{1, -1, -1}})
                ASSERT_EQ(rho_g(p, d, e), rho_g_histogram(p, d, e)) << p;
}
