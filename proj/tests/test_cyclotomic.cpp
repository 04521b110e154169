#include <random>

#include <gtest/gtest.h>

#include <delta_lab/cyclotomic.hpp>

using namespace delta_lab;

TEST(Cyclo, FullSumOfRootsVanishes) {
    for (int64_t q = 1; q <= 60; ++q) {
        CycloInt c(q);
        for (int64_t k = 0; k < q; ++k) c.add(k, 1);
        ASSERT_EQ(c.to_integer(), q == 1 ? 1 : 0) << q;
    }
}

TEST(Cyclo, PrimitiveRootsSumToMobius) {
    for (int64_t q = 1; q <= 60; ++q) {
        CycloInt c(q);
        for (int64_t k = 0; k < q; ++k)
            if (std::gcd(k, q) == 1) c.add(k, 1);
        ASSERT_EQ(c.to_integer(), arith::mu(q)) << q;
    }
}

TEST(Cyclo, SingleRootIsNotInteger) {
    CycloInt minus_one(2);
    minus_one.add(1, 1);
    EXPECT_EQ(minus_one.to_integer(), -1);
    for (int64_t q = 3; q <= 30; ++q) {
        CycloInt c(q);
        c.add(1, 1);
        EXPECT_FALSE(c.as_integer().has_value());
        EXPECT_THROW(c.to_integer(), InvariantError);
    }
}

TEST(Cyclo, GaussSumSquare) {
    for (int64_t p : {3, 5, 7, 11, 13, 17}) {
        CycloInt g(p);
        for (int64_t y = 0; y < p; ++y) g.add(y * y % p, 1);
        int64_t sign = arith::jacobi(-1, p);
        EXPECT_EQ((g * g).to_integer(), sign * p);
    }
}

TEST(Cyclo, CanonicalFormIsUnique) {
    std::mt19937_64 g(1);
    for (int64_t q : {4, 6, 9, 12, 25, 36}) {
        for (int it = 0; it < 50; ++it) {
            CycloInt a(q);
            for (int64_t k = 0; k < q; ++k) a.add(k, int64_t(g() % 7) - 3);
            // adding multiples of the minimal relations does not change the value
            CycloInt b = a;
            for (auto [p, r] : arith::factor(uint64_t(q)).factors) {
                int64_t step = q / int64_t(p), shift = int64_t(g() % uint64_t(q)), w = int64_t(g() % 5) - 2;
                for (int64_t i = 0; i < int64_t(p); ++i) b.add(shift + i * step, w);
            }
            ASSERT_EQ(a.canonical().coeffs(), b.canonical().coeffs());
        }
    }
}

TEST(Cyclo, ProductMatchesShiftSum) {
    CycloInt a(12), b(12);
    a.add(1, 2), a.add(5, -1);
    b.add(3, 1), b.add(11, 4);
    CycloInt c(12);
    c.add_shifted(a, 3, 1);
    c.add_shifted(a, 11, 4);
    EXPECT_EQ((a * b).canonical().coeffs(), c.canonical().coeffs());
}
