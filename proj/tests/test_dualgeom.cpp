#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <delta_lab/dualgeom.hpp>

using namespace delta_lab;
using namespace delta_lab::dualgeom;

namespace {

Freq F(Triple m, Triple n) { return Freq{m, n}; }

// sparse polynomial in (m1, m2, m3, n1, n2, n3)
struct Poly {
    using Mono = std::array<int, 6>;
    std::map<Mono, i128> terms;

    static Poly var(int k) {
        Poly p;
        Mono e{};
        e[size_t(k)] = 1;
        p.terms[e] = 1;
        return p;
    }
    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (auto& [e, c] : o.terms) r.terms[e] += c;
        return r;
    }
    Poly operator*(const Poly& o) const {
        Poly r;
        for (auto& [a, c] : terms)
            for (auto& [b, d] : o.terms) {
                Mono e;
                for (int i = 0; i < 6; ++i) e[size_t(i)] = a[size_t(i)] + b[size_t(i)];
                r.terms[e] += c * d;
            }
        return r;
    }
    Poly scaled(i128 k) const {
        Poly r = *this;
        for (auto& [e, c] : r.terms) c *= k;
        return r;
    }
    Poly derivative(int k) const {
        Poly r;
        for (auto& [e, c] : terms) {
            if (!e[size_t(k)]) continue;
            Mono f = e;
            --f[size_t(k)];
            r.terms[f] += c * e[size_t(k)];
        }
        return r;
    }
    i128 eval(const Freq& f) const {
        i128 s = 0;
        for (auto& [e, c] : terms) {
            i128 v = c;
            for (int i = 0; i < 3; ++i) {
                for (int k = 0; k < e[size_t(i)]; ++k) v *= f.m[size_t(i)];
                for (int k = 0; k < e[size_t(3 + i)]; ++k) v *= f.n[size_t(i)];
            }
            s += v;
        }
        return s;
    }
};

Poly symbolic_g() {
    Poly a[3];
    for (int i = 0; i < 3; ++i) a[i] = Poly::var(i) * Poly::var(3 + i) * Poly::var(3 + i);
    Poly d = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    d = d + (a[0] * a[1] + a[1] * a[2] + a[2] * a[0]).scaled(-2);
    return d.scaled(6);
}

}  // namespace

TEST(DualGeom, DualFormExamples) {
    EXPECT_EQ(dual_form(F({1, 1, 1}, {1, 1, 1})), -3);
    EXPECT_EQ(dual_form(F({0, 0, 0}, {3, -2, 7})), 0);
    EXPECT_EQ(dual_form(F({2, 2, 2}, {1, 1, -2})), 0);
    EXPECT_EQ(dual_via_abc(F({1, 1, 0}, {1, 1, 1})), 0);
    EXPECT_EQ(dual_via_abc(F({1, 4, 0}, {1, 1, 1})), 9);
}

TEST(DualGeom, DualFormEqualsFactoredFormExhaustive) {
    Freq f;
    const int64_t B = 5;
    for (f.m[0] = -B; f.m[0] <= B; ++f.m[0])
        for (f.m[1] = -B; f.m[1] <= B; ++f.m[1])
            for (f.m[2] = -B; f.m[2] <= B; ++f.m[2])
                for (f.n[0] = -B; f.n[0] <= B; ++f.n[0])
                    for (f.n[1] = -B; f.n[1] <= B; ++f.n[1])
                        for (f.n[2] = -B; f.n[2] <= B; ++f.n[2]) ASSERT_EQ(dual_form(f), dual_via_abc(f));
}

TEST(DualGeom, GradientExamples) {
    Freq one = F({1, 1, 1}, {1, 1, 1});
    EXPECT_EQ(g_form(one), -18);
    auto L = l_forms(one);
    for (auto v : L) EXPECT_EQ(v, -1);
    auto g = grad_g(one);
    std::array<i128, 6> want{-12, -12, -12, -24, -24, -24};
    EXPECT_EQ(g, want);
}

TEST(DualGeom, GradientMatchesSymbolicDerivative) {
    Poly G = symbolic_g();
    std::array<Poly, 6> dG;
    for (int k = 0; k < 6; ++k) dG[size_t(k)] = G.derivative(k);
    std::mt19937_64 g(17);
    for (int it = 0; it < 1000; ++it) {
        Freq f;
        for (int i = 0; i < 3; ++i) f.m[i] = int64_t(g() % 41) - 20, f.n[i] = int64_t(g() % 41) - 20;
        ASSERT_EQ(G.eval(f), g_form(f));
        auto grad = grad_g(f);
        for (int k = 0; k < 6; ++k) ASSERT_EQ(grad[size_t(k)], dG[size_t(k)].eval(f)) << k << to_string(f);
    }
}

TEST(DualGeom, PolynomialDivisibility) {
    EXPECT_TRUE(poly_div_check({1, 2, 3}, {1, 1, 1}));
    EXPECT_THROW(poly_div_check({1, 0, 0}, {0, 1, 1}), std::invalid_argument);
    std::mt19937_64 g(23);
    int done = 0;
    while (done < 10000) {
        Triple x, y;
        for (int i = 0; i < 3; ++i) x[size_t(i)] = int64_t(g() % 101) - 50, y[size_t(i)] = int64_t(g() % 101) - 50;
        if (cubic_form(x, y) == 0) continue;
        ASSERT_TRUE(poly_div_check(x, y));
        ++done;
    }
}

TEST(DualGeom, LatticeBasesContainDefiningVectors) {
    auto B = lambda_perp_basis({1, 1, 1});
    EXPECT_TRUE(in_lambda_perp({1, 1, 1, 0, 0, 0}, {1, 1, 1}));
    EXPECT_TRUE(in_lambda_perp({0, 0, 0, 1, -1, 0}, {1, 1, 1}));
    EXPECT_TRUE(in_lambda_perp({0, 1, 1, 0, 0, 0}, {0, 1, 1}));
    EXPECT_TRUE(in_lambda_perp({0, 0, 0, 1, 0, 0}, {0, 1, 1}));
    for (const auto& r : B.rows) EXPECT_TRUE(in_lambda_perp(r, {1, 1, 1}));
    EXPECT_THROW(lambda_basis({2, 2, 2}), std::invalid_argument);
}

TEST(DualGeom, LatticesAreOrthogonalAndOnDual) {
    std::mt19937_64 g(31);
    for (int64_t a = -4; a <= 4; ++a)
        for (int64_t b = -4; b <= 4; ++b)
            for (int64_t c = -4; c <= 4; ++c) {
                Triple t{a, b, c};
                if (t == Triple{0, 0, 0} || !is_primitive(t)) continue;
                auto L = lambda_basis(t), P = lambda_perp_basis(t);
                for (const auto& r : L.rows) ASSERT_TRUE(in_lambda(r, t));
                for (const auto& r : P.rows) ASSERT_TRUE(in_lambda_perp(r, t));
                for (const auto& u : L.rows)
                    for (const auto& v : P.rows) ASSERT_EQ(pairing(u, v), 0);
                for (int it = 0; it < 20; ++it) {
                    Triple co{int64_t(g() % 11) - 5, int64_t(g() % 11) - 5, int64_t(g() % 11) - 5};
                    Freq f = as_freq(combine(P, co));
                    ASSERT_EQ(dual_form(f), 0) << to_string(t);
                    auto x = combine(L, co);
                    ASSERT_EQ(cubic_form({x[0], x[1], x[2]}, {x[3], x[4], x[5]}), 0);
                }
            }
}

TEST(DualGeom, ClassificationExamples) {
    auto a = classify_dual_point(F({2, 2, 2}, {1, 1, -2}));
    EXPECT_EQ(a.kind, DualKind::AllGeneric);
    EXPECT_EQ(a.t, (Triple{1, 1, 1}));
    auto b = classify_dual_point(F({0, 1, 1}, {1, 2, -2}));
    EXPECT_EQ(b.kind, DualKind::MixedZero);
    EXPECT_EQ(b.index, 0);
    EXPECT_EQ(b.t, (Triple{0, 1, 1}));
    EXPECT_EQ(classify_dual_point(F({1, 0, 0}, {0, 0, 5})).kind, DualKind::CoordinateDegenerate);
    EXPECT_EQ(classify_dual_point(F({1, 1, 1}, {1, 1, 1})).kind, DualKind::OffDual);
    EXPECT_THROW(classify_dual_point(Freq{}), std::invalid_argument);
}

// every Lambda_perp(t) point with n1 n2 n3 != 0 classifies back to [t]
TEST(DualGeom, ClassificationRoundTrip) {
    int checked = 0;
    for (int64_t a = -10; a <= 10; ++a)
        for (int64_t b = -10; b <= 10; ++b)
            for (int64_t c = -10; c <= 10; ++c) {
                Triple t{a, b, c};
                if (!a || !b || !c || !is_primitive(t) || normalize_direction(t) != t) continue;
                auto P = lambda_perp_basis(t);
                for (int64_t x = -3; x <= 3; ++x)
                    for (int64_t y = -3; y <= 3; ++y)
                        for (int64_t z = -3; z <= 3; ++z) {
                            Freq f = as_freq(combine(P, {x, y, z}));
                            if (!f.n[0] || !f.n[1] || !f.n[2] || !f.m[0] || height(f) > 50) continue;
                            auto cls = classify_dual_point(f);
                            ASSERT_EQ(cls.kind, DualKind::AllGeneric) << to_string(f);
                            ASSERT_EQ(cls.t, t) << to_string(f);
                            ++checked;
                        }
            }
    EXPECT_GT(checked, 1000);
}

TEST(DualGeom, EnumerationMatchesNaiveScan) {
    for (int64_t M : {1, 2}) {
        auto pts = enumerate_dual_points(M);
        auto naive = naive_dual_scan(M);
        ASSERT_EQ(pts.size(), naive.size());
        for (size_t i = 0; i < pts.size(); ++i) ASSERT_EQ(pts[i].f, naive[i]);
    }
    auto pts = enumerate_dual_points(6);
    auto semi = semi_naive_dual_scan(6);
    ASSERT_EQ(pts.size(), semi.size());
    for (size_t i = 0; i < pts.size(); ++i) ASSERT_EQ(pts[i].f, semi[i]);
    EXPECT_TRUE(std::any_of(pts.begin(), pts.end(), [](const DualPoint& d) {
        return d.f == F({1, 0, 0}, {0, 0, 0}) && d.cls.kind == DualKind::CoordinateDegenerate;
    }));
}

TEST(DualGeom, GradientPrimeDivisibility) {
    Freq f;
    const int64_t B = 3;
    for (f.m[0] = -B; f.m[0] <= B; ++f.m[0])
        for (f.m[1] = -B; f.m[1] <= B; ++f.m[1])
            for (f.m[2] = -B; f.m[2] <= B; ++f.m[2])
                for (f.n[0] = -B; f.n[0] <= B; ++f.n[0])
                    for (f.n[1] = -B; f.n[1] <= B; ++f.n[1])
                        for (f.n[2] = -B; f.n[2] <= B; ++f.n[2])
                            for (int64_t p : {2, 3, 5, 7, 11, 13}) {
                                if (!divides_grad(p, f)) continue;
                                int64_t gm = std::gcd(std::gcd(f.m[0], f.m[1]), f.m[2]);
                                i128 w = i128(6) * f.n[0] * f.n[1] * f.n[2] * gm;
                                ASSERT_EQ(w % p, 0) << p << to_string(f);
                            }
}

TEST(DualGeom, ThirdMinimumGrowsLikeSquare) {
    double worst = 0;
    for (int64_t a = 0; a <= 10; ++a)
        for (int64_t b = -10; b <= 10; ++b)
            for (int64_t c = -10; c <= 10; ++c) {
                Triple t{a, b, c};
                if (t == Triple{0, 0, 0} || !is_primitive(t) || normalize_direction(t) != t) continue;
                auto lam = successive_minima(lambda_perp_basis(t));
                ASSERT_LE(lam[0], lam[1] + 1e-9);
                ASSERT_LE(lam[1], lam[2] + 1e-9);
                double n2 = double(dot(t, t));
                worst = std::max(worst, lam[2] / n2);
            }
    RecordProperty("worst_ratio", std::to_string(worst));
    EXPECT_LE(worst, 2.0);
}
