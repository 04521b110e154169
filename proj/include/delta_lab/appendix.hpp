#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "arith.hpp"
#include "cyclotomic.hpp"
#include "dualgeom.hpp"
#include "expsums.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace delta_lab::appendix {

inline constexpr int64_t kGaussMaxP = 300;
inline constexpr int64_t kDirectMaxP = 13;
inline constexpr int64_t kFamilyMaxP = 61;

// F_c(x,y) = sum x_i y_i^2 - c1 x1 x2 x3 - c2 y1 y2 y3; F2 is (c1, c2) = (-1, 0)
struct Cubic {
    int64_t c1 = -1, c2 = 0;
};

inline void require_odd_prime(int64_t p, int64_t bound, const char* who) {
    if (p < 3 || !arith::is_prime(uint64_t(p))) throw GuardError(std::string(who) + ": p must be an odd prime");
    if (p > bound) throw GuardError(std::string(who) + ": p exceeds guard " + std::to_string(bound));
}

inline int chi(int64_t a, int64_t p) { return arith::jacobi(arith::mod(a, p), p); }

// G_c(A, B) = sum_y psi_c(A y^2 + B y), psi_c(t) = e_p(c t)
inline CycloInt gauss_direct(int64_t p, int64_t A, int64_t B, int64_t c = 1) {
    CycloInt g(p);
    for (int64_t y = 0; y < p; ++y) g.add(arith::mod(c * (A * y % p * y + B * y), p), 1);
    return g;
}

// psi_c(-B^2 / 4A) (A/p) G_c(1,0) for A != 0, p 1[B = 0] for A = 0
inline CycloInt gauss_closed(int64_t p, int64_t A, int64_t B, int64_t c = 1) {
    A = arith::mod(A, p), B = arith::mod(B, p);
    CycloInt g(p);
    if (A == 0) {
        if (B == 0) g.add(0, p);
        return g;
    }
    CycloInt g1 = gauss_direct(p, 1, 0, c);
    int64_t e = arith::mod(-c * (B * B % p) % p * arith::inv_mod(4 * A % p, p), p);
    g.add_shifted(g1, e, chi(A, p));
    return g;
}

inline bool same_value(const CycloInt& a, const CycloInt& b) {
    CycloInt d = a;
    d.add_scaled(b, -1);
    CycloInt c = d.canonical();
    for (auto v : c.coeffs())
        if (v) return false;
    return true;
}

// S_p(m,n) = sum_{a != 0} sum_{x,y} psi_c(a F(x,y) + m.x + n.y) for c2 = 0.
// Fix (a, x): the y-sum is prod_i G(a x_i, n_i). Terms with an even number of
// nonzero a x_i are integers times zeta powers; odd ones carry one G(1,0).
inline BigInt s_p_gauss(int64_t p, int64_t c1, const Freq& f, int64_t c = 1, unsigned workers = 1) {
    require_odd_prime(p, kGaussMaxP, "s_p_gauss");
    if (c % p == 0) throw GuardError("s_p_gauss: character index must be a unit");
    int64_t m[3], n2[3];
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], p), n2[i] = arith::mod(f.n[i] * f.n[i], p);
    std::vector<int64_t> inv4(size_t(p), 0), ch(size_t(p), 0);
    for (int64_t t = 1; t < p; ++t) inv4[size_t(t)] = arith::inv_mod(4 * t % p, p), ch[size_t(t)] = chi(t, p);
    int64_t pm = chi(-1, p) * p;  // G(1,0)^2
    int64_t pw[4] = {1, p, p * p, p * p * p};
    int64_t pmw[2] = {1, pm};
    size_t P = size_t(p);
    std::vector<std::vector<int64_t>> even(P, std::vector<int64_t>(P, 0)), odd = even;
    parallel_for(P - 1, workers, [&](size_t ai) {
        int64_t a = int64_t(ai) + 1;
        auto& E = even[ai];
        auto& O = odd[ai];
        // per-coordinate data for x_i: exponent part, sign, zero flag
        std::vector<int64_t> ex[3];
        std::vector<int> sg[3];
        for (int i = 0; i < 3; ++i) {
            ex[i].assign(P, 0);
            sg[i].assign(P, 0);
            for (int64_t x = 0; x < p; ++x) {
                int64_t ax = a * x % p;
                if (ax == 0) {
                    sg[i][size_t(x)] = n2[i] == 0 ? 2 : 0;  // 2 marks a factor p
                    ex[i][size_t(x)] = 0;
                } else {
                    sg[i][size_t(x)] = ch[size_t(ax)];
                    ex[i][size_t(x)] = arith::mod(m[i] * x - n2[i] * inv4[size_t(ax)], p);
                }
            }
        }
        int64_t ac = arith::mod(-c1 * a, p);
        for (int64_t x1 = 0; x1 < p; ++x1) {
            int s1 = sg[0][size_t(x1)];
            if (!s1) continue;
            for (int64_t x2 = 0; x2 < p; ++x2) {
                int s2 = sg[1][size_t(x2)];
                if (!s2) continue;
                int64_t e12 = ex[0][size_t(x1)] + ex[1][size_t(x2)];
                if (e12 >= p) e12 -= p;
                int64_t k3 = ac * (x1 * x2 % p) % p;  // coefficient of x3 from the cubic term
                int z12 = (s1 == 2) + (s2 == 2);
                int sgn12 = (s1 == 2 ? 1 : s1) * (s2 == 2 ? 1 : s2);
                // weight and parity for x3 = 0 and x3 != 0
                int64_t w0 = 0, wu = sgn12 * pw[z12] * (3 - z12 >= 2 ? pmw[1] : pmw[0]);
                bool odd_u = (3 - z12) % 2 == 1;
                if (sg[2][0] == 2) w0 = sgn12 * pw[z12 + 1] * (2 - z12 >= 2 ? pmw[1] : pmw[0]);
                if (w0) {
                    auto& T = (2 - z12) % 2 ? O : E;
                    T[size_t(e12)] += w0;
                }
                auto& T = odd_u ? O : E;
                int64_t lin = k3;
                for (int64_t x3 = 1; x3 < p; ++x3) {
                    int64_t e = e12 + ex[2][size_t(x3)] + lin;
                    if (e >= p) e -= p;
                    if (e >= p) e -= p;
                    T[size_t(e)] += wu * sg[2][size_t(x3)];
                    lin += k3;
                    if (lin >= p) lin -= p;
                }
            }
        }
    });
    CycloInt A(p), B(p);
    for (size_t ai = 0; ai + 1 < P; ++ai)
        for (size_t e = 0; e < P; ++e) {
            if (even[ai][e]) A.add(arith::mod(c * int64_t(e), p), even[ai][e]);
            if (odd[ai][e]) B.add(arith::mod(c * int64_t(e), p), odd[ai][e]);
        }
    CycloInt g1 = gauss_direct(p, 1, 0, c);
    CycloInt tot = A;
    tot.add_scaled(g1 * B, 1);
    return BigInt(tot.to_integer());
}

inline BigInt s_p_f2(int64_t p, const Freq& f, int64_t c = 1, unsigned workers = 1) {
    return s_p_gauss(p, -1, f, c, workers);
}

// Definition scan over (a, x, y), histogram of exponents
inline BigInt s_p_direct(int64_t p, const Cubic& cb, const Freq& f, int64_t c = 1) {
    require_odd_prime(p, kDirectMaxP, "s_p_direct");
    std::vector<int64_t> h(size_t(p), 0);
    for (int64_t a = 1; a < p; ++a)
        for (int64_t x1 = 0; x1 < p; ++x1)
            for (int64_t x2 = 0; x2 < p; ++x2)
                for (int64_t x3 = 0; x3 < p; ++x3)
                    for (int64_t y1 = 0; y1 < p; ++y1)
                        for (int64_t y2 = 0; y2 < p; ++y2)
                            for (int64_t y3 = 0; y3 < p; ++y3) {
                                int64_t F = x1 * y1 * y1 + x2 * y2 * y2 + x3 * y3 * y3 - cb.c1 * x1 * x2 * x3 -
                                            cb.c2 * y1 * y2 * y3;
                                int64_t t = a * arith::mod(F, p) + f.m[0] * x1 + f.m[1] * x2 + f.m[2] * x3 +
                                            f.n[0] * y1 + f.n[1] * y2 + f.n[2] * y3;
                                ++h[size_t(arith::mod(c * arith::mod(t, p), p))];
                            }
    CycloInt v(p);
    for (int64_t e = 0; e < p; ++e) v.add(e, h[size_t(e)]);
    return BigInt(v.to_integer());
}

// Fix (a, y, x1); the (x2, x3) sum of psi(alpha x2 + beta x3 + gamma x2 x3) is
// p psi(-alpha beta / gamma) for gamma != 0 and p^2 1[alpha = beta = 0] otherwise.
inline BigInt s_p_family(int64_t p, const Cubic& cb, const Freq& f, int64_t c = 1, unsigned workers = 1) {
    require_odd_prime(p, kFamilyMaxP, "s_p_family");
    size_t P = size_t(p);
    int64_t m[3], n[3];
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], p), n[i] = arith::mod(f.n[i], p);
    int64_t c1 = arith::mod(cb.c1, p), c2 = arith::mod(cb.c2, p);
    std::vector<int64_t> inv(P, 0);
    for (int64_t t = 1; t < p; ++t) inv[size_t(t)] = arith::inv_mod(t, p);
    std::vector<std::vector<int64_t>> hist(P - 1, std::vector<int64_t>(P, 0));
    parallel_for(P - 1, workers, [&](size_t ai) {
        int64_t a = int64_t(ai) + 1;
        auto& H = hist[ai];
        for (int64_t y1 = 0; y1 < p; ++y1)
            for (int64_t y2 = 0; y2 < p; ++y2) {
                int64_t alpha = (a * (y2 * y2 % p) + m[1]) % p;
                for (int64_t y3 = 0; y3 < p; ++y3) {
                    int64_t beta = (a * (y3 * y3 % p) + m[2]) % p;
                    int64_t base = arith::mod(-a * c2 % p * (y1 * y2 % p * y3 % p) + n[0] * y1 + n[1] * y2 + n[2] * y3, p);
                    for (int64_t x1 = 0; x1 < p; ++x1) {
                        int64_t e = (base + (a * (y1 * y1 % p) + m[0]) % p * x1) % p;
                        int64_t gamma = arith::mod(-a * c1 % p * x1, p);
                        if (gamma == 0) {
                            if (alpha == 0 && beta == 0) H[size_t(e)] += p * p;
                        } else {
                            int64_t t = arith::mod(e - alpha * beta % p * inv[size_t(gamma)], p);
                            H[size_t(t)] += p;
                        }
                    }
                }
            }
    });
    CycloInt v(p);
    for (auto& H : hist)
        for (int64_t e = 0; e < p; ++e)
            if (H[size_t(e)]) v.add(arith::mod(c * e, p), H[size_t(e)]);
    return BigInt(v.to_integer());
}

// Q(x) = (m.x)^2 + sum n_i^2 x_j x_k ({i,j,k} = {1,2,3})
struct NCounts {
    int64_t n1 = 0, n2 = 0, n3 = 0, n4 = 0;
};

inline NCounts n_counts(int64_t p, const Freq& f) {
    require_odd_prime(p, kGaussMaxP, "n_counts");
    int64_t m[3], s[3];
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], p), s[i] = arith::mod(f.n[i] * f.n[i], p);
    std::vector<int> ch(size_t(p), 0);
    for (int64_t t = 1; t < p; ++t) ch[size_t(t)] = chi(t, p);
    auto Q = [&](int64_t x1, int64_t x2, int64_t x3) {
        int64_t l = (m[0] * x1 + m[1] * x2 + m[2] * x3) % p;
        return (l * l + s[0] * (x2 * x3 % p) + s[1] * (x1 * x3 % p) + s[2] * (x1 * x2 % p)) % p;
    };
    auto q = [&](int64_t x1, int64_t x2, int64_t x3) {
        return (s[0] * (x2 * x3 % p) + s[1] * (x1 * x3 % p) + s[2] * (x1 * x2 % p)) % p;
    };
    NCounts N;
    // N1: Q is quadratic in x3 with coefficients A x3^2 + B x3 + C
    int64_t A = m[2] * m[2] % p;
    for (int64_t x1 = 0; x1 < p; ++x1)
        for (int64_t x2 = 0; x2 < p; ++x2) {
            int64_t l = (m[0] * x1 + m[1] * x2) % p;
            int64_t B = (2 * m[2] * l + s[0] * x2 + s[1] * x1) % p;
            int64_t C = (l * l + s[2] * (x1 * x2 % p)) % p;
            if (A) N.n1 += 1 + ch[size_t(arith::mod(B * B - 4 * A * C, p))];
            else if (B) N.n1 += 1;
            else if (C == 0) N.n1 += p;
        }
    // N3 = p^3 + sum_x chi(-q(x)); -q is linear in x3
    N.n3 = p * p * p;
    for (int64_t x1 = 0; x1 < p; ++x1)
        for (int64_t x2 = 0; x2 < p; ++x2) {
            int64_t alpha = (s[0] * x2 + s[1] * x1) % p;
            if (alpha == 0) N.n3 += p * ch[size_t(arith::mod(-s[2] * (x1 * x2 % p), p))];
        }
    // N2, N4 on x1 x2 x3 = 0; each point is attributed to its first zero coordinate
    for (int i = 0; i < 3; ++i)
        for (int64_t u = 0; u < p; ++u)
            for (int64_t v = 0; v < p; ++v) {
                int64_t x[3];
                x[i] = 0;
                x[(i + 1) % 3] = u;
                x[(i + 2) % 3] = v;
                bool first = true;
                for (int j = 0; j < i; ++j)
                    if (x[j] == 0) first = false;
                if (!first) continue;
                if (Q(x[0], x[1], x[2]) == 0) ++N.n2;
                N.n4 += 1 + ch[size_t(arith::mod(-q(x[0], x[1], x[2]), p))];
            }
    return N;
}

// det of the Gram matrix of 2Q: a_ii = 2 m_i^2, a_ij = 2 m_i m_j + n_k^2
inline i128 conic_det(const Freq& f) {
    i128 a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) a[i][j] = 2 * i128(f.m[i]) * f.m[i];
            else {
                int k = 3 - i - j;
                a[i][j] = 2 * i128(f.m[i]) * f.m[j] + i128(f.n[k]) * f.n[k];
            }
        }
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline bool smooth_conic(int64_t p, const Freq& f) { return arith::mod(conic_det(f), p) != 0; }

inline bool n_product_unit(int64_t p, const Freq& f) {
    for (auto v : f.n)
        if (arith::mod(v, p) == 0) return false;
    return true;
}

// p^2 (p (N1 - N2) - (N3 - N4)) / (p - 1), empty if p - 1 does not divide
inline std::optional<BigInt> identity_value(int64_t p, const NCounts& N) {
    BigInt num = BigInt(p) * (N.n1 - N.n2) - (N.n3 - N.n4);
    if (num % (p - 1) != 0) return std::nullopt;
    return BigInt(p) * p * (num / (p - 1));
}

struct SalieCheck {
    bool skipped = false;
    bool holds = false;
    BigInt lhs = 0, rhs = 0;
    NCounts counts;
};

inline SalieCheck salie_identity_check(int64_t p, const Freq& f, unsigned workers = 1) {
    require_odd_prime(p, kGaussMaxP, "salie_identity_check");
    SalieCheck r;
    if (!n_product_unit(p, f)) {
        r.skipped = true;
        return r;
    }
    r.counts = n_counts(p, f);
    r.lhs = s_p_f2(p, f, 1, workers);
    auto v = identity_value(p, r.counts);
    r.holds = v.has_value() && *v == r.lhs;
    if (v) r.rhs = *v;
    return r;
}

enum class CubicId { F, F2, Family };

inline const char* cubic_name(CubicId c) {
    switch (c) {
        case CubicId::F: return "F";
        case CubicId::F2: return "F2";
        case CubicId::Family: return "family";
    }
    return "?";
}

struct Witness {
    int64_t p = 0;
    Freq b;
    BigInt value = 0;
    Rational ratio{0};
};

struct DiamondScanReport {
    CubicId cubic = CubicId::F;
    Cubic coeffs;
    int64_t p_lo = 5, p_hi = 0;
    int64_t box = 0;
    std::string locus;
    uint64_t evaluated = 0, excluded = 0;
    Rational sup_ratio{0};
    std::vector<Witness> witnesses;
    uint64_t spot_checks = 0, spot_mismatches = 0;
};

namespace detail {

template <class Fn>
void for_box(int64_t box, Fn&& fn) {
    Freq f;
    for (f.m[0] = -box; f.m[0] <= box; ++f.m[0])
        for (f.m[1] = -box; f.m[1] <= box; ++f.m[1])
            for (f.m[2] = -box; f.m[2] <= box; ++f.m[2])
                for (f.n[0] = -box; f.n[0] <= box; ++f.n[0])
                    for (f.n[1] = -box; f.n[1] <= box; ++f.n[1])
                        for (f.n[2] = -box; f.n[2] <= box; ++f.n[2]) fn(f);
}

inline void record(DiamondScanReport& r, int64_t p, const Freq& f, const BigInt& v) {
    BigInt a = v < 0 ? BigInt(-v) : v;
    Rational ratio(a, expsums::pow_big(p, 3));
    if (r.witnesses.empty() || ratio > r.sup_ratio) {
        r.sup_ratio = ratio;
        r.witnesses.assign(1, Witness{p, f, v, ratio});
    }
}

}  // namespace detail

// F: locus m1 m2 m3 G(m,n), closed form. F2: locus n1 n2 n3 det, value from the
// N-count identity with direct spot checks. Family: locus m1 m2 m3 n1 n2 n3.
inline DiamondScanReport diamond_scan(CubicId id, int64_t P, int64_t box, Cubic cb = {}, int64_t p_lo = 5,
                                      unsigned workers = default_workers(), int64_t spot_every = 20000) {
    if (box < 0) throw GuardError("diamond_scan: box must be nonnegative");
    if (id == CubicId::F && P > 199) throw GuardError("diamond_scan: P <= 199 for F");
    if (id == CubicId::F2 && P > 100) throw GuardError("diamond_scan: P <= 100 for F2");
    if (id == CubicId::Family && P > 31) throw GuardError("diamond_scan: P <= 31 for the family");
    DiamondScanReport rep;
    rep.cubic = id;
    rep.coeffs = id == CubicId::F ? Cubic{0, 0} : id == CubicId::F2 ? Cubic{-1, 0} : cb;
    rep.p_lo = p_lo;
    rep.p_hi = P;
    rep.box = box;
    rep.locus = id == CubicId::F ? "m1*m2*m3*G(m,n)" : id == CubicId::F2 ? "n1*n2*n3*det(Q)" : "m1*m2*m3*n1*n2*n3";
    std::vector<int64_t> ps;
    for (int64_t p = std::max<int64_t>(p_lo, 3); p <= P; ++p)
        if (arith::is_prime(uint64_t(p))) ps.push_back(p);
    std::vector<DiamondScanReport> parts(ps.size());
    parallel_for(ps.size(), workers, [&](size_t i) {
        int64_t p = ps[i];
        auto& r = parts[i];
        uint64_t seen = 0;
        detail::for_box(box, [&](const Freq& f) {
            // F and F2 depend on n only through n_i^2 (y_i -> -y_i)
            uint64_t mult = 1;
            if (id != CubicId::Family) {
                if (f.n[0] < 0 || f.n[1] < 0 || f.n[2] < 0) return;
                mult = uint64_t(1) << ((f.n[0] != 0) + (f.n[1] != 0) + (f.n[2] != 0));
            }
            bool off;
            if (id == CubicId::F) {
                i128 g = dualgeom::g_form(f);
                off = arith::mod(f.m[0] * f.m[1] % p * f.m[2], p) != 0 && arith::mod(g, i128(p)) != 0;
            } else if (id == CubicId::F2) {
                off = n_product_unit(p, f) && smooth_conic(p, f);
            } else {
                off = arith::mod(f.m[0] * f.m[1] % p * f.m[2], p) != 0 && n_product_unit(p, f);
            }
            if (!off) {
                r.excluded += mult;
                return;
            }
            r.evaluated += mult;
            BigInt v;
            if (id == CubicId::F) {
                v = expsums::closed_form_prime_raw(p, f);
            } else if (id == CubicId::F2) {
                auto val = identity_value(p, n_counts(p, f));
                if (!val) throw InvariantError("diamond_scan: identity value not integral");
                v = *val;
                if (spot_every > 0 && seen++ % uint64_t(spot_every) == 0) {
                    ++r.spot_checks;
                    if (s_p_f2(p, f) != v) ++r.spot_mismatches;
                }
            } else {
                v = s_p_family(p, rep.coeffs, f);
            }
            detail::record(r, p, f, v);
        });
    });
    for (auto& r : parts) {
        rep.evaluated += r.evaluated;
        rep.excluded += r.excluded;
        rep.spot_checks += r.spot_checks;
        rep.spot_mismatches += r.spot_mismatches;
        if (!r.witnesses.empty() && (rep.witnesses.empty() || r.sup_ratio > rep.sup_ratio)) {
            rep.sup_ratio = r.sup_ratio;
            rep.witnesses = r.witnesses;
        }
    }
    return rep;
}

// Random frequencies with p not dividing n1 n2 n3
inline std::vector<Freq> random_unit_n(int64_t p, int count, uint64_t seed) {
    std::mt19937_64 g(seed ^ uint64_t(p) * 0x9E3779B97F4A7C15ULL);
    std::vector<Freq> out;
    while (int(out.size()) < count) {
        Freq f;
        for (int i = 0; i < 3; ++i) f.m[i] = int64_t(g() % uint64_t(p));
        for (int i = 0; i < 3; ++i) f.n[i] = 1 + int64_t(g() % uint64_t(p - 1));
        out.push_back(f);
    }
    return out;
}

}  // namespace delta_lab::appendix
