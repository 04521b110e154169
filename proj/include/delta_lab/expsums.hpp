#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "cyclotomic.hpp"
#include "dualgeom.hpp"
#include "types.hpp"

namespace delta_lab::expsums {

inline constexpr int64_t kBruteMax = 13;
inline constexpr int64_t kReducedMax = 100000;
inline constexpr int64_t kPrimePowerMax = 100000;

inline BigInt pow_big(int64_t b, unsigned e) { return boost::multiprecision::pow(BigInt(b), e); }

// square roots mod q, bucketed by residue (CSR layout)
class SqrtTable {
public:
    explicit SqrtTable(int64_t q) : q_(q), start_(size_t(q) + 1, 0), roots_(size_t(q)) {
        for (int64_t y = 0; y < q; ++y) ++start_[size_t(sq(y)) + 1];
        for (int64_t r = 0; r < q; ++r) start_[r + 1] += start_[r];
        std::vector<int64_t> fill(start_.begin(), start_.end() - 1);
        for (int64_t y = 0; y < q; ++y) roots_[size_t(fill[sq(y)]++)] = y;
    }
    int64_t modulus() const { return q_; }
    std::pair<const int64_t*, const int64_t*> roots(int64_t r) const {
        r = arith::mod(r, q_);
        return {roots_.data() + start_[r], roots_.data() + start_[r + 1]};
    }
    int64_t count(int64_t r) const {
        r = arith::mod(r, q_);
        return start_[r + 1] - start_[r];
    }

private:
    int64_t sq(int64_t y) const { return int64_t((unsigned __int128)y * y % q_); }
    int64_t q_;
    std::vector<int64_t> start_, roots_;
};

// ---------------------------------------------------------------- brute force

// literal seven-fold loop; only for tiny q
inline BigInt brute_force_naive(int64_t q, const Freq& f) {
    if (q < 1 || q > 7) throw GuardError("brute_force_naive: q <= 7");
    CycloInt acc(q);
    Triple m, n;
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], q), n[i] = arith::mod(f.n[i], q);
    for (int64_t a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        for (int64_t x1 = 0; x1 < q; ++x1)
            for (int64_t x2 = 0; x2 < q; ++x2)
                for (int64_t x3 = 0; x3 < q; ++x3)
                    for (int64_t y1 = 0; y1 < q; ++y1)
                        for (int64_t y2 = 0; y2 < q; ++y2)
                            for (int64_t y3 = 0; y3 < q; ++y3) {
                                int64_t F = x1 * y1 * y1 + x2 * y2 * y2 + x3 * y3 * y3;
                                acc.add(a * F + m[0] * x1 + m[1] * x2 + m[2] * x3 + n[0] * y1 + n[1] * y2 + n[2] * y3, 1);
                            }
    }
    return BigInt(acc.to_integer());
}

// Sum over (x,y) mod q of e_q(a x y^2 + m x + n y), by direct double loop.
inline CycloInt one_pair_sum(int64_t q, int64_t a, int64_t m, int64_t n) {
    CycloInt t(q);
    for (int64_t x = 0; x < q; ++x)
        for (int64_t y = 0; y < q; ++y) t.add(a * x % q * y % q * y + m * x + n * y, 1);
    return t;
}

// Definition sum, organized as sum_a prod_i T(a; m_i, n_i) since the phase is
// a sum of three independent (x_i, y_i) pieces; exact in Z[zeta_q].
inline BigInt brute_force_full(int64_t q, const Freq& f) {
    if (q < 1 || q > kBruteMax) throw GuardError("brute_force_full: q <= 13");
    if (q == 1) return 1;
    CycloInt acc(q);
    for (int64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        CycloInt t = one_pair_sum(q, a, arith::mod(f.m[0], q), arith::mod(f.n[0], q));
        t = t * one_pair_sum(q, a, arith::mod(f.m[1], q), arith::mod(f.n[1], q));
        t = t * one_pair_sum(q, a, arith::mod(f.m[2], q), arith::mod(f.n[2], q));
        acc.add_scaled(t, 1);
    }
    return BigInt(acc.to_integer());
}

// ---------------------------------------------------------------- reduced sum

namespace detail {

struct Factor {
    int64_t scalar = 0;                          // used when terms is empty
    std::vector<std::pair<int64_t, int64_t>> terms;  // (exponent, weight)
};

inline Factor make_factor(int64_t q, const int64_t* b, const int64_t* e, int64_t n) {
    Factor fac;
    int64_t cnt = e - b;
    if (n == 0 || cnt == 0) {
        fac.scalar = cnt;
        return fac;
    }
    if (cnt <= 8) {
        for (auto p = b; p != e; ++p) fac.terms.push_back({int64_t((unsigned __int128)n * *p % q), 1});
        return fac;
    }
    CycloInt v(q);
    for (auto p = b; p != e; ++p) v.add(int64_t((unsigned __int128)n * *p % q), 1);
    v.reduce_in_place();
    const auto& c = v.coeffs();
    for (int64_t k = 0; k < q; ++k)
        if (c[k]) fac.terms.push_back({k, c[k]});
    if (fac.terms.empty()) fac.scalar = 0;
    else if (fac.terms.size() == 1 && fac.terms[0].first == 0) {
        fac.scalar = fac.terms[0].second;
        fac.terms.clear();
    }
    return fac;
}

inline bool is_zero(const Factor& f) { return f.terms.empty() && f.scalar == 0; }

}  // namespace detail

// q^3 * sum_{a unit} prod_i sum_{a y_i^2 = -m_i} e_q(n_i y_i)
inline BigInt reduced_sum(int64_t q, const Freq& f, const SqrtTable* table = nullptr) {
    if (q < 1 || q > kReducedMax) throw GuardError("reduced_sum: q <= 100000");
    if (q == 1) return 1;
    SqrtTable local = table ? SqrtTable(1) : SqrtTable(q);
    const SqrtTable& T = table ? *table : local;
    if (T.modulus() != q) throw std::invalid_argument("reduced_sum: table modulus mismatch");
    Triple m, n;
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], q), n[i] = arith::mod(f.n[i], q);
    CycloInt acc(q);
    int64_t scalar_acc = 0;
    for (int64_t a = 1; a < q; ++a) {
        int64_t ai = arith::inv_mod(a, q);
        if (!ai) continue;
        detail::Factor fs[3];
        bool zero = false;
        for (int i = 0; i < 3 && !zero; ++i) {
            auto [b, e] = T.roots(int64_t((unsigned __int128)(q - m[i]) * ai % q));
            fs[i] = detail::make_factor(q, b, e, n[i]);
            zero = detail::is_zero(fs[i]);
        }
        if (zero) continue;
        // multiply: scalars first, then sparse terms
        int64_t s = 1;
        std::vector<std::pair<int64_t, int64_t>> cur{{0, 1}};
        for (auto& fc : fs) {
            if (fc.terms.empty()) {
                s *= fc.scalar;
                continue;
            }
            std::vector<std::pair<int64_t, int64_t>> nxt;
            nxt.reserve(cur.size() * fc.terms.size());
            for (auto [e1, w1] : cur)
                for (auto [e2, w2] : fc.terms) {
                    int64_t e = e1 + e2;
                    if (e >= q) e -= q;
                    nxt.push_back({e, w1 * w2});
                }
            cur.swap(nxt);
        }
        if (cur.size() == 1 && cur[0].first == 0) scalar_acc += s * cur[0].second;
        else
            for (auto [e, w] : cur) acc.add(e, s * w);
    }
    acc.add(0, scalar_acc);
    return BigInt(acc.to_integer()) * pow_big(q, 3);
}

// ---------------------------------------------------------------- closed forms

inline int leg(int64_t a, int64_t p) { return arith::jacobi(a, p); }

// 1 + (m1m2/p) + (m2m3/p) + (m3m1/p) for p >= 5, else 0
inline int qfrak(const Triple& m, int64_t p) {
    if (p == 2 || p == 3) return 0;
    auto mp = [&](int i) { return arith::mod(m[i], p); };
    return 1 + leg(mp(0) * mp(1), p) + leg(mp(1) * mp(2), p) + leg(mp(2) * mp(0), p);
}

// prime p >= 5, case table of the prime evaluation
inline BigInt closed_form_prime_raw(int64_t p, const Freq& f) {
    BigInt p3 = pow_big(p, 3), p4 = pow_big(p, 4);
    Triple m, n;
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], p), n[i] = arith::mod(f.n[i], p);
    bool pD = arith::mod(dualgeom::dual_form(f), p) == 0;
    int zm = (m[0] == 0) + (m[1] == 0) + (m[2] == 0);
    if (zm == 0) {
        if (leg(m[0] * m[1], p) != 1 || leg(m[1] * m[2], p) != 1 || leg(m[2] * m[0], p) != 1) return 0;
        if (!pD) return -4 * p3;
        int zn = (n[0] == 0) + (n[1] == 0) + (n[2] == 0);
        if (zn == 3) return 4 * p4 - 4 * p3;
        if (zn == 0) return p4 - 4 * p3;
        return 2 * p4 - 4 * p3;
    }
    if (zm == 3) return p4 - p3;
    if (zm == 2) {
        int i = m[0] ? 0 : (m[1] ? 1 : 2);
        return (n[i] == 0 ? p4 : BigInt(0)) - p3;
    }
    int i = !m[0] ? 0 : (!m[1] ? 1 : 2);
    int j = (i + 1) % 3, k = (i + 2) % 3;
    if (leg(m[j] * m[k], p) == -1) return 0;
    if (n[j] == 0 && n[k] == 0) return 2 * p4 - 2 * p3;
    if (pD) return p4 - 2 * p3;
    return -2 * p3;
}

inline BigInt closed_form_prime(int64_t p, const Freq& f) {
    if (!arith::is_prime(uint64_t(p))) throw std::invalid_argument("closed_form_prime: p not prime");
    if (p < 5) return reduced_sum(p, f);
    return closed_form_prime_raw(p, f);
}

// p^{3r} (p N_0 - N_1)/(p - 1), N_j counting (a, y) with n.y = 0 mod p^{r-j}
inline BigInt prime_power(int64_t p, int r, const Freq& f) {
    if (r < 1) throw std::invalid_argument("prime_power: r >= 1");
    int64_t q = arith::ipow(p, unsigned(r));
    if (q > kPrimePowerMax) throw GuardError("prime_power: p^r <= 100000");
    SqrtTable T(q);
    Triple m, n;
    for (int i = 0; i < 3; ++i) m[i] = arith::mod(f.m[i], q), n[i] = arith::mod(f.n[i], q);
    BigInt N[2];
    for (int j = 0; j < 2; ++j) {
        int64_t M = arith::ipow(p, unsigned(r - j));
        // dense histograms of n_i y_i mod M with touched lists
        std::vector<int64_t> h[3];
        std::vector<int64_t> touched[3];
        for (auto& v : h) v.assign(size_t(M), 0);
        int64_t total = 0;
        for (int64_t a = 1; a < q; ++a) {
            if (a % p == 0) continue;
            int64_t ai = arith::inv_mod(a, q);
            bool empty = false;
            for (int i = 0; i < 3 && !empty; ++i) {
                auto [b, e] = T.roots(int64_t((unsigned __int128)(q - m[i]) * ai % q));
                if (b == e) empty = true;
                for (auto y = b; y != e; ++y) {
                    int64_t v = int64_t((unsigned __int128)n[i] * *y % M);
                    if (h[i][size_t(v)]++ == 0) touched[i].push_back(v);
                }
            }
            if (!empty) {
                // loop over the two smaller histograms, look up the largest
                int big = 0;
                for (int i = 1; i < 3; ++i)
                    if (touched[i].size() > touched[big].size()) big = i;
                int i1 = big == 0 ? 1 : 0, i2 = big == 2 ? 1 : 2;
                for (int64_t v1 : touched[i1])
                    for (int64_t v2 : touched[i2]) {
                        int64_t need = M - (v1 + v2) % M;
                        if (need == M) need = 0;
                        total += h[i1][size_t(v1)] * h[i2][size_t(v2)] * h[big][size_t(need)];
                    }
            }
            for (int i = 0; i < 3; ++i) {
                for (int64_t v : touched[i]) h[i][size_t(v)] = 0;
                touched[i].clear();
            }
        }
        N[j] = total;
    }
    BigInt num = p * N[0] - N[1];
    if (num % (p - 1) != 0) throw InvariantError("prime_power: p - 1 does not divide p N_0 - N_1");
    return pow_big(p, unsigned(3 * r)) * (num / (p - 1));
}

// S_{p^r}(0,0) = p^{4r + 3 floor(r/2)} (1 - 1/p)
inline BigInt s_pr_00(int64_t p, int r) {
    return pow_big(p, unsigned(4 * r + 3 * (r / 2) - 1)) * (p - 1);
}

inline BigInt s_q_00(int64_t q) {
    if (q < 1) throw std::invalid_argument("s_q_00: q >= 1");
    BigInt v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= s_pr_00(p, r);
    return v;
}

enum class Method { Trivial, ClosedForm, ReducedSum, PrimePower, SquareFullVanishing, Multiplicative };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Trivial: return "trivial";
        case Method::ClosedForm: return "closed_form";
        case Method::ReducedSum: return "reduced_sum";
        case Method::PrimePower: return "prime_power";
        case Method::SquareFullVanishing: return "square_full_vanishing";
        case Method::Multiplicative: return "multiplicative";
    }
    return "?";
}

// S_{p^r} through the fastest valid route
inline BigInt s_prime_power(int64_t p, int r, const Freq& f, Method* how = nullptr) {
    auto set = [&](Method m) { if (how) *how = m; };
    if (r == 1) {
        if (p >= 5) return set(Method::ClosedForm), closed_form_prime_raw(p, f);
        return set(Method::ReducedSum), reduced_sum(p, f);
    }
    i128 D = dualgeom::dual_form(f);
    if (D != 0) {
        int v = arith::v_p(D, p);
        if (v == 0 || r > 1 + v) return set(Method::SquareFullVanishing), BigInt(0);
    }
    if (p <= 3 && arith::ipow(p, unsigned(r)) <= 4096) return set(Method::ReducedSum), reduced_sum(arith::ipow(p, unsigned(r)), f);
    return set(Method::PrimePower), prime_power(p, r, f);
}

inline BigInt s_q(int64_t q, const Freq& f, Method* how = nullptr) {
    if (q < 1) throw std::invalid_argument("s_q: q >= 1");
    if (q == 1) {
        if (how) *how = Method::Trivial;
        return 1;
    }
    auto fac = arith::factor(uint64_t(q));
    BigInt v = 1;
    Method last = Method::Trivial;
    for (auto [p, r] : fac.factors) {
        v *= s_prime_power(p, r, f, &last);
        if (v == 0) break;
    }
    if (how) *how = fac.factors.size() > 1 ? Method::Multiplicative : last;
    return v;
}

// ---------------------------------------------------------------- S1 / S2

// literal product over p || q with p not dividing G
inline BigInt s1(int64_t q, const Freq& f) {
    i128 G = dualgeom::g_form(f);
    BigInt v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) {
        if (r != 1) continue;
        if (G != 0 && G % p == 0) continue;
        if (G == 0) continue;
        v *= -pow_big(p, 3) * qfrak(f.m, p);
    }
    return v;
}

// Dirichlet kernel of the S = S1 * S2 factorization: the literal product on
// square-free q coprime to G, zero elsewhere
inline BigInt s1_kernel(int64_t q, const Freq& f) {
    if (!arith::is_square_free(q)) return 0;
    i128 G = dualgeom::g_form(f);
    for (auto [p, r] : arith::factor(uint64_t(q)).factors)
        if (G == 0 || G % p == 0) return 0;
    return s1(q, f);
}

inline BigInt s2_prime_power(int64_t p, int r, const Freq& f) {
    BigInt v = s_prime_power(p, r, f);
    i128 G = dualgeom::g_form(f);
    if (G != 0 && G % p != 0) {
        BigInt c = BigInt(qfrak(f.m, p)) * pow_big(p, 3), cj = 1;
        for (int j = 1; j <= r; ++j) {
            cj *= c;
            v += cj * (r - j == 0 ? BigInt(1) : s_prime_power(p, r - j, f));
        }
    }
    return v;
}

inline BigInt s2(int64_t q, const Freq& f) {
    if (q < 1) throw std::invalid_argument("s2: q >= 1");
    BigInt v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= s2_prime_power(p, r, f);
    return v;
}

enum class S2Reason { NotDividingG, ExponentTooHigh, Nonzero };

inline const char* reason_name(S2Reason r) {
    switch (r) {
        case S2Reason::NotDividingG: return "NotDividingG";
        case S2Reason::ExponentTooHigh: return "ExponentTooHigh";
        case S2Reason::Nonzero: return "Nonzero";
    }
    return "?";
}

struct S2Support {
    arith::FactoredModulus q;
    i128 g = 0;
    bool vanishes = false;
    S2Reason reason = S2Reason::Nonzero;
};

// structural prediction of S2 vanishing
inline S2Support s2_support(int64_t q, const Freq& f) {
    S2Support s{arith::factor(uint64_t(q)), dualgeom::g_form(f), false, S2Reason::Nonzero};
    if (s.g == 0) return s;
    for (auto [p, r] : s.q.factors) {
        int v = s.g % p == 0 ? arith::v_p(s.g, p) : 0;
        if (v == 0) return s.vanishes = true, s.reason = S2Reason::NotDividingG, s;
        if (r >= 2 + v) return s.vanishes = true, s.reason = S2Reason::ExponentTooHigh, s;
    }
    return s;
}

// sum over q1 q2 = q of kernel(q1) S2(q2)
inline BigInt s1_s2_convolution(int64_t q, const Freq& f) {
    BigInt acc = 0;
    for (uint64_t d : arith::divisors(uint64_t(q))) {
        BigInt k = s1_kernel(int64_t(d), f);
        if (k == 0) continue;
        acc += k * s2(q / int64_t(d), f);
    }
    return acc;
}

// ---------------------------------------------------------------- dual decomposition

// Delta(m,n) evaluated at the point
inline i128 delta_monomial(const Freq& f) {
    int zm = (f.m[0] == 0) + (f.m[1] == 0) + (f.m[2] == 0);
    if (zm >= 2) return 2;
    i128 v = 2;
    for (int i = 0; i < 3; ++i) {
        if (!f.m[i]) continue;
        v *= f.m[i];
        if (f.n[i]) v *= f.n[i];
    }
    return v;
}

// active characters of Xi (values a such that (a/.) appears)
inline std::vector<int64_t> xi_characters(const Freq& f) {
    std::vector<int64_t> ch;
    const auto& m = f.m;
    const auto& n = f.n;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            int k = 3 - i - j;
            if (m[i] && m[j] && m[k] && n[i] && n[j] && !n[k]) ch.push_back(m[i] * m[k]);
        }
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
            if (m[j] && m[k] && !n[j] && !n[k]) ch.push_back(m[j] * m[k]);
    return ch;
}

// Xi at p^l: complete homogeneous polynomial of degree l in the character values
inline int64_t xi_prime_power(int64_t p, int l, const Freq& f) {
    if (l == 0) return 1;
    i128 Dl = delta_monomial(f);
    if (Dl % p == 0) return 0;
    auto ch = xi_characters(f);
    std::vector<int64_t> h(size_t(l) + 1, 0);
    h[0] = 1;
    for (int64_t a : ch) {
        int c = arith::jacobi(arith::mod(a, p), p);
        // multiply series by 1/(1 - c x)
        for (int d = 1; d <= l; ++d) h[d] += c * h[d - 1];
    }
    return h[l];
}

inline int64_t xi(int64_t q, const Freq& f) {
    int64_t v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= xi_prime_power(p, r, f);
    return v;
}

inline Rational phi_ratio(int64_t p, int l) {
    return l == 0 ? Rational(1) : Rational(p - 1, p);
}

// S'_{p^l} for l = 0..L, from S_{p^l}/p^{4l} = sum_k phi(p^k)/p^k S'_{p^{l-k}}
inline std::vector<Rational> s_prime_series(int64_t p, int L, const Freq& f) {
    std::vector<Rational> sp(size_t(L) + 1);
    for (int l = 0; l <= L; ++l) {
        Rational a = l == 0 ? Rational(1) : Rational(s_prime_power(p, l, f), pow_big(p, unsigned(4 * l)));
        for (int k = 1; k <= l; ++k) a -= phi_ratio(p, k) * sp[l - k];
        sp[l] = a;
    }
    return sp;
}

inline std::vector<Rational> s_double_prime_series(int64_t p, int L, const Freq& f) {
    auto sp = s_prime_series(p, L, f);
    std::vector<Rational> spp(size_t(L) + 1);
    for (int l = 0; l <= L; ++l) {
        Rational a = sp[l];
        for (int k = 1; k <= l; ++k) a -= Rational(xi_prime_power(p, k, f)) * spp[l - k];
        spp[l] = a;
    }
    return spp;
}

inline Rational s_prime(int64_t q, const Freq& f) {
    Rational v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= s_prime_series(p, r, f)[r];
    return v;
}

inline Rational s_double_prime(int64_t q, const Freq& f) {
    Rational v = 1;
    for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= s_double_prime_series(p, r, f)[r];
    return v;
}

struct DualDecomposition {
    int64_t q = 1;
    Rational s_prime = 1;
    std::vector<std::pair<int64_t, int64_t>> xi;  // (divisor, Xi value)
    Rational s_double_prime = 1;
};

inline DualDecomposition dual_decomposition(int64_t q, const Freq& f) {
    if (q < 1) throw std::invalid_argument("dual_decomposition: q >= 1");
    if (dualgeom::dual_form(f) != 0) throw std::invalid_argument("dual_decomposition: D(m,n) != 0");
    DualDecomposition d;
    d.q = q;
    d.s_prime = s_prime(q, f);
    d.s_double_prime = s_double_prime(q, f);
    for (uint64_t e : arith::divisors(uint64_t(q))) d.xi.push_back({int64_t(e), xi(int64_t(e), f)});
    return d;
}

// sum over q0 q1 q2 = q of phi(q0)/q0 Xi_{q1} S''_{q2}, by full divisor sums
inline Rational dual_reconstruction(int64_t q, const Freq& f) {
    Rational acc = 0;
    for (uint64_t q0 : arith::divisors(uint64_t(q))) {
        Rational w(arith::phi(int64_t(q0)), int64_t(q0));
        int64_t rest = q / int64_t(q0);
        for (uint64_t q1 : arith::divisors(uint64_t(rest))) {
            int64_t x = xi(int64_t(q1), f);
            if (!x) continue;
            acc += w * x * s_double_prime(rest / int64_t(q1), f);
        }
    }
    return acc;
}

// mean of S'_q over Lambda_perp(t) / q Lambda_perp(t)
inline Rational lattice_average_s_prime(int64_t q, const Triple& t) {
    if (q < 1 || q > 50) throw GuardError("lattice_average_s_prime: 1 <= q <= 50");
    if (std::abs(t[0]) > 10 || std::abs(t[1]) > 10 || std::abs(t[2]) > 10)
        throw GuardError("lattice_average_s_prime: |t| <= 10");
    auto B = dualgeom::lambda_perp_basis(t);
    Rational acc = 0;
    for (int64_t c0 = 0; c0 < q; ++c0)
        for (int64_t c1 = 0; c1 < q; ++c1)
            for (int64_t c2 = 0; c2 < q; ++c2)
                acc += s_prime(q, dualgeom::as_freq(dualgeom::combine(B, {c0, c1, c2})));
    return acc / Rational(q * q * q);
}

}  // namespace delta_lab::expsums
