#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "arith.hpp"
#include "densities.hpp"
#include "dualgeom.hpp"
#include "expsums.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace delta_lab::counting {

using densities::WeightSpec;

inline constexpr int64_t kCountMaxB = 1024;
inline constexpr int64_t kNaiveMaxB = 16;
inline constexpr int64_t kSeriesMax = 10'000'000;
inline constexpr int64_t kHooleyMaxT = 60;
inline constexpr int64_t kRhoMaxP = 13;

// Neumaier compensated sum
struct CompensatedSum {
    double s = 0, c = 0;
    void add(double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x)) c += (s - t) + x;
        else c += (x - t) + s;
        s = t;
    }
    void add(const CompensatedSum& o) {
        add(o.s);
        add(o.c);
    }
    double value() const { return s + c; }
};

struct Stratum {
    int64_t h_lo = 0, h_hi = 0;  // gcd(y) in [h_lo, h_hi]
    double weighted = 0;
    uint64_t raw = 0;
};

struct CountReport {
    int64_t B = 0;
    double weighted_count = 0;
    uint64_t raw_count = 0;
    double theta = 0.75;
    std::vector<Stratum> strata;
    double wall_time = 0;
};

namespace detail {

struct Tables {
    int64_t R = 0, ylo = 0, yhi = 0;
    std::vector<double> ux, vy;  // ux[x + R], vy[y]
};

inline Tables tables(int64_t B, const WeightSpec& w) {
    densities::validate(w);
    Tables t;
    double Bd = double(B);
    t.R = int64_t(std::ceil(w.scale * Bd)) - 1;
    t.ux.resize(size_t(2 * t.R + 1));
    for (int64_t x = -t.R; x <= t.R; ++x) t.ux[size_t(x + t.R)] = densities::u_profile(w, double(x) / Bd);
    t.yhi = t.R;
    t.vy.assign(size_t(t.yhi + 1), 0.0);
    t.ylo = t.yhi + 1;
    for (int64_t y = 1; y <= t.yhi; ++y) {
        t.vy[size_t(y)] = densities::v_profile(w, double(y) / Bd);
        if (t.vy[size_t(y)] > 0) t.ylo = std::min(t.ylo, y);
    }
    return t;
}

inline int64_t stratum_cut(int64_t B, double theta) {
    int64_t c = int64_t(std::floor(std::pow(double(B), theta) + 1e-9));
    return std::max<int64_t>(c, 0);
}

}  // namespace detail

// Weighted count of F(x,y) = 0 with weight W((x,y)/B). Positive y only (x8),
// x1 >= 0 with x1 > 0 doubled (F(-x,y) = -F(x,y)). For fixed y and x1 the x2
// solutions form one residue class mod y3^2/g, g = gcd(y2^2, y3^2).
inline CountReport count_gcd_strata(int64_t B, const WeightSpec& w, double theta = 0.75,
                                    unsigned workers = default_workers()) {
    if (B < 1) throw GuardError("count: B must be positive");
    if (B > kCountMaxB)
        throw GuardError("count: B = " + std::to_string(B) + " exceeds guard " + std::to_string(kCountMaxB) +
                         " (cost ~ B^4 = " + std::to_string(double(B) * B * B * B) + " steps)");
    if (!(theta > 0 && theta <= 1)) throw GuardError("count: theta must lie in (0,1]");
    auto t0 = std::chrono::steady_clock::now();
    auto T = detail::tables(B, w);
    int64_t cut = detail::stratum_cut(B, theta);
    int64_t R = T.R;
    size_t ny = T.yhi >= T.ylo ? size_t(T.yhi - T.ylo + 1) : 0;
    struct Part {
        CompensatedSum w[2];
        uint64_t raw[2] = {0, 0};
    };
    std::vector<Part> parts(ny);
    parallel_for(ny, workers, [&](size_t idx) {
        int64_t y1 = T.ylo + int64_t(idx);
        double v1 = T.vy[size_t(y1)];
        Part& P = parts[idx];
        int64_t a = y1 * y1;
        for (int64_t y2 = T.ylo; y2 <= T.yhi; ++y2) {
            double v12 = v1 * T.vy[size_t(y2)];
            if (v12 == 0) continue;
            int64_t b = y2 * y2, g12 = arith::gcd(y1, y2);
            for (int64_t y3 = T.ylo; y3 <= T.yhi; ++y3) {
                double V = v12 * T.vy[size_t(y3)];
                if (V == 0) continue;
                int64_t c = y3 * y3;
                int s = arith::gcd(g12, y3) > cut ? 1 : 0;
                int64_t g = arith::gcd(b, c);
                int64_t step1 = g / arith::gcd(g, a);
                int64_t M = c / g;
                int64_t A = arith::mod(a / arith::gcd(g, a), M);  // x1 a / g = k A
                int64_t inv = M == 1 ? 0 : arith::inv_mod((b / g) % M, M);
                int64_t delta = M == 1 ? 0 : arith::mod(-int64_t((__int128)A * inv % M), M);
                CompensatedSum acc;
                uint64_t raw = 0;
                int64_t r = 0;
                for (int64_t x1 = 0; x1 <= R; x1 += step1) {
                    double u1 = T.ux[size_t(x1 + R)];
                    int mult = x1 == 0 ? 1 : 2;
                    for (int64_t x2 = -R + arith::mod(r + R, M); x2 <= R; x2 += M) {
                        __int128 num = -((__int128)a * x1 + (__int128)b * x2);
                        int64_t x3 = int64_t(num / c);
                        if (x3 < -R || x3 > R) continue;
                        double wt = u1 * T.ux[size_t(x2 + R)] * T.ux[size_t(x3 + R)];
                        if (wt == 0) continue;
                        acc.add(mult * wt);
                        raw += uint64_t(mult);
                    }
                    r += delta;
                    if (r >= M) r -= M;
                }
                P.w[s].add(8 * V * acc.value());
                P.raw[s] += 8 * raw;
            }
        }
    });
    CompensatedSum tot[2];
    uint64_t raw[2] = {0, 0};
    for (auto& P : parts)
        for (int s = 0; s < 2; ++s) tot[s].add(P.w[s]), raw[s] += P.raw[s];
    CountReport rep;
    rep.B = B;
    rep.theta = theta;
    rep.strata = {{1, cut, tot[0].value(), raw[0]}, {cut + 1, std::max(T.yhi, cut + 1), tot[1].value(), raw[1]}};
    CompensatedSum all;
    all.add(tot[0]);
    all.add(tot[1]);
    rep.weighted_count = all.value();
    rep.raw_count = raw[0] + raw[1];
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline CountReport count_weighted(int64_t B, const WeightSpec& w, unsigned workers = default_workers()) {
    return count_gcd_strata(B, w, 0.75, workers);
}

// Full-box oracle: all x1, x2, y in the box, x3 by exact division
inline CountReport count_naive(int64_t B, const WeightSpec& w, double theta = 0.75) {
    if (B < 1 || B > kNaiveMaxB) throw GuardError("count_naive: B must lie in [1, 16]");
    densities::validate(w);
    double Bd = double(B);
    int64_t R = int64_t(std::ceil(w.scale * Bd));
    int64_t cut = detail::stratum_cut(B, theta);
    CompensatedSum tot[2];
    uint64_t raw[2] = {0, 0};
    for (int64_t y1 = -R; y1 <= R; ++y1)
        for (int64_t y2 = -R; y2 <= R; ++y2)
            for (int64_t y3 = -R; y3 <= R; ++y3) {
                if (y3 == 0) continue;
                int64_t h = std::gcd(std::gcd(y1, y2), y3);
                int s = h > cut ? 1 : 0;
                for (int64_t x1 = -R; x1 <= R; ++x1)
                    for (int64_t x2 = -R; x2 <= R; ++x2) {
                        int64_t num = -(x1 * y1 * y1 + x2 * y2 * y2);
                        if (num % (y3 * y3) != 0) continue;
                        int64_t x3 = num / (y3 * y3);
                        std::array<double, 6> z{x1 / Bd, x2 / Bd, x3 / Bd, y1 / Bd, y2 / Bd, y3 / Bd};
                        double wt = densities::weight_eval(w, z);
                        if (wt == 0) continue;
                        tot[s].add(wt);
                        ++raw[s];
                    }
            }
    CountReport rep;
    rep.B = B;
    rep.theta = theta;
    rep.strata = {{1, cut, tot[0].value(), raw[0]}, {cut + 1, std::max(R, cut + 1), tot[1].value(), raw[1]}};
    CompensatedSum all;
    all.add(tot[0]);
    all.add(tot[1]);
    rep.weighted_count = all.value();
    rep.raw_count = raw[0] + raw[1];
    return rep;
}

// R(B) = N(B) / (sigma_inf / zeta(3) * B^3 log B)
inline double main_term(int64_t B, double sigma_inf) {
    double b = double(B);
    return sigma_inf / double(densities::zeta3()) * b * b * b * std::log(b);
}

struct SlopeFit {
    std::vector<double> xs;  // log t
    std::vector<double> ys;  // partial sums
    double slope = 0, intercept = 0, residual = 0;
};

inline SlopeFit least_squares(std::vector<double> xs, std::vector<double> ys) {
    SlopeFit f;
    size_t n = xs.size();
    if (n < 2) throw GuardError("least_squares: need at least two points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
    mx /= double(n), my /= double(n);
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) sxx += (xs[i] - mx) * (xs[i] - mx), sxy += (xs[i] - mx) * (ys[i] - my);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = ys[i] - f.intercept - f.slope * xs[i];
        rss += e * e;
    }
    f.residual = std::sqrt(rss / double(n));
    f.xs = std::move(xs);
    f.ys = std::move(ys);
    return f;
}

// q^-6 S_q(0,0) for all q <= x, multiplicative via smallest prime factors
inline std::vector<long double> series_terms(int64_t x) {
    if (x < 1 || x > kSeriesMax) throw GuardError("series: x must lie in [1, 1e7]");
    std::vector<uint32_t> spf(size_t(x + 1), 0);
    for (int64_t i = 2; i <= x; ++i)
        if (!spf[size_t(i)])
            for (int64_t j = i; j <= x; j += i)
                if (!spf[size_t(j)]) spf[size_t(j)] = uint32_t(i);
    std::vector<long double> f(size_t(x + 1), 0);
    if (x >= 1) f[1] = 1;
    for (int64_t q = 2; q <= x; ++q) {
        int64_t p = spf[size_t(q)], m = q;
        int r = 0;
        while (m % p == 0) m /= p, ++r;
        // p^(-2r + 3 floor(r/2)) (1 - 1/p)
        long double v = std::pow((long double)p, -2 * r + 3 * (r / 2)) * (1 - 1.0L / p);
        f[size_t(q)] = v * f[size_t(m)];
    }
    return f;
}

inline std::vector<long double> series_partial_sums(int64_t x) {
    auto f = series_terms(x);
    std::vector<long double> s(f.size(), 0);
    long double acc = 0;
    for (size_t q = 1; q < f.size(); ++q) s[q] = acc += f[q];
    return s;
}

// Least-squares fit of Sigma(t) against log t at log-spaced t in [lo, hi]
inline SlopeFit fit_partial_sums(const std::vector<long double>& S, int64_t lo, int64_t hi, int points = 200) {
    if (lo < 1 || hi >= int64_t(S.size()) || lo >= hi) throw GuardError("fit: bad range");
    std::vector<double> xs, ys;
    int64_t last = 0;
    for (int i = 0; i < points; ++i) {
        double e = std::log(double(lo)) + (std::log(double(hi)) - std::log(double(lo))) * i / (points - 1);
        int64_t t = std::clamp<int64_t>(int64_t(std::llround(std::exp(e))), lo, hi);
        if (t == last) continue;
        last = t;
        xs.push_back(std::log(double(t)));
        ys.push_back(double(S[size_t(t)]));
    }
    return least_squares(std::move(xs), std::move(ys));
}

inline SlopeFit sigma_partial(int64_t x) {
    if (x < 200) throw GuardError("sigma_partial: x must be at least 200");
    auto S = series_partial_sums(x);
    return fit_partial_sums(S, x / 100, x);
}

struct SeriesAudit {
    int64_t t = 0;
    uint64_t term_mismatches = 0;
    double max_rel_dev = 0;
};

// Exact partial sums from the closed form against the floating sieve
inline SeriesAudit series_exact_audit(int64_t t) {
    if (t < 1 || t > 5000) throw GuardError("series_exact_audit: t must lie in [1, 5000]");
    auto S = series_partial_sums(t);
    SeriesAudit a;
    a.t = t;
    Rational acc = 0;
    for (int64_t q = 1; q <= t; ++q) {
        Rational term(expsums::s_q_00(q), expsums::pow_big(q, 6));
        Rational before = acc;
        acc += term;
        if (acc - before != term) ++a.term_mismatches;
        double ex = acc.convert_to<double>();
        a.max_rel_dev = std::max(a.max_rel_dev, std::fabs(double(S[size_t(q)]) - ex) / ex);
    }
    return a;
}

struct HooleyStats {
    int64_t T = 0;
    Triple d{1, 1, 1};
    BigInt s0 = 0;  // sum of Delta(G)
    BigInt s1 = 0;  // sum of Delta(G)^2
    uint64_t terms = 0;
    double ratio0 = 0, ratio1 = 0;  // S * d1 d2 d3 / T^6
};

// Sum of Delta(G(m,n)) over |m|,|n| <= T, d_i | m_i != 0, D(m,n) != 0.
// G is even in m and in each n_i: m1 > 0 is doubled and n_i > 0 doubled.
inline HooleyStats hooley_ST(int64_t T, const Triple& d, unsigned workers = default_workers()) {
    if (T < 1 || T > kHooleyMaxT) throw GuardError("hooley_ST: T must lie in [1, 60]");
    for (auto di : d)
        if (di < 1) throw GuardError("hooley_ST: d must be positive");
    HooleyStats st;
    st.T = T;
    st.d = d;
    std::vector<int64_t> m1s;
    for (int64_t m = d[0]; m <= T; m += d[0]) m1s.push_back(m);
    struct Part {
        BigInt s0 = 0, s1 = 0;
        uint64_t terms = 0;
    };
    std::vector<Part> parts(m1s.size());
    parallel_for(m1s.size(), workers, [&](size_t idx) {
        Part& P = parts[idx];
        int64_t acc0 = 0, acc1 = 0;
        std::unordered_map<uint64_t, int64_t> memo;
        Freq f;
        f.m[0] = m1s[idx];
        for (int64_t m2 = -T; m2 <= T; ++m2) {
            if (m2 == 0 || m2 % d[1]) continue;
            f.m[1] = m2;
            for (int64_t m3 = -T; m3 <= T; ++m3) {
                if (m3 == 0 || m3 % d[2]) continue;
                f.m[2] = m3;
                for (int64_t n1 = 0; n1 <= T; ++n1)
                    for (int64_t n2 = 0; n2 <= T; ++n2)
                        for (int64_t n3 = 0; n3 <= T; ++n3) {
                            f.n = {n1, n2, n3};
                            i128 D = dualgeom::dual_form(f);
                            if (D == 0) continue;
                            uint64_t G = uint64_t(6 * (D < 0 ? -D : D));
                            auto it = memo.find(G);
                            int64_t dl;
                            if (it != memo.end()) dl = it->second;
                            else dl = memo[G] = arith::hooley_delta(int64_t(G));
                            int64_t mult = 2 << ((n1 > 0) + (n2 > 0) + (n3 > 0));
                            acc0 += mult * dl;
                            acc1 += mult * dl * dl;
                            P.terms += uint64_t(mult);
                        }
            }
        }
        P.s0 = acc0;
        P.s1 = acc1;
    });
    for (auto& P : parts) st.s0 += P.s0, st.s1 += P.s1, st.terms += P.terms;
    double scale = double(d[0] * d[1] * d[2]) / std::pow(double(T), 6);
    st.ratio0 = st.s0.convert_to<double>() * scale;
    st.ratio1 = st.s1.convert_to<double>() * scale;
    return st;
}

// G_d^e(x,y) = sum d_i^2 x_i^2 y_i^4 - 2 sum_{i<j} e_i e_j d_i d_j x_i x_j y_i^2 y_j^2
inline int64_t g_d_eps_mod(int64_t p, const Triple& d, const Triple& e, const Triple& x, const Triple& y) {
    int64_t a[3];
    for (int i = 0; i < 3; ++i) a[i] = arith::mod(e[size_t(i)] * d[size_t(i)] % p * x[size_t(i)] % p * y[size_t(i)] % p * y[size_t(i)], p);
    int64_t s = 0;
    for (int i = 0; i < 3; ++i) s += a[i] * a[i];
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) s -= 2 * a[i] * a[j];
    return arith::mod(s, p);
}

// Zeros of G_d^e over F_p^6 by direct scan
inline int64_t rho_g(int64_t p, const Triple& d, const Triple& e) {
    if (p > kRhoMaxP || !arith::is_prime(uint64_t(p))) throw GuardError("rho_g: p must be a prime <= 13");
    for (auto ei : e)
        if (ei != 1 && ei != -1) throw GuardError("rho_g: signs must be +-1");
    int64_t cnt = 0;
    Triple x, y;
    for (x[0] = 0; x[0] < p; ++x[0])
        for (x[1] = 0; x[1] < p; ++x[1])
            for (x[2] = 0; x[2] < p; ++x[2])
                for (y[0] = 0; y[0] < p; ++y[0])
                    for (y[1] = 0; y[1] < p; ++y[1])
                        for (y[2] = 0; y[2] < p; ++y[2])
                            if (g_d_eps_mod(p, d, e, x, y) == 0) ++cnt;
    return cnt;
}

// Same count through the value distribution of a_i = e_i d_i x_i y_i^2
inline int64_t rho_g_histogram(int64_t p, const Triple& d, const Triple& e) {
    std::vector<std::vector<int64_t>> h(3, std::vector<int64_t>(size_t(p), 0));
    for (int i = 0; i < 3; ++i)
        for (int64_t x = 0; x < p; ++x)
            for (int64_t y = 0; y < p; ++y)
                ++h[size_t(i)][size_t(arith::mod(e[size_t(i)] * d[size_t(i)] % p * x % p * y % p * y, p))];
    int64_t cnt = 0;
    for (int64_t a = 0; a < p; ++a)
        for (int64_t b = 0; b < p; ++b)
            for (int64_t c = 0; c < p; ++c) {
                int64_t s = arith::mod(a * a + b * b + c * c - 2 * (a * b + b * c + c * a), p);
                if (s == 0) cnt += h[0][size_t(a)] * h[1][size_t(b)] * h[2][size_t(c)];
            }
    return cnt;
}

struct RhoAudit {
    int64_t p = 0;
    Triple d{}, e{};
    int64_t rho = 0;
    int main_coeff = 1;  // c in rho = c p^5 + error
    double error_power = 4.5;
    double normalized_error = 0;  // |rho - c p^5| / p^error_power
};

inline RhoAudit rho_audit(int64_t p, const Triple& d, const Triple& e) {
    RhoAudit a;
    a.p = p, a.d = d, a.e = e;
    a.rho = rho_g(p, d, e);
    int divs = 0;
    for (auto di : d) divs += di % p == 0;
    if (divs >= 3) throw GuardError("rho_audit: gcd(d) must be coprime to p");
    a.main_coeff = divs == 2 ? 2 : 1;
    a.error_power = divs == 0 ? 4.5 : 4.0;
    double p5 = std::pow(double(p), 5);
    a.normalized_error = std::fabs(double(a.rho) - a.main_coeff * p5) / std::pow(double(p), a.error_power);
    return a;
}

}  // namespace delta_lab::counting
