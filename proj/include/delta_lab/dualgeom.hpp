#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "arith.hpp"
#include "types.hpp"

namespace delta_lab::dualgeom {

// D(m,n) = sum m_i^2 n_i^4 - 2 sum_{i<j} m_i m_j n_i^2 n_j^2
inline i128 dual_form(const Freq& f) {
    i128 sq = 0, cross = 0;
    for (int i = 0; i < 3; ++i) {
        i128 ni2 = i128(f.n[i]) * f.n[i];
        sq += i128(f.m[i]) * f.m[i] * ni2 * ni2;
        for (int j = i + 1; j < 3; ++j)
            cross += i128(f.m[i]) * f.m[j] * ni2 * f.n[j] * f.n[j];
    }
    return sq - 2 * cross;
}

inline std::array<i128, 3> abc(const Freq& f) {
    std::array<i128, 3> a{};
    for (int i = 0; i < 3; ++i) a[i] = i128(f.m[i]) * f.n[i] * f.n[i];
    return a;
}

inline i128 dual_via_abc(const Freq& f) {
    auto [a, b, c] = abc(f);
    return a * a + b * b + c * c - 2 * a * b - 2 * b * c - 2 * c * a;
}

inline i128 g_form(const Freq& f) { return 6 * dual_form(f); }

inline std::array<i128, 3> l_forms(const Freq& f) {
    auto a = abc(f);
    i128 s = a[0] + a[1] + a[2];
    return {2 * a[0] - s, 2 * a[1] - s, 2 * a[2] - s};
}

// (dG/dm_1..3, dG/dn_1..3)
inline std::array<i128, 6> grad_g(const Freq& f) {
    auto L = l_forms(f);
    std::array<i128, 6> g{};
    for (int i = 0; i < 3; ++i) {
        g[i] = 12 * i128(f.n[i]) * f.n[i] * L[i];
        g[3 + i] = 24 * i128(f.m[i]) * f.n[i] * L[i];
    }
    return g;
}

inline i128 cubic_form(const Triple& x, const Triple& y) {
    i128 s = 0;
    for (int i = 0; i < 3; ++i) s += i128(x[i]) * y[i] * y[i];
    return s;
}

// F(x,y) | D(grad F(x,y)); requires F(x,y) != 0
inline bool poly_div_check(const Triple& x, const Triple& y) {
    i128 F = cubic_form(x, y);
    if (F == 0) throw std::invalid_argument("poly_div_check: F(x,y) = 0");
    Freq g;
    for (int i = 0; i < 3; ++i) {
        g.m[i] = y[i] * y[i];
        g.n[i] = 2 * x[i] * y[i];
    }
    return dual_form(g) % F == 0;
}

// ---------------------------------------------------------------- lattices

using Vec6 = std::array<int64_t, 6>;

inline Triple normalize_direction(Triple t) {
    int64_t g = std::gcd(std::gcd(t[0], t[1]), t[2]);
    if (g == 0) throw std::invalid_argument("normalize_direction: t = 0");
    for (auto& v : t) v /= g;
    for (auto v : t) {
        if (v == 0) continue;
        if (v < 0)
            for (auto& w : t) w = -w;
        break;
    }
    return t;
}

inline bool is_primitive(const Triple& t) {
    return std::gcd(std::gcd(t[0], t[1]), t[2]) == 1;
}

inline int64_t dot(const Triple& a, const Triple& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Z-basis of {x in Z^3 : w.x = 0}, Lagrange-reduced
inline std::array<Triple, 2> kernel_basis(const Triple& w) {
    std::array<int64_t, 3> r = w;
    std::array<Triple, 3> U{Triple{1, 0, 0}, Triple{0, 1, 0}, Triple{0, 0, 1}};
    if (r[0] == 0 && r[1] == 0 && r[2] == 0) throw std::invalid_argument("kernel_basis: w = 0");
    for (;;) {
        int piv = -1;
        for (int j = 0; j < 3; ++j)
            if (r[j] != 0 && (piv < 0 || std::abs(r[j]) < std::abs(r[piv]))) piv = j;
        bool done = true;
        for (int k = 0; k < 3; ++k) {
            if (k == piv || r[k] == 0) continue;
            int64_t q = r[k] / r[piv];
            r[k] -= q * r[piv];
            for (int i = 0; i < 3; ++i) U[k][i] -= q * U[piv][i];
            done = false;
        }
        if (done) {
            std::array<Triple, 2> out;
            int c = 0;
            for (int k = 0; k < 3; ++k)
                if (k != piv) out[c++] = U[k];
            // Lagrange reduction
            auto& a = out[0];
            auto& b = out[1];
            for (;;) {
                if (dot(a, a) > dot(b, b)) std::swap(a, b);
                int64_t aa = dot(a, a);
                int64_t mu = int64_t(std::llround(double(dot(a, b)) / double(aa)));
                if (mu == 0) break;
                for (int i = 0; i < 3; ++i) b[i] -= mu * a[i];
                if (dot(b, b) >= aa) break;
            }
            return out;
        }
    }
}

enum class LatticeParent { Lambda, LambdaPerp };

struct LatticeBasis {
    std::array<Vec6, 3> rows;
    LatticeParent parent;
    Triple t;
};

inline void require_primitive(const Triple& t) {
    if (t == Triple{0, 0, 0} || !is_primitive(t))
        throw std::invalid_argument("lattice: t must be primitive and nonzero");
}

inline bool in_lambda(const Vec6& v, const Triple& t) {
    i128 s = 0;
    for (int i = 0; i < 3; ++i) s += i128(v[i]) * t[i] * t[i];
    if (s != 0) return false;
    // y parallel to t with integer multiplier
    int k = 0;
    while (t[k] == 0) ++k;
    if (v[3 + k] % t[k] != 0) return false;
    int64_t s0 = v[3 + k] / t[k];
    for (int i = 0; i < 3; ++i)
        if (v[3 + i] != s0 * t[i]) return false;
    return true;
}

inline bool in_lambda_perp(const Vec6& v, const Triple& t) {
    int k = 0;
    while (t[k] == 0) ++k;
    int64_t tk2 = t[k] * t[k];
    if (v[k] % tk2 != 0) return false;
    int64_t h = v[k] / tk2;
    for (int i = 0; i < 3; ++i)
        if (v[i] != h * t[i] * t[i]) return false;
    return i128(v[3]) * t[0] + i128(v[4]) * t[1] + i128(v[5]) * t[2] == 0;
}

inline LatticeBasis lambda_basis(const Triple& t) {
    require_primitive(t);
    auto k = kernel_basis({t[0] * t[0], t[1] * t[1], t[2] * t[2]});
    LatticeBasis b{{}, LatticeParent::Lambda, t};
    b.rows[0] = {k[0][0], k[0][1], k[0][2], 0, 0, 0};
    b.rows[1] = {k[1][0], k[1][1], k[1][2], 0, 0, 0};
    b.rows[2] = {0, 0, 0, t[0], t[1], t[2]};
    return b;
}

inline LatticeBasis lambda_perp_basis(const Triple& t) {
    require_primitive(t);
    auto k = kernel_basis(t);
    LatticeBasis b{{}, LatticeParent::LambdaPerp, t};
    b.rows[0] = {t[0] * t[0], t[1] * t[1], t[2] * t[2], 0, 0, 0};
    b.rows[1] = {0, 0, 0, k[0][0], k[0][1], k[0][2]};
    b.rows[2] = {0, 0, 0, k[1][0], k[1][1], k[1][2]};
    return b;
}

inline Freq as_freq(const Vec6& v) {
    return Freq{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

inline int64_t pairing(const Vec6& a, const Vec6& b) {
    int64_t s = 0;
    for (int i = 0; i < 6; ++i) s += a[i] * b[i];
    return s;
}

inline Vec6 combine(const LatticeBasis& b, const Triple& c) {
    Vec6 v{};
    for (int r = 0; r < 3; ++r)
        for (int i = 0; i < 6; ++i) v[i] += c[r] * b.rows[r][i];
    return v;
}

inline double norm2(const Vec6& v) {
    double s = 0;
    for (auto x : v) s += double(x) * double(x);
    return s;
}

namespace detail {

inline bool inv3(const std::array<std::array<double, 3>, 3>& a, std::array<std::array<double, 3>, 3>& out) {
    double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (det == 0) return false;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            out[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / det;
        }
    return true;
}

// rank of a set of integer vectors (exact, fraction-free elimination)
inline int rank(std::vector<std::array<i128, 6>> rows) {
    int r = 0;
    for (int col = 0; col < 6 && r < int(rows.size()); ++col) {
        int piv = -1;
        for (int i = r; i < int(rows.size()); ++i)
            if (rows[i][col] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        for (int i = r + 1; i < int(rows.size()); ++i) {
            i128 a = rows[r][col], b = rows[i][col];
            if (b == 0) continue;
            for (int k = 0; k < 6; ++k) rows[i][k] = rows[i][k] * a - rows[r][k] * b;
            // keep entries small
            i128 gg = 0;
            for (int k = 0; k < 6; ++k) {
                i128 v = rows[i][k] < 0 ? -rows[i][k] : rows[i][k];
                while (v) { i128 t = gg % v; gg = v; v = t; }
            }
            if (gg > 1)
                for (int k = 0; k < 6; ++k) rows[i][k] /= gg;
        }
        ++r;
    }
    return r;
}

}  // namespace detail

// successive minima (Euclidean) by exhaustive short-vector search
inline std::array<double, 3> successive_minima(const LatticeBasis& b) {
    std::array<std::array<double, 3>, 3> G{}, Gi{};
    double R2 = 0;
    for (int i = 0; i < 3; ++i) {
        R2 = std::max(R2, norm2(b.rows[i]));
        for (int j = 0; j < 3; ++j) G[i][j] = double(pairing(b.rows[i], b.rows[j]));
    }
    if (!detail::inv3(G, Gi)) throw std::invalid_argument("successive_minima: dependent basis");
    std::array<int64_t, 3> bound{};
    for (int i = 0; i < 3; ++i) bound[i] = int64_t(std::floor(std::sqrt(R2 * Gi[i][i]) + 1e-9));
    std::vector<std::pair<double, Vec6>> vs;
    for (int64_t a = -bound[0]; a <= bound[0]; ++a)
        for (int64_t c = -bound[1]; c <= bound[1]; ++c)
            for (int64_t d = -bound[2]; d <= bound[2]; ++d) {
                if (a == 0 && c == 0 && d == 0) continue;
                Vec6 v = combine(b, {a, c, d});
                double n2 = norm2(v);
                if (n2 <= R2 * (1 + 1e-12)) vs.push_back({n2, v});
            }
    std::sort(vs.begin(), vs.end(), [](auto& x, auto& y) { return x.first < y.first; });
    std::array<double, 3> out{};
    std::vector<std::array<i128, 6>> chosen;
    for (auto& [n2, v] : vs) {
        std::array<i128, 6> w{};
        for (int i = 0; i < 6; ++i) w[i] = v[i];
        auto trial = chosen;
        trial.push_back(w);
        if (detail::rank(trial) > int(chosen.size())) {
            out[chosen.size()] = std::sqrt(n2);
            chosen.push_back(w);
            if (chosen.size() == 3) break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- classes

enum class DualKind { AllGeneric, MixedZero, CoordinateDegenerate, OffDual };

inline const char* kind_name(DualKind k) {
    switch (k) {
        case DualKind::AllGeneric: return "AllGeneric";
        case DualKind::MixedZero: return "MixedZero";
        case DualKind::CoordinateDegenerate: return "CoordinateDegenerate";
        case DualKind::OffDual: return "OffDual";
    }
    return "?";
}

struct DualClass {
    DualKind kind = DualKind::OffDual;
    int index = -1;  // 0-based zero coordinate for MixedZero
    Triple t{0, 0, 0};
    friend bool operator==(const DualClass&, const DualClass&) = default;
};

namespace detail {

// |v| = c s^2 with c squarefree
inline std::pair<int64_t, int64_t> squarefree_split(int64_t v) {
    int64_t c = 1, s = 1;
    for (auto [p, r] : arith::factor(uint64_t(v < 0 ? -v : v)).factors) {
        s *= arith::ipow(p, unsigned(r / 2));
        if (r % 2) c *= p;
    }
    return {c, s};
}

}  // namespace detail

inline DualClass classify_dual_point(const Freq& f) {
    if (f.is_zero()) throw std::invalid_argument("classify_dual_point: f = 0");
    if (dual_form(f) != 0) return {DualKind::OffDual, -1, {0, 0, 0}};
    int zeros = 0, zi = -1;
    for (int i = 0; i < 3; ++i)
        if (f.m[i] == 0 || f.n[i] == 0) ++zeros, zi = i;
    if (zeros == 3) return {DualKind::CoordinateDegenerate, -1, {0, 0, 0}};

    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
            if (f.m[j] && f.m[k] && f.n[j] && f.n[k] && !arith::is_square(f.m[j] * f.m[k]))
                throw InvariantError("dual point with m_j m_k not a square: " + to_string(f));

    if (zeros == 1) {
        int i = zi, j = (i + 1) % 3, k = (i + 2) % 3;
        if (j > k) std::swap(j, k);
        i128 aj = i128(f.m[j]) * f.n[j] * f.n[j], ak = i128(f.m[k]) * f.n[k] * f.n[k];
        if (aj != ak || aj == 0) throw InvariantError("mixed dual point violates m_j n_j^2 = m_k n_k^2: " + to_string(f));
        Triple t{0, 0, 0};
        int64_t g = std::gcd(f.n[k], f.n[j]);
        t[j] = -f.n[k] / g;
        t[k] = f.n[j] / g;
        t = normalize_direction(t);
        int64_t tj2 = t[j] * t[j], tk2 = t[k] * t[k];
        if (f.m[j] % tj2 || f.m[k] % tk2 || f.m[j] / tj2 != f.m[k] / tk2)
            throw InvariantError("mixed dual point: m not in t^2 Z: " + to_string(f));
        return {DualKind::MixedZero, i, t};
    }
    if (zeros != 0) throw InvariantError("dual point with two mixed zeros: " + to_string(f));

    // all m_i n_i != 0: m = h t^2
    Triple s{};
    int64_t c0 = 0, sign = 0;
    for (int i = 0; i < 3; ++i) {
        auto [c, si] = detail::squarefree_split(f.m[i]);
        int sg = f.m[i] > 0 ? 1 : -1;
        if (i == 0) c0 = c, sign = sg;
        else if (c != c0 || sg != sign) throw InvariantError("generic dual point: m not in h t^2 Z: " + to_string(f));
        s[i] = si;
    }
    std::set<Triple> found;
    for (int e1 : {1, -1})
        for (int e2 : {1, -1}) {
            Triple t{s[0], e1 * s[1], e2 * s[2]};
            if (i128(f.n[0]) * t[0] + i128(f.n[1]) * t[1] + i128(f.n[2]) * t[2] == 0)
                found.insert(normalize_direction(t));
        }
    if (found.size() != 1) throw InvariantError("generic dual point: [t] not unique: " + to_string(f));
    return {DualKind::AllGeneric, -1, *found.begin()};
}

struct DualPoint {
    Freq f;
    DualClass cls;
};

inline int64_t height(const Freq& f) {
    int64_t h = 0;
    for (int i = 0; i < 3; ++i) h = std::max({h, std::abs(f.m[i]), std::abs(f.n[i])});
    return h;
}

inline bool height_lex_less(const Freq& a, const Freq& b) {
    int64_t ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a < b;
}

struct EnumerateOptions {
    bool coordinate = true;
};

// all (m,n) != 0 with |m|,|n| <= M and D(m,n) = 0
inline std::vector<DualPoint> enumerate_dual_points(int64_t M, EnumerateOptions opt = {}) {
    if (M < 0) throw std::invalid_argument("enumerate_dual_points: M < 0");
    if (opt.coordinate && M > 60) throw GuardError("enumerate_dual_points: M <= 60 with coordinate points");
    if (M > 500) throw GuardError("enumerate_dual_points: M <= 500");
    std::set<Freq, decltype(&height_lex_less)> pts(&height_lex_less);
    int64_t R = int64_t(arith::isqrt(uint64_t(M)));

    // all m_i n_i != 0: m = h t^2, n.t = 0
    for (int64_t t0 = 1; t0 <= R; ++t0)
        for (int64_t t1 = -R; t1 <= R; ++t1)
            for (int64_t t2 = -R; t2 <= R; ++t2) {
                if (!t1 || !t2) continue;
                Triple t{t0, t1, t2};
                if (!is_primitive(t)) continue;
                int64_t tm = std::max({t0 * t0, t1 * t1, t2 * t2});
                for (int64_t h = -M / tm; h <= M / tm; ++h) {
                    if (!h) continue;
                    for (int64_t n0 = -M; n0 <= M; ++n0)
                        for (int64_t n1 = -M; n1 <= M; ++n1) {
                            if (!n0 || !n1) continue;
                            int64_t s = n0 * t0 + n1 * t1;
                            if (s % t2) continue;
                            int64_t n2 = -s / t2;
                            if (!n2 || std::abs(n2) > M) continue;
                            pts.insert(Freq{{h * t0 * t0, h * t1 * t1, h * t2 * t2}, {n0, n1, n2}});
                        }
                }
            }

    // one index i with m_i n_i = 0
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        if (j > k) std::swap(j, k);
        for (int64_t tj = 1; tj <= R; ++tj)
            for (int64_t tk = -R; tk <= R; ++tk) {
                if (!tk || std::gcd(tj, tk) != 1) continue;
                int64_t tm = std::max(tj * tj, tk * tk), ta = std::max(tj, std::abs(tk));
                for (int64_t h = -M / tm; h <= M / tm; ++h) {
                    if (!h) continue;
                    for (int64_t lam = -M / ta; lam <= M / ta; ++lam) {
                        if (!lam) continue;
                        Freq f;
                        f.m[j] = h * tj * tj;
                        f.m[k] = h * tk * tk;
                        f.n[j] = lam * tk;
                        f.n[k] = -lam * tj;
                        for (int64_t v = -M; v <= M; ++v) {
                            Freq g = f;
                            g.m[i] = v;
                            pts.insert(g);
                            if (v) {
                                g.m[i] = 0;
                                g.n[i] = v;
                                pts.insert(g);
                            }
                        }
                    }
                }
            }
    }

    if (opt.coordinate) {
        std::vector<std::pair<int64_t, int64_t>> opts;
        for (int64_t v = -M; v <= M; ++v) {
            opts.push_back({v, 0});
            if (v) opts.push_back({0, v});
        }
        for (auto& a : opts)
            for (auto& b : opts)
                for (auto& c : opts) {
                    Freq f{{a.first, b.first, c.first}, {a.second, b.second, c.second}};
                    if (!f.is_zero()) pts.insert(f);
                }
    }

    std::vector<DualPoint> out;
    out.reserve(pts.size());
    for (auto& f : pts) out.push_back({f, classify_dual_point(f)});
    return out;
}

// naive box scan, cost (2M+1)^6
inline std::vector<Freq> naive_dual_scan(int64_t M) {
    if (M > 12) throw GuardError("naive_dual_scan: M <= 12");
    std::vector<Freq> out;
    Freq f;
    for (f.m[0] = -M; f.m[0] <= M; ++f.m[0])
        for (f.m[1] = -M; f.m[1] <= M; ++f.m[1])
            for (f.m[2] = -M; f.m[2] <= M; ++f.m[2])
                for (f.n[0] = -M; f.n[0] <= M; ++f.n[0])
                    for (f.n[1] = -M; f.n[1] <= M; ++f.n[1])
                        for (f.n[2] = -M; f.n[2] <= M; ++f.n[2])
                            if (!f.is_zero() && dual_via_abc(f) == 0) out.push_back(f);
    std::sort(out.begin(), out.end(), height_lex_less);
    return out;
}

// D = 0 locus by solving the quadratic in n_3^2 for each (m, n_1, n_2)
inline std::vector<Freq> semi_naive_dual_scan(int64_t M) {
    if (M > 30) throw GuardError("semi_naive_dual_scan: M <= 30");
    std::vector<Freq> out;
    Freq f;
    for (f.m[0] = -M; f.m[0] <= M; ++f.m[0])
        for (f.m[1] = -M; f.m[1] <= M; ++f.m[1])
            for (f.m[2] = -M; f.m[2] <= M; ++f.m[2])
                for (f.n[0] = -M; f.n[0] <= M; ++f.n[0])
                    for (f.n[1] = -M; f.n[1] <= M; ++f.n[1]) {
                        i128 a = i128(f.m[0]) * f.n[0] * f.n[0], b = i128(f.m[1]) * f.n[1] * f.n[1];
                        // c = m_3 n_3^2 solves c^2 - 2c(a+b) + (a-b)^2 = 0
                        auto emit = [&](int64_t n3) {
                            Freq g = f;
                            g.n[2] = n3;
                            if (!g.is_zero()) out.push_back(g);
                        };
                        if (f.m[2] == 0) {
                            if (a == b)
                                for (int64_t v = -M; v <= M; ++v) emit(v);
                            continue;
                        }
                        if (a == b) emit(0);
                        i128 ab = a * b;
                        if (ab < 0) continue;
                        i128 r = i128(arith::isqrt(uint64_t(ab)));
                        if (r * r != ab) continue;
                        for (i128 c : {a + b + 2 * r, a + b - 2 * r}) {
                            if (c == 0) continue;
                            if (c % f.m[2]) continue;
                            i128 s2 = c / f.m[2];
                            if (s2 <= 0 || !arith::is_square(int64_t(s2))) continue;
                            int64_t v = int64_t(arith::isqrt(uint64_t(s2)));
                            if (v > M) continue;
                            emit(v);
                            emit(-v);
                        }
                    }
    std::sort(out.begin(), out.end(), height_lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// p | grad G componentwise
inline bool divides_grad(int64_t p, const Freq& f) {
    for (auto g : grad_g(f))
        if (g % p != 0) return false;
    return true;
}

}  // namespace delta_lab::dualgeom
