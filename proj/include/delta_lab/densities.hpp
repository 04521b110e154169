#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "types.hpp"

namespace delta_lab::densities {

inline constexpr uint64_t kDefaultSeed = 0xC0FFEE;

// W(x, y) = prod u(x_i / s) * prod v(y_i / s)
struct WeightSpec {
    double delta0 = 0.25;
    double scale = 1.0;
    std::string profile = "mollifier";
};

inline void validate(const WeightSpec& w) {
    if (!(w.delta0 > 0 && w.delta0 < 1)) throw GuardError("WeightSpec: delta0 must lie in (0,1)");
    if (!(w.scale > 0)) throw GuardError("WeightSpec: scale must be positive");
    if (w.profile != "mollifier") throw GuardError("WeightSpec: unknown profile '" + w.profile + "'");
}

inline double mollifier(double t) {
    if (t <= -1 || t >= 1) return 0;
    return std::exp(-1 / (1 - t * t));
}

inline double u_profile(const WeightSpec& w, double x) { return mollifier(x / w.scale); }

inline double v_profile(const WeightSpec& w, double y) {
    double a = std::fabs(y) / w.scale;
    if (a <= w.delta0 || a >= 1) return 0;
    double c = (1 + w.delta0) / 2, h = (1 - w.delta0) / 2;
    return mollifier((a - c) / h);
}

inline double weight_eval(const WeightSpec& w, const std::array<double, 6>& z) {
    double r = 1;
    for (int i = 0; i < 3; ++i) {
        r *= u_profile(w, z[i]);
        if (r == 0) return 0;
    }
    for (int i = 3; i < 6; ++i) {
        r *= v_profile(w, z[i]);
        if (r == 0) return 0;
    }
    return r;
}

enum class Method { SlabMonteCarlo, LeraySlice, LatticeLimit };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::SlabMonteCarlo: return "slab_monte_carlo";
        case Method::LeraySlice: return "leray_slice";
        case Method::LatticeLimit: return "lattice_limit";
    }
    return "?";
}

struct DensityEstimate {
    double value = 0;
    double stderr_ = 0;
    double error_estimate = 0;  // difference between the last two refinement levels
    Method method = Method::LeraySlice;
    uint64_t nodes = 0;
    uint64_t seed = 0;
};

struct QuadOptions {
    double abs_tol = 1e-6;
    double rel_tol = 1e-4;
    uint64_t max_nodes = 4'000'000'000ULL;
};

struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, uint64_t nodes, double err)
        : std::runtime_error(what + ": no convergence within node budget (nodes=" + std::to_string(nodes) +
                             ", last error=" + std::to_string(err) + ")") {}
};

namespace detail {

inline std::vector<double> midpoints(double a, double b, int n) {
    std::vector<double> r(static_cast<size_t>(n));
    double h = (b - a) / n;
    for (int i = 0; i < n; ++i) r[size_t(i)] = a + (i + 0.5) * h;
    return r;
}

// Integral over the x-box of u(x1) u(x2) u(-a x1 - b x2), midpoint rule on n x n cells
struct KGrid {
    const WeightSpec* w;
    int n;
    double h;
    std::vector<double> xs, ux;

    KGrid(const WeightSpec& ws, int n_) : w(&ws), n(n_) {
        double s = ws.scale;
        h = 2 * s / n;
        xs = midpoints(-s, s, n);
        ux.resize(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) ux[i] = u_profile(ws, xs[i]);
    }

    double operator()(double a, double b) const {
        double s = w->scale, tot = 0;
        for (int i = 0; i < n; ++i) {
            if (ux[size_t(i)] == 0) continue;
            double row = 0, base = -a * xs[size_t(i)];
            for (int j = 0; j < n; ++j) {
                double x3 = base - b * xs[size_t(j)];
                if (x3 <= -s || x3 >= s) continue;
                row += ux[size_t(j)] * mollifier(x3 / s);
            }
            tot += ux[size_t(i)] * row;
        }
        return tot * h * h;
    }
};

// Integral over s in R of prod v(s t_i), using evenness
inline double j_integral(const WeightSpec& w, const std::array<double, 3>& t, int n) {
    double lo = 0, hi = 1e300;
    for (double ti : t) {
        double a = std::fabs(ti);
        if (a == 0) return 0;
        lo = std::max(lo, w.delta0 * w.scale / a);
        hi = std::min(hi, w.scale / a);
    }
    if (lo >= hi) return 0;
    double h = (hi - lo) / n, tot = 0;
    for (int i = 0; i < n; ++i) {
        double s = lo + (i + 0.5) * h, p = 1;
        for (double ti : t) p *= v_profile(w, s * ti);
        tot += p;
    }
    return 2 * tot * h;
}

inline bool converged(double a, double b, const QuadOptions& o) {
    return std::fabs(a - b) <= std::max(o.abs_tol, o.rel_tol * std::fabs(b));
}

// 5-d slice integral at a fixed tensor grid (nx per x-axis, ny per y-axis)
inline double leray_fixed(const WeightSpec& w, int nx, int ny, unsigned workers) {
    KGrid K(w, nx);
    double s = w.scale;
    auto ys = midpoints(w.delta0 * s, s, ny);
    double hy = (1 - w.delta0) * s / ny;
    std::vector<double> vy(ys.size());
    for (size_t i = 0; i < ys.size(); ++i) vy[i] = v_profile(w, ys[i]);
    std::vector<double> slab(size_t(ny), 0.0);
    // the integrand is symmetric in (y1, y2) since K(a, b) = K(b, a)
    parallel_for(size_t(ny), workers, [&](size_t k) {
        double y3 = ys[k], v3 = vy[k];
        if (v3 == 0) return;
        double acc = 0;
        for (int i = 0; i < ny; ++i) {
            if (vy[size_t(i)] == 0) continue;
            double a = ys[size_t(i)] * ys[size_t(i)] / (y3 * y3);
            for (int j = i; j < ny; ++j) {
                if (vy[size_t(j)] == 0) continue;
                double b = ys[size_t(j)] * ys[size_t(j)] / (y3 * y3);
                double val = vy[size_t(i)] * vy[size_t(j)] * K(a, b);
                acc += (i == j ? 1 : 2) * val;
            }
        }
        slab[k] = acc * v3 / (y3 * y3);
    });
    double tot = 0;
    for (double x : slab) tot += x;
    return 8 * tot * hy * hy * hy;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double unit(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

}  // namespace detail

// Per-axis refinement: double whichever axis moves the value more, stop when
// both single-axis doublings are within tolerance.
inline DensityEstimate sigma_inf_leray(const WeightSpec& w, const QuadOptions& opt = {},
                                       unsigned workers = default_workers()) {
    validate(w);
    int nx = 16, ny = 8;
    auto cost = [](int a, int b) { return uint64_t(a) * a * uint64_t(b) * b * b / 2; };
    uint64_t used = 0;
    double cur = detail::leray_fixed(w, nx, ny, workers);
    used += cost(nx, ny);
    for (;;) {
        if (used + cost(2 * nx, ny) + cost(nx, 2 * ny) > opt.max_nodes)
            throw NonConvergence("sigma_inf_leray", used, std::fabs(cur));
        double fx = detail::leray_fixed(w, 2 * nx, ny, workers);
        double fy = detail::leray_fixed(w, nx, 2 * ny, workers);
        used += cost(2 * nx, ny) + cost(nx, 2 * ny);
        double dx = std::fabs(fx - cur), dy = std::fabs(fy - cur);
        if (detail::converged(fx, cur, opt) && detail::converged(fy, cur, opt)) {
            DensityEstimate e;
            e.value = cur;
            e.error_estimate = std::max(dx, dy);
            e.method = Method::LeraySlice;
            e.nodes = used;
            return e;
        }
        if (dx >= dy) nx *= 2, cur = fx;
        else ny *= 2, cur = fy;
    }
}

// (2 eps)^-1 times the W-mass of |F| <= eps, by uniform sampling of the support box.
// Samples are split into fixed blocks with their own streams, so the result
// does not depend on the worker count.
inline DensityEstimate sigma_inf_slab(const WeightSpec& w, double eps, uint64_t n, uint64_t seed = kDefaultSeed,
                                      unsigned workers = default_workers()) {
    validate(w);
    if (!(eps >= 1e-4 && eps <= 1e-1)) throw GuardError("sigma_inf_slab: eps must lie in [1e-4, 1e-1]");
    if (n < 10000) throw GuardError("sigma_inf_slab: N must be at least 1e4");
    constexpr uint64_t kBlock = 1 << 16;
    uint64_t nblocks = (n + kBlock - 1) / kBlock;
    double s = w.scale, ylo = w.delta0 * s, yw = (1 - w.delta0) * s;
    // y restricted to the positive octant; W and F are even in each y_i
    double vol = 8 * std::pow(2 * s, 3) * std::pow(yw, 3);
    std::vector<std::pair<double, double>> part(nblocks);
    parallel_for(size_t(nblocks), workers, [&](size_t b) {
        std::seed_seq sq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(b), uint32_t(uint64_t(b) >> 32),
                         uint32_t(detail::splitmix64(seed ^ b))};
        std::mt19937_64 g(sq);
        uint64_t cnt = std::min<uint64_t>(kBlock, n - b * kBlock);
        double s1 = 0, s2 = 0;
        for (uint64_t i = 0; i < cnt; ++i) {
            std::array<double, 6> z;
            for (int k = 0; k < 3; ++k) z[size_t(k)] = (2 * detail::unit(g) - 1) * s;
            for (int k = 3; k < 6; ++k) z[size_t(k)] = ylo + yw * detail::unit(g);
            double F = z[0] * z[3] * z[3] + z[1] * z[4] * z[4] + z[2] * z[5] * z[5];
            if (std::fabs(F) > eps) continue;
            double f = weight_eval(w, z);
            s1 += f;
            s2 += f * f;
        }
        part[b] = {s1, s2};
    });
    long double S1 = 0, S2 = 0;
    for (auto& [a, b] : part) S1 += a, S2 += b;
    long double mean = S1 / n, var = S2 / n - mean * mean;
    if (var < 0) var = 0;
    double scale = vol / (2 * eps);
    DensityEstimate e;
    e.value = double(mean) * scale;
    e.stderr_ = std::sqrt(double(var) / double(n)) * scale;
    e.method = Method::SlabMonteCarlo;
    e.nodes = n;
    e.seed = seed;
    return e;
}

struct SlabLadder {
    std::vector<DensityEstimate> rungs;
    std::vector<double> eps;
    DensityEstimate extrapolated;
};

// Least-squares line in eps through the rungs; the intercept cancels the O(eps) bias
inline SlabLadder sigma_inf_slab_ladder(const WeightSpec& w, uint64_t n, uint64_t seed = kDefaultSeed,
                                        std::vector<double> eps = {1e-2, 1e-3 * std::sqrt(10.0), 1e-3},
                                        unsigned workers = default_workers()) {
    if (eps.size() < 2) throw GuardError("sigma_inf_slab_ladder: need at least two eps values");
    SlabLadder L;
    L.eps = eps;
    for (size_t k = 0; k < eps.size(); ++k)
        L.rungs.push_back(sigma_inf_slab(w, eps[k], n, detail::splitmix64(seed + k), workers));
    double m = double(eps.size()), sx = 0, sxx = 0;
    for (double e : eps) sx += e, sxx += e * e;
    double den = m * sxx - sx * sx;
    // intercept = sum_k c_k y_k with c_k = (sxx - sx eps_k) / den
    double val = 0, var = 0;
    for (size_t k = 0; k < eps.size(); ++k) {
        double c = (sxx - sx * eps[k]) / den;
        val += c * L.rungs[k].value;
        var += c * c * L.rungs[k].stderr_ * L.rungs[k].stderr_;
    }
    L.extrapolated.value = val;
    L.extrapolated.stderr_ = std::sqrt(var);
    L.extrapolated.method = Method::SlabMonteCarlo;
    L.extrapolated.nodes = n * eps.size();
    L.extrapolated.seed = seed;
    return L;
}

struct LatticeQuad {
    int nx = 64;
    int ns = 256;
};

// Slice integral over x.t^2 = 0, y in R t; t may be non-primitive. The largest
// |t_i| is routed to the third position.
inline double raw_sigma(const std::array<double, 3>& t, const WeightSpec& w, const LatticeQuad& q = {}) {
    validate(w);
    if (t[0] == 0 && t[1] == 0 && t[2] == 0) throw GuardError("sigma_lattice: t = 0");
    if (t[0] == 0 || t[1] == 0 || t[2] == 0) return 0;
    std::array<double, 3> u = t;
    size_t k = 0;
    for (size_t i = 1; i < 3; ++i)
        if (std::fabs(u[i]) > std::fabs(u[k])) k = i;
    std::swap(u[k], u[2]);
    double J = detail::j_integral(w, u, q.ns);
    if (J == 0) return 0;
    detail::KGrid K(w, q.nx);
    double t3 = u[2] * u[2];
    return K(u[0] * u[0] / t3, u[1] * u[1] / t3) * J / t3;
}

inline DensityEstimate sigma_lattice(const Triple& t, const WeightSpec& w, const QuadOptions& opt = {}) {
    if (t[0] == 0 && t[1] == 0 && t[2] == 0) throw GuardError("sigma_lattice: t = 0");
    std::array<double, 3> td{double(t[0]), double(t[1]), double(t[2])};
    LatticeQuad q{16, 64};
    double cur = raw_sigma(td, w, q);
    uint64_t used = uint64_t(q.nx) * q.nx + uint64_t(q.ns);
    for (int it = 0; it < 8; ++it) {
        LatticeQuad r{2 * q.nx, 2 * q.ns};
        double nxt = raw_sigma(td, w, r);
        used += uint64_t(r.nx) * r.nx + uint64_t(r.ns);
        if (detail::converged(nxt, cur, opt)) {
            DensityEstimate e;
            e.value = nxt;
            e.error_estimate = std::fabs(nxt - cur);
            e.method = Method::LeraySlice;
            e.nodes = used;
            return e;
        }
        q = r;
        cur = nxt;
    }
    throw NonConvergence("sigma_lattice", used, cur);
}

// H^-3 * sum of W((x, y) / H) over (x, y) in the rank-3 lattice x.t^2 = 0, y in Z t
inline DensityEstimate lattice_limit_sum(const Triple& t, const WeightSpec& w, int64_t H) {
    validate(w);
    if (H < 1) throw GuardError("lattice_limit_sum: H must be positive");
    if (t[0] == 0 && t[1] == 0 && t[2] == 0) throw GuardError("lattice_limit_sum: t = 0");
    DensityEstimate e;
    e.method = Method::LatticeLimit;
    if (t[0] == 0 || t[1] == 0 || t[2] == 0) return e;
    Triple u = t;
    size_t k = 0;
    for (size_t i = 1; i < 3; ++i)
        if (std::llabs(u[i]) > std::llabs(u[k])) k = i;
    std::swap(u[k], u[2]);
    __int128 a = __int128(u[0]) * u[0], b = __int128(u[1]) * u[1], c = __int128(u[2]) * u[2];
    double Hd = double(H);
    int64_t R = int64_t(std::ceil(w.scale * Hd));
    long double xs = 0;
    uint64_t pts = 0;
    for (int64_t x1 = -R; x1 <= R; ++x1) {
        double u1 = u_profile(w, x1 / Hd);
        if (u1 == 0) continue;
        for (int64_t x2 = -R; x2 <= R; ++x2) {
            __int128 num = -(a * x1 + b * x2);
            if (num % c != 0) continue;
            int64_t x3 = int64_t(num / c);
            double p = u1 * u_profile(w, x2 / Hd) * u_profile(w, x3 / Hd);
            if (p != 0) xs += p, ++pts;
        }
    }
    long double ys = 0;
    int64_t tmin = std::min({std::llabs(u[0]), std::llabs(u[1]), std::llabs(u[2])});
    int64_t K = int64_t(std::ceil(w.scale * Hd / double(tmin)));
    for (int64_t m = -K; m <= K; ++m) {
        double p = 1;
        for (int i = 0; i < 3; ++i) p *= v_profile(w, double(m * u[size_t(i)]) / Hd);
        if (p != 0) ys += p, ++pts;
    }
    e.value = double(xs * ys / (Hd * Hd * Hd));
    e.nodes = pts;
    return e;
}

struct ThetaQuad {
    int n_ang = 32;
    int n_r = 16;
    LatticeQuad inner{32, 128};
};

// Integral of the lattice density over the shell U < |u| <= 2U, in spherical
// coordinates over the positive octant (the density is even in each u_i).
inline double theta_fixed(double U, const WeightSpec& w, const ThetaQuad& q, unsigned workers) {
    const double hp = std::numbers::pi / 2;
    double ha = hp / q.n_ang, hr = U / q.n_r;
    std::vector<double> rows(size_t(q.n_ang), 0.0);
    detail::KGrid K(w, q.inner.nx);
    parallel_for(size_t(q.n_ang), workers, [&](size_t i) {
        double th = (double(i) + 0.5) * ha, st = std::sin(th), ct = std::cos(th);
        for (int j = 0; j < q.n_ang; ++j) {
            double ph = (j + 0.5) * ha;
            std::array<double, 3> om{st * std::cos(ph), st * std::sin(ph), ct};
            size_t k = 0;
            for (size_t a = 1; a < 3; ++a)
                if (om[a] > om[k]) k = a;
            std::swap(om[k], om[2]);
            // the x-factor depends on the direction only; the s-factor is evaluated at every radius
            double kx = -1, acc = 0;
            for (int l = 0; l < q.n_r; ++l) {
                double r = U + (l + 0.5) * hr;
                std::array<double, 3> u{r * om[0], r * om[1], r * om[2]};
                double J = detail::j_integral(w, u, q.inner.ns);
                if (J == 0) continue;
                if (kx < 0) kx = K(om[0] * om[0] / (om[2] * om[2]), om[1] * om[1] / (om[2] * om[2]));
                acc += kx * J / (u[2] * u[2]) * r * r;
            }
            rows[i] += acc * st;
        }
    });
    double tot = 0;
    for (double x : rows) tot += x;
    return 8 * tot * ha * ha * hr;
}

inline DensityEstimate theta(double U, const WeightSpec& w, const QuadOptions& opt = {},
                             unsigned workers = default_workers()) {
    validate(w);
    if (!(U > 0)) throw GuardError("theta: U must be positive");
    ThetaQuad q;
    double cur = theta_fixed(U, w, q, workers);
    uint64_t used = uint64_t(q.n_ang) * q.n_ang * q.n_r;
    for (int it = 0; it < 5; ++it) {
        ThetaQuad r{2 * q.n_ang, 2 * q.n_r, {2 * q.inner.nx, 2 * q.inner.ns}};
        double nxt = theta_fixed(U, w, r, workers);
        used += uint64_t(r.n_ang) * r.n_ang * r.n_r;
        if (detail::converged(nxt, cur, opt)) {
            DensityEstimate e;
            e.value = nxt;
            e.error_estimate = std::fabs(nxt - cur);
            e.method = Method::LeraySlice;
            e.nodes = used;
            return e;
        }
        q = r;
        cur = nxt;
    }
    throw NonConvergence("theta", used, cur);
}

inline DensityEstimate theta1(const WeightSpec& w, const QuadOptions& opt = {},
                              unsigned workers = default_workers()) {
    return theta(1.0, w, opt, workers);
}

// Direct sum to N - 1 plus the Euler-Maclaurin tail from N
inline long double zeta3() {
    constexpr int N = 100;
    long double s = 0;
    for (int n = N - 1; n >= 1; --n) s += 1.0L / ((long double)n * n * n);
    long double x = N;
    s += 1 / (2 * x * x) + 1 / (2 * x * x * x) + 1 / (4 * x * x * x * x) - 1 / (12 * x * x * x * x * x * x);
    return s;
}

struct PredictedConstants {
    double sigma_inf = 0;
    double zeta3 = 0;
    double leading = 0;
    double peyre = 0;
    Rational alpha{1, 9};
    Rational beta{1};
    Rational tau_inf_ratio{3, 2};
    double tau_fin = 0;
    Rational peyre_coefficient{0};  // peyre / (sigma_inf * tau_fin)
};

inline PredictedConstants predicted_constants(double sigma_inf) {
    PredictedConstants c;
    c.sigma_inf = sigma_inf;
    long double z = zeta3();
    c.zeta3 = double(z);
    c.tau_fin = double(1 / (z * z));
    c.peyre_coefficient = c.alpha * c.beta * c.tau_inf_ratio;
    if (c.peyre_coefficient != Rational(1, 6))
        throw InvariantError("predicted_constants: alpha * beta * tau_inf_ratio != 1/6");
    c.leading = double(sigma_inf / z);
    c.peyre = double(sigma_inf / (6 * z * z));
    return c;
}

}  // namespace delta_lab::densities
