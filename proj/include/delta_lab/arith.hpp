#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "types.hpp"

namespace delta_lab::arith {

inline int64_t mod(int64_t a, int64_t q) {
    int64_t r = a % q;
    return r < 0 ? r + q : r;
}

inline int64_t mod(i128 a, int64_t q) {
    i128 r = a % q;
    return int64_t(r < 0 ? r + q : r);
}

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return uint64_t((unsigned __int128)a * b % m);
}

inline uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline int64_t ipow(int64_t b, unsigned e) {
    int64_t r = 1;
    while (e--) r *= b;
    return r;
}

inline int64_t gcd(int64_t a, int64_t b) { return std::gcd(a, b); }

// inverse of a mod q, or 0 when gcd(a,q) > 1 (q > 1)
inline int64_t inv_mod(int64_t a, int64_t q) {
    int64_t r0 = q, r1 = mod(a, q), s0 = 0, s1 = 1;
    while (r1) {
        int64_t t = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - t * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - t * s1};
    }
    if (r0 != 1) return 0;
    return mod(s0, q);
}

inline uint64_t isqrt(uint64_t n) {
    uint64_t r = uint64_t(std::sqrt(double(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square(int64_t n) {
    if (n < 0) return false;
    uint64_t r = isqrt(uint64_t(n));
    return r * r == uint64_t(n);
}

inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while (!(d & 1)) d >>= 1, ++s;
    for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int i = 1; i < s && comp; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) comp = false;
        }
        if (comp) return false;
    }
    return true;
}

inline std::vector<int64_t> primes_up_to(int64_t n) {
    std::vector<char> sieve(size_t(std::max<int64_t>(n + 1, 2)), 1);
    std::vector<int64_t> ps;
    for (int64_t i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        ps.push_back(i);
        for (int64_t j = i * i; j <= n; j += i) sieve[j] = 0;
    }
    return ps;
}

namespace detail {

inline uint64_t rho(uint64_t n) {
    if (n % 2 == 0) return 2;
    for (uint64_t c = 1;; ++c) {
        uint64_t x = 2, y = 2, d = 1;
        auto f = [&](uint64_t v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

inline void factor_rec(uint64_t n, std::vector<uint64_t>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    uint64_t d = rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

// q as ordered (p, r) pairs
struct FactoredModulus {
    std::vector<std::pair<int64_t, int>> factors;

    int64_t value() const {
        int64_t v = 1;
        for (auto [p, r] : factors) v *= ipow(p, unsigned(r));
        return v;
    }
    BigInt big_value() const {
        BigInt v = 1;
        for (auto [p, r] : factors) v *= boost::multiprecision::pow(BigInt(p), unsigned(r));
        return v;
    }
};

inline FactoredModulus factor(uint64_t n) {
    if (n == 0) throw std::invalid_argument("factor: n = 0");
    std::vector<uint64_t> ps;
    for (uint64_t p = 2; p < 200 && p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) ps.push_back(p), n /= p;
    }
    if (n > 1) detail::factor_rec(n, ps);
    std::sort(ps.begin(), ps.end());
    FactoredModulus f;
    for (uint64_t p : ps) {
        if (!f.factors.empty() && f.factors.back().first == int64_t(p))
            ++f.factors.back().second;
        else
            f.factors.push_back({int64_t(p), 1});
    }
    return f;
}

inline int v_p(int64_t n, int64_t p) {
    if (n == 0) throw std::invalid_argument("v_p: n = 0");
    int v = 0;
    while (n % p == 0) n /= p, ++v;
    return v;
}

inline int v_p(i128 n, int64_t p) {
    if (n == 0) throw std::invalid_argument("v_p: n = 0");
    int v = 0;
    while (n % p == 0) n /= p, ++v;
    return v;
}

inline int64_t kappa(int64_t q) {
    int64_t k = 1;
    for (auto [p, r] : factor(uint64_t(q)).factors) k *= p;
    return k;
}

// largest square dividing gcd(a,b); {q,0} is the largest square divisor of q
inline int64_t square_gcd(int64_t a, int64_t b) {
    if (a == 0 && b == 0) throw std::invalid_argument("square_gcd: (0,0)");
    int64_t g = std::gcd(a, b);
    int64_t s = 1;
    for (auto [p, j] : factor(uint64_t(g)).factors) s *= ipow(p, unsigned(2 * (j / 2)));
    return s;
}

// square root of {a,b}
inline int64_t square_gcd_root(int64_t a, int64_t b) {
    return int64_t(isqrt(uint64_t(square_gcd(a, b))));
}

inline int jacobi(int64_t a, int64_t b) {
    if (b <= 0 || b % 2 == 0) throw std::invalid_argument("jacobi: b must be odd positive");
    a = mod(a, b);
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            int64_t r = b % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, b);
        if (a % 4 == 3 && b % 4 == 3) t = -t;
        a %= b;
    }
    return b == 1 ? t : 0;
}

inline int64_t eta_prime_power(int64_t p, int r, int64_t m) {
    int64_t q = ipow(p, unsigned(r));
    m = mod(m, q);
    if (m == 0) return ipow(p, unsigned(r / 2));
    int v = v_p(m, p);
    if (v % 2) return 0;
    int64_t u = m / ipow(p, unsigned(v));
    int k = r - v;
    int64_t c;
    if (p == 2) {
        if (k == 1) c = 1;
        else if (k == 2) c = (u % 4 == 1) ? 2 : 0;
        else c = (u % 8 == 1) ? 4 : 0;
    } else {
        c = 1 + jacobi(u, p);
    }
    return ipow(p, unsigned(v / 2)) * c;
}

// #{y mod q : y^2 = m mod q}
inline int64_t eta(int64_t q, int64_t m) {
    if (q < 1) throw std::invalid_argument("eta: q < 1");
    int64_t c = 1;
    for (auto [p, r] : factor(uint64_t(q)).factors) c *= eta_prime_power(p, r, m);
    return c;
}

inline std::vector<uint64_t> divisors(const FactoredModulus& f) {
    std::vector<uint64_t> ds{1};
    for (auto [p, r] : f.factors) {
        size_t n = ds.size();
        uint64_t pk = 1;
        for (int k = 1; k <= r; ++k) {
            pk *= uint64_t(p);
            for (size_t i = 0; i < n; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

inline std::vector<uint64_t> divisors(uint64_t n) { return divisors(factor(n)); }

// largest number of sorted divisors in a window [d, e*d)
inline int64_t hooley_delta_sorted(const std::vector<uint64_t>& ds) {
    const long double e = std::exp(1.0L);
    int64_t best = 0;
    size_t j = 0;
    for (size_t i = 0; i < ds.size(); ++i) {
        if (j < i) j = i;
        while (j < ds.size() && (long double)ds[j] < e * (long double)ds[i]) ++j;
        best = std::max<int64_t>(best, int64_t(j - i));
    }
    return best;
}

inline int64_t hooley_delta(int64_t n) {
    if (n == 0) return 0;
    return hooley_delta_sorted(divisors(uint64_t(n < 0 ? -n : n)));
}

inline int64_t tau(int64_t q) {
    int64_t t = 1;
    for (auto [p, r] : factor(uint64_t(q)).factors) t *= r + 1;
    return t;
}

inline int omega(int64_t q) { return int(factor(uint64_t(q)).factors.size()); }

inline int mu(int64_t q) {
    auto f = factor(uint64_t(q));
    for (auto [p, r] : f.factors)
        if (r > 1) return 0;
    return f.factors.size() % 2 ? -1 : 1;
}

inline int64_t phi(int64_t q) {
    int64_t v = q;
    for (auto [p, r] : factor(uint64_t(q)).factors) v = v / p * (p - 1);
    return v;
}

inline bool is_square_free(int64_t q) { return mu(q) != 0; }

inline bool is_square_full(int64_t q) {
    for (auto [p, r] : factor(uint64_t(q)).factors)
        if (r < 2) return false;
    return true;
}

}  // namespace delta_lab::arith
