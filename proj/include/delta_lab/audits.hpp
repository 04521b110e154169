#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "arith.hpp"
#include "dualgeom.hpp"
#include "expsums.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace delta_lab::audits {

struct AuditParams {
    int64_t box = 2;
    int64_t qmax = 36;
    std::vector<int64_t> primes;  // empty: lemma default
    int rmax = 3;
    unsigned workers = 1;
};

struct AuditReport {
    std::string lemma;
    bool exact = true;  // exact statement (violations must be 0) or ratio tracker
    std::string statement;
    int64_t cases = 0;
    int64_t violations = 0;
    double sup_ratio = 0;
    std::string witness;
    std::string first_violation;

    bool passed() const { return violations == 0; }
};

inline void for_each_freq(int64_t box, const std::function<void(const Freq&)>& fn) {
    Freq f;
    for (f.m[0] = -box; f.m[0] <= box; ++f.m[0])
        for (f.m[1] = -box; f.m[1] <= box; ++f.m[1])
            for (f.m[2] = -box; f.m[2] <= box; ++f.m[2])
                for (f.n[0] = -box; f.n[0] <= box; ++f.n[0])
                    for (f.n[1] = -box; f.n[1] <= box; ++f.n[1])
                        for (f.n[2] = -box; f.n[2] <= box; ++f.n[2]) fn(f);
}

inline Freq reduce(const Freq& f, int64_t q) {
    Freq g;
    for (int i = 0; i < 3; ++i) g.m[i] = arith::mod(f.m[i], q), g.n[i] = arith::mod(f.n[i], q);
    return g;
}

// S_q by the reduced sum, memoized on residues; one instance per task
class Evaluator {
public:
    BigInt s(int64_t q, const Freq& f) {
        if (q == 1) return 1;
        Freq g = reduce(f, q);
        auto key = std::make_pair(q, g);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        auto& t = tables_[q];
        if (!t) t = std::make_unique<expsums::SqrtTable>(q);
        BigInt v = expsums::reduced_sum(q, g, t.get());
        if (memo_.size() > 200000) memo_.clear();
        memo_.emplace(key, v);
        return v;
    }

    // S2 at p^r from reduced-sum values
    BigInt s2_prime_power(int64_t p, int r, const Freq& f) {
        BigInt v = s(arith::ipow(p, unsigned(r)), f);
        i128 G = dualgeom::g_form(f);
        if (G != 0 && G % p != 0) {
            BigInt c = BigInt(expsums::qfrak(f.m, p)) * expsums::pow_big(p, 3), cj = 1;
            for (int j = 1; j <= r; ++j) {
                cj *= c;
                v += cj * s(arith::ipow(p, unsigned(r - j)), f);
            }
        }
        return v;
    }

    BigInt s2(int64_t q, const Freq& f) {
        BigInt v = 1;
        for (auto [p, r] : arith::factor(uint64_t(q)).factors) v *= s2_prime_power(p, r, f);
        return v;
    }

    void clear() { memo_.clear(); }

private:
    std::map<std::pair<int64_t, Freq>, BigInt> memo_;
    std::map<int64_t, std::unique_ptr<expsums::SqrtTable>> tables_;
};

struct Partial {
    int64_t cases = 0, violations = 0;
    double sup = 0;
    std::string witness, first_violation;

    void check(bool ok, const std::string& what) {
        ++cases;
        if (!ok) {
            if (!violations) first_violation = what;
            ++violations;
        }
    }
    void ratio(double r, const std::string& what) {
        ++cases;
        if (r > sup) sup = r, witness = what;
    }
    void merge(const Partial& o) {
        if (!violations && o.violations) first_violation = o.first_violation;
        cases += o.cases;
        violations += o.violations;
        if (o.sup > sup) sup = o.sup, witness = o.witness;
    }
};

inline std::string tag(int64_t q, const Freq& f) { return "q=" + std::to_string(q) + " " + to_string(f); }

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

inline bool divides_grad_all(int64_t q, const Freq& f) {
    // true iff some p | q divides grad G componentwise
    for (auto [p, r] : arith::factor(uint64_t(q)).factors)
        if (dualgeom::divides_grad(p, f)) return true;
    return false;
}

inline std::vector<int64_t> prime_powers_up_to(int64_t qmax, int rmin, const std::vector<int64_t>& primes, int rmax) {
    std::vector<int64_t> out;
    for (int64_t p : primes)
        for (int r = rmin; r <= rmax; ++r) {
            int64_t q = arith::ipow(p, unsigned(r));
            if (q <= qmax) out.push_back(q);
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Freq> convolution_grid() {
    // fixed pseudo-random grid of 50 frequencies in [-4,4]^6
    std::vector<Freq> fs;
    uint64_t s = 0x9E3779B97F4A7C15ull;
    auto next = [&] {
        s ^= s << 13, s ^= s >> 7, s ^= s << 17;
        return int64_t(s % 9) - 4;
    };
    while (fs.size() < 50) {
        Freq f;
        for (int i = 0; i < 3; ++i) f.m[i] = next();
        for (int i = 0; i < 3; ++i) f.n[i] = next();
        fs.push_back(f);
    }
    return fs;
}

template <class Task>
Partial run_grid(const std::vector<int64_t>& qs, unsigned workers, Task task) {
    std::vector<Partial> parts(qs.size());
    parallel_for(qs.size(), workers, [&](size_t i) {
        Evaluator ev;
        task(qs[i], ev, parts[i]);
    });
    Partial all;
    for (auto& p : parts) all.merge(p);
    return all;
}

inline std::vector<int64_t> range_q(int64_t lo, int64_t hi, const std::function<bool(int64_t)>& keep = nullptr) {
    std::vector<int64_t> v;
    for (int64_t q = lo; q <= hi; ++q)
        if (!keep || keep(q)) v.push_back(q);
    return v;
}

inline const std::vector<std::string>& lemma_ids() {
    static const std::vector<std::string> ids{
        "n-vanishing", "basic-bound", "squarefree-bound", "square-full", "grad",
        "beach", "s2-crude-bound", "s2-coprime-vanishing", "s2-bound", "s2-high-exponent",
        "s2-edge-bound", "m12-zero-bound", "convolution"};
    return ids;
}

inline AuditReport lemma_audit(const std::string& id, const AuditParams& P) {
    AuditReport rep;
    rep.lemma = id;
    Partial res;
    auto primes_or = [&](std::vector<int64_t> d) { return P.primes.empty() ? d : P.primes; };

    if (id == "n-vanishing") {
        rep.statement = "S_q != 0 implies {q,m_i}^(1/2) | n_i";
        res = run_grid(range_q(1, P.qmax), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            for_each_freq(P.box, [&](const Freq& f) {
                if (ev.s(q, f) == 0) return out.check(true, "");
                bool ok = true;
                for (int i = 0; i < 3; ++i) ok = ok && f.n[i] % arith::square_gcd_root(q, f.m[i]) == 0;
                out.check(ok, tag(q, f));
            });
        });
    } else if (id == "basic-bound") {
        rep.exact = false;
        rep.statement = "|S_q| / (8^omega(q) q^4 prod {q,m_i}^(1/2))";
        res = run_grid(range_q(2, P.qmax), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            double den = std::pow(8.0, arith::omega(q)) * std::pow(double(q), 4);
            for_each_freq(P.box, [&](const Freq& f) {
                double d = den;
                for (int i = 0; i < 3; ++i) d *= double(arith::square_gcd_root(q, f.m[i]));
                out.ratio(std::abs(to_double(ev.s(q, f))) / d, tag(q, f));
            });
        });
    } else if (id == "squarefree-bound") {
        rep.exact = false;
        rep.statement = "|S_q| / (4^omega(q) q^3 gcd(q,D)), q square-free";
        res = run_grid(range_q(2, P.qmax, arith::is_square_free), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            double den = std::pow(4.0, arith::omega(q)) * std::pow(double(q), 3);
            for_each_freq(P.box, [&](const Freq& f) {
                int64_t g = arith::mod(dualgeom::dual_form(f), q);
                g = std::gcd(g, q);
                if (g == 0) g = q;
                out.ratio(std::abs(to_double(ev.s(q, f))) / (den * double(g)), tag(q, f));
            });
        });
    } else if (id == "square-full") {
        rep.statement = "q square-full and S_q != 0 imply kappa(q) | D and q | kappa(q) D";
        res = run_grid(range_q(4, P.qmax, arith::is_square_full), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            int64_t k = arith::kappa(q);
            for_each_freq(P.box, [&](const Freq& f) {
                if (ev.s(q, f) == 0) return out.check(true, "");
                i128 D = dualgeom::dual_form(f);
                out.check(D % k == 0 && (i128(k) * D) % q == 0, tag(q, f));
            });
        });
    } else if (id == "grad") {
        rep.statement = "p | D, p !| grad G imply p !| n1n2n3; and S_{p^r} != 0 (r >= 2) implies p !| m1m2m3";
        auto ps = primes_or({2, 3, 5, 7, 11, 13});
        std::vector<int64_t> qs;
        for (int64_t p : ps)
            for (int r = 1; r <= P.rmax; ++r)
                if (arith::ipow(p, unsigned(r)) <= P.qmax) qs.push_back(arith::ipow(p, unsigned(r)));
        res = run_grid(qs, P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            auto [p, r] = arith::factor(uint64_t(q)).factors[0];
            for_each_freq(P.box, [&](const Freq& f) {
                i128 D = dualgeom::dual_form(f);
                if (D % p != 0 || dualgeom::divides_grad(p, f)) return;
                i128 n123 = i128(f.n[0]) * f.n[1] * f.n[2];
                if (r == 1) return out.check(n123 % p != 0, tag(q, f));
                if (ev.s(q, f) == 0) return out.check(true, "");
                i128 m123 = i128(f.m[0]) * f.m[1] * f.m[2];
                out.check(m123 % p != 0, tag(q, f));
            });
        });
    } else if (id == "beach") {
        rep.statement = "p !| grad G implies |S_{p^r}| <= p^{4r}";
        auto qs = prime_powers_up_to(P.qmax, 1, primes_or({5, 7, 11}), P.rmax);
        res = run_grid(qs, P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            int64_t p = arith::factor(uint64_t(q)).factors[0].first;
            BigInt bound = expsums::pow_big(q, 4);
            for_each_freq(P.box, [&](const Freq& f) {
                if (dualgeom::divides_grad(p, f)) return;
                out.check(abs(ev.s(q, f)) <= bound, tag(q, f));
            });
        });
    } else if (id == "s2-crude-bound") {
        rep.exact = false;
        rep.statement = "|S2_q| / (q^4 sqrt({q,m1}{q,m2}{q,m3}))";
        res = run_grid(range_q(2, P.qmax), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            for_each_freq(P.box, [&](const Freq& f) {
                double d = std::pow(double(q), 4);
                for (int i = 0; i < 3; ++i) d *= double(arith::square_gcd_root(q, f.m[i]));
                out.ratio(std::abs(to_double(ev.s2(q, f))) / d, tag(q, f));
            });
        });
    } else if (id == "s2-coprime-vanishing") {
        rep.statement = "p !| G implies S2_{p^r} = 0";
        auto qs = prime_powers_up_to(P.qmax, 1, primes_or({2, 3, 5, 7, 11, 13}), P.rmax);
        res = run_grid(qs, P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            auto [p, r] = arith::factor(uint64_t(q)).factors[0];
            for_each_freq(P.box, [&](const Freq& f) {
                i128 G = dualgeom::g_form(f);
                if (G == 0 || G % p == 0) return;
                out.check(ev.s2_prime_power(p, r, f) == 0 && expsums::s2_support(q, f).vanishes, tag(q, f));
            });
        });
    } else if (id == "s2-bound") {
        rep.statement = "p !| grad G for all p | q implies |S2_q| <= q^4";
        res = run_grid(range_q(1, P.qmax), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            BigInt bound = expsums::pow_big(q, 4);
            for_each_freq(P.box, [&](const Freq& f) {
                if (divides_grad_all(q, f)) return;
                out.check(abs(ev.s2(q, f)) <= bound, tag(q, f));
            });
        });
    } else if (id == "s2-high-exponent") {
        rep.statement = "r >= 2 + v_p(G) implies S2_{p^r} = 0";
        auto qs = prime_powers_up_to(P.qmax, 2, primes_or({2, 3, 5, 7, 11, 13}), 12);
        res = run_grid(qs, P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            auto [p, r] = arith::factor(uint64_t(q)).factors[0];
            for_each_freq(P.box, [&](const Freq& f) {
                i128 G = dualgeom::g_form(f);
                if (G == 0 || r < 2 + arith::v_p(G, p)) return;
                out.check(ev.s2_prime_power(p, r, f) == 0 && expsums::s2_support(q, f).vanishes, tag(q, f));
            });
        });
    } else if (id == "s2-edge-bound") {
        rep.statement = "r = 1 + v_p(G) implies |S2_{p^r}| <= p^{4r-1}";
        auto ps = primes_or({2, 3, 5, 7, 11});
        std::vector<int64_t> pv(ps.begin(), ps.end());
        res = run_grid(pv, P.workers, [&](int64_t p, Evaluator& ev, Partial& out) {
            for_each_freq(P.box, [&](const Freq& f) {
                i128 G = dualgeom::g_form(f);
                if (G == 0) return;
                int r = 1 + arith::v_p(G, p);
                int64_t q = 1;
                for (int k = 0; k < r; ++k) {
                    q *= p;
                    if (q > P.qmax) return;
                }
                out.check(abs(ev.s2_prime_power(p, r, f)) <= expsums::pow_big(p, unsigned(4 * r - 1)), tag(q, f));
            });
        });
    } else if (id == "m12-zero-bound") {
        rep.exact = false;
        rep.statement = "|S_q| / (q^4 gcd(q,m3) gcd(q,n3)), m1 = m2 = 0, q square-full";
        res = run_grid(range_q(4, P.qmax, arith::is_square_full), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            Freq f;
            for (f.m[2] = -P.box; f.m[2] <= P.box; ++f.m[2])
                for (f.n[0] = -P.box; f.n[0] <= P.box; ++f.n[0])
                    for (f.n[1] = -P.box; f.n[1] <= P.box; ++f.n[1])
                        for (f.n[2] = -P.box; f.n[2] <= P.box; ++f.n[2]) {
                            double d = std::pow(double(q), 4) * double(std::gcd(q, f.m[2])) * double(std::gcd(q, f.n[2]));
                            out.ratio(std::abs(to_double(ev.s(q, f))) / d, tag(q, f));
                        }
        });
    } else if (id == "convolution") {
        rep.statement = "S_q = sum_{q1 q2 = q} S1_{q1} S2_{q2}";
        auto grid = convolution_grid();
        res = run_grid(range_q(1, P.qmax), P.workers, [&](int64_t q, Evaluator& ev, Partial& out) {
            for (auto& f : grid) out.check(expsums::s1_s2_convolution(q, f) == ev.s(q, f), tag(q, f));
        });
    } else {
        throw std::invalid_argument("lemma_audit: unknown lemma id '" + id + "'");
    }
    rep.cases = res.cases;
    rep.violations = res.violations;
    rep.sup_ratio = res.sup;
    rep.witness = res.witness;
    rep.first_violation = res.first_violation;
    return rep;
}

// defaults used by the acceptance run
inline AuditParams default_params(const std::string& id, unsigned workers = 1) {
    AuditParams p;
    p.workers = workers;
    if (id == "n-vanishing") p.box = 3, p.qmax = 36;
    else if (id == "basic-bound") p.box = 2, p.qmax = 48;
    else if (id == "squarefree-bound") p.box = 2, p.qmax = 105;
    else if (id == "square-full") p.box = 2, p.qmax = 256;
    else if (id == "grad") p.box = 2, p.qmax = 343, p.rmax = 3;
    else if (id == "beach") p.box = 2, p.qmax = 1331, p.rmax = 3;
    else if (id == "s2-crude-bound") p.box = 2, p.qmax = 48;
    else if (id == "s2-coprime-vanishing") p.box = 2, p.qmax = 343, p.rmax = 3;
    else if (id == "s2-bound") p.box = 2, p.qmax = 60;
    else if (id == "s2-high-exponent") p.box = 2, p.qmax = 1024;
    else if (id == "s2-edge-bound") p.box = 2, p.qmax = 2048;
    else if (id == "m12-zero-bound") p.box = 3, p.qmax = 500;
    else if (id == "convolution") p.box = 0, p.qmax = 500;
    return p;
}

}  // namespace delta_lab::audits
