#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arith.hpp"
#include "types.hpp"

namespace delta_lab {

// Element of Z[zeta_q] stored as integer coefficients on zeta_q^k, k mod q.
// The representation is redundant; canonical() picks the unique form whose
// support avoids, for each p^r || q, indices with top base-p digit p-1 in the
// p-component. A value is a rational integer iff its canonical form is
// supported on k = 0.
class CycloInt {
public:
    explicit CycloInt(int64_t q) : q_(q), c_(size_t(q), 0) {
        if (q < 1) throw std::invalid_argument("CycloInt: q < 1");
    }

    int64_t modulus() const { return q_; }
    const std::vector<int64_t>& coeffs() const { return c_; }

    void add(int64_t k, int64_t w) { c_[size_t(arith::mod(k, q_))] += w; }
    void add_scaled(const CycloInt& o, int64_t w) {
        for (int64_t k = 0; k < q_; ++k) c_[k] += w * o.c_[k];
    }
    void add_shifted(const CycloInt& o, int64_t shift, int64_t w = 1) {
        int64_t s = arith::mod(shift, q_);
        for (int64_t k = 0; k < q_; ++k) {
            if (o.c_[k] == 0) continue;
            int64_t j = k + s;
            if (j >= q_) j -= q_;
            c_[j] += w * o.c_[k];
        }
    }

    CycloInt operator*(const CycloInt& o) const {
        CycloInt r(q_);
        std::vector<int64_t> nz;
        for (int64_t j = 0; j < q_; ++j)
            if (o.c_[j]) nz.push_back(j);
        for (int64_t k = 0; k < q_; ++k) {
            if (!c_[k]) continue;
            for (int64_t j : nz) {
                int64_t s = k + j;
                if (s >= q_) s -= q_;
                r.c_[s] += c_[k] * o.c_[j];
            }
        }
        return r;
    }

    CycloInt canonical() const {
        CycloInt r = *this;
        r.reduce_in_place();
        return r;
    }

    std::optional<int64_t> as_integer() const {
        CycloInt r = canonical();
        for (int64_t k = 1; k < q_; ++k)
            if (r.c_[k]) return std::nullopt;
        return r.c_[0];
    }

    // Galois invariance forces an integer; anything else is a bug
    int64_t to_integer() const {
        auto v = as_integer();
        if (!v) throw InvariantError("CycloInt: accumulated sum is not a rational integer");
        return *v;
    }

    void reduce_in_place() {
        for (auto [p, r] : arith::factor(uint64_t(q_)).factors) {
            int64_t pr = arith::ipow(p, unsigned(r));
            int64_t top = pr / p;
            int64_t step = q_ / p;
            for (int64_t k = 0; k < q_; ++k) {
                if (!c_[k]) continue;
                if ((k % pr) / top != p - 1) continue;
                int64_t v = c_[k];
                c_[k] = 0;
                for (int64_t i = 1; i < p; ++i) c_[(k + i * step) % q_] -= v;
            }
        }
    }

private:
    int64_t q_;
    std::vector<int64_t> c_;
};

}  // namespace delta_lab
