#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace delta_lab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using i128 = __int128;

using Triple = std::array<int64_t, 3>;

// frequency vector (m, n)
struct Freq {
    Triple m{0, 0, 0};
    Triple n{0, 0, 0};

    bool is_zero() const {
        for (int i = 0; i < 3; ++i)
            if (m[i] != 0 || n[i] != 0) return false;
        return true;
    }
    friend bool operator==(const Freq&, const Freq&) = default;
    friend auto operator<=>(const Freq&, const Freq&) = default;
};

// thrown when an input exceeds a cost guard
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// thrown when an internal identity fails (indicates a bug, never bad input)
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    std::string s;
    while (u) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

inline BigInt to_big(i128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    BigInt r = BigInt(uint64_t(u >> 64));
    r <<= 64;
    r += BigInt(uint64_t(u));
    return neg ? BigInt(-r) : r;
}

inline std::string to_string(const Triple& t) {
    return std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]);
}

inline std::string to_string(const Freq& f) {
    return "m=(" + to_string(f.m) + ") n=(" + to_string(f.n) + ")";
}

}  // namespace delta_lab
