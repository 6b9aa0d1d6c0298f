#pragma once
/**
 * @file numeric.hpp
 * @brief Shared scalar types and low-level helpers: exact arbitrary-precision
 *        integers/rationals, Eigen matrix aliases templated on the scalar,
 *        extended gcd / floor division, decimal string I/O, and a
 *        deterministic 128-bit content hash used for dedup and caching.
 */

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Core>

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relmono {

using njson = nlohmann::ordered_json;

/// Exact arbitrary-precision integer. All group/lattice arithmetic uses this;
/// machine-word overflow is never acceptable in word-search products.
using Int = boost::multiprecision::cpp_int;

/// Exact rational, used for conjugators, intertwiners and transformed models.
using Rat = boost::multiprecision::cpp_rational;

/// Complex double for the analytic (period/logarithm) side.
using cplx = std::complex<double>;

template <class Scalar> using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <class Scalar> using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar> using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IMat2 = Mat2<Int>;
using IMatX = MatX<Int>;
using IVecX = VecX<Int>;
using QMat2 = Mat2<Rat>;
using QMatX = MatX<Rat>;
using QVecX = VecX<Rat>;

// ---------------------------------------------------------------------------
// integer helpers
// ---------------------------------------------------------------------------

/// Extended gcd: returns g = gcd(a,b) >= 0 and sets s,t with s*a + t*b = g.
inline Int gcdx(Int a, Int b, Int& s, Int& t) {
    Int s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        Int q = a / b;
        Int r = a - q * b;
        a = b; b = r;
        Int s2 = s0 - q * s1; s0 = s1; s1 = s2;
        Int t2 = t0 - q * t1; t0 = t1; t1 = t2;
    }
    if (a < 0) { a = -a; s0 = -s0; t0 = -t0; }
    s = s0; t = t0;
    return a;
}

/// Floor division (quotient rounded toward -inf); requires b != 0.
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;                    // truncates toward zero
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int numerator_of(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int denominator_of(const Rat& x) { return boost::multiprecision::denominator(x); }

inline double to_double(const Int& x) { return x.convert_to<double>(); }
inline double to_double(const Rat& x) { return x.convert_to<double>(); }

/// Nearest integer to a double, as an exact Int.
inline Int round_to_int(double x) {
    return Int(static_cast<long long>(std::llround(x)));
}

// ---------------------------------------------------------------------------
// decimal string I/O (used by the JSON layer: integers never hit 64-bit types)
// ---------------------------------------------------------------------------

inline std::string scalar_to_string(const Int& x) { return x.str(); }

/// Rationals serialize as "p" or "p/q" with q > 0.
inline std::string scalar_to_string(const Rat& x) {
    if (denominator_of(x) == 1) return numerator_of(x).str();
    return x.str();
}

template <class Scalar> Scalar scalar_from_string(const std::string& s);

template <> inline Int scalar_from_string<Int>(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    return Int(s);
}

template <> inline Rat scalar_from_string<Rat>(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    return Rat(s);
}

// ---------------------------------------------------------------------------
// deterministic content hashing
// ---------------------------------------------------------------------------

struct Hash128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    bool operator==(const Hash128&) const = default;
};

/// splitmix64 finalizer; good avalanche for hash streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic 128-bit hash of a byte string (two independent 64-bit
/// mix streams). Not cryptographic; used for dedup sets and cache keys.
inline Hash128 hash128(std::string_view bytes) {
    std::uint64_t a = 0x243f6a8885a308d3ULL;
    std::uint64_t b = 0x13198a2e03707344ULL;
    std::uint64_t block = 0;
    int filled = 0;
    for (unsigned char c : bytes) {
        block = (block << 8) | c;
        if (++filled == 8) {
            a = mix64(a ^ block);
            b = mix64(b + block);
            block = 0;
            filled = 0;
        }
    }
    // final partial block, length-tagged so "x" and "x\0" differ
    block = (block << 8) | static_cast<unsigned>(filled + 1);
    a = mix64(a ^ block);
    b = mix64(b + block);
    return Hash128{a, b};
}

inline std::string hash_hex(const Hash128& h) {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    std::uint64_t parts[2] = {h.hi, h.lo};
    for (int p = 0; p < 2; ++p)
        for (int i = 0; i < 16; ++i)
            out[static_cast<std::size_t>(p * 16 + 15 - i)] = digits[(parts[p] >> (4 * i)) & 0xF];
    return out;
}

struct Hash128Hasher {
    std::size_t operator()(const Hash128& h) const noexcept {
        return static_cast<std::size_t>(h.hi ^ (h.lo * 0x9e3779b97f4a7c15ULL));
    }
};

}  // namespace relmono
