#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <string>
#include <string_view>

namespace hrf {

using cd = std::complex<double>;

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Standard normal pdf.
inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Standard normal cdf, stable in both tails (erfc-based).
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

// Upper-tail probability 1 - cdf(x), stable for large positive x.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x * 0.70710678118654752440084436210485);
}

// FNV-1a 64-bit hash, used for config fingerprints and stateless symbol draws.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// SplitMix64: deterministic stateless integer mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace hrf
