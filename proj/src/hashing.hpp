#pragma once

#include <cstddef>
#include <cstdint>

#include <gmpxx.h>

namespace jetvar::detail {

inline std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t seed, std::uint64_t v) noexcept {
    return mix(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_bytes(const char* data, std::size_t n) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash_mpz(const mpz_t z) noexcept {
    std::uint64_t h = mix(static_cast<std::uint64_t>(mpz_sgn(z)) + 3);
    std::size_t n = mpz_size(z);
    for (std::size_t i = 0; i < n; ++i) h = combine(h, static_cast<std::uint64_t>(mpz_getlimbn(z, i)));
    return h;
}

inline std::uint64_t hash_rational(const mpq_class& q) noexcept {
    return combine(hash_mpz(q.get_num_mpz_t()), hash_mpz(q.get_den_mpz_t()));
}

}  // namespace jetvar::detail
