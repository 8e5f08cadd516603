#pragma once

#include <cstdint>

namespace mslat {

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);

/// Prime closest to n; on a tie the larger prime wins.
std::uint64_t nearest_prime(std::uint64_t n);

/// Smallest primitive root modulo a prime p (1 for p = 2).
std::uint64_t primitive_root(std::uint64_t p);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

}  // namespace mslat
