#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ribet {

using Factorization = std::vector<std::pair<std::uint64_t, unsigned>>;

bool is_prime(std::uint64_t n);

/// Prime factorization by trial division, primes ascending.
Factorization factorize(std::uint64_t n);

std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

/// x mod m in [0, m), also for negative x.
std::uint64_t mod_floor(std::int64_t x, std::uint64_t m);

/// Inverse of x modulo m; requires gcd(x, m) = 1.
std::uint64_t mod_inverse(std::uint64_t x, std::uint64_t m);

std::uint64_t ipow(std::uint64_t base, unsigned exp);

std::uint64_t euler_phi(std::uint64_t n);

}  // namespace ribet
