#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cmfiber::arith {

// All integer routines in this header are exact. Intermediate products are
// checked; an overflow raises errc::resource_limit instead of wrapping.

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t ipow(std::int64_t base, unsigned exp);

// floor(sqrt(n)) for n >= 0
std::int64_t isqrt(std::int64_t n);

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t mod);

// Non-negative remainder.
inline std::int64_t mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Kronecker symbol (a|n) for n >= 1, with (a|2) = 0 for even a, +1 for
// a = +-1 mod 8 and -1 for a = +-3 mod 8.
int kronecker(std::int64_t a, std::int64_t n);

// Largest k with p^k | n. n != 0, p >= 2.
unsigned valuation(std::int64_t n, std::int64_t p);

// Deterministic for n < 3.3e24 (bases 2..41).
bool is_prime(std::int64_t n);

struct Factorization {
    std::int64_t value = 1;
    std::vector<std::pair<std::int64_t, unsigned>> factors;

    std::int64_t reassemble() const;
    std::vector<std::int64_t> primes() const;
};

// Largest input accepted by factorize().
inline constexpr std::int64_t factorize_limit = 330'000'000'000'000;

// Trial division to 10^6, then Miller-Rabin and Pollard rho on the
// cofactor. Inputs above factorize_limit raise errc::resource_limit.
Factorization factorize(std::int64_t n);

bool is_squarefree(std::int64_t n);

// n with every prime of `primes` divided out to full multiplicity.
std::int64_t prime_to_part(std::int64_t n, std::span<std::int64_t const> primes);

bool is_fundamental_discriminant(std::int64_t d);

} // namespace cmfiber::arith
