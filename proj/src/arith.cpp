#include "cmfiber/arith.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "cmfiber/error.hpp"

namespace cmfiber::arith {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1)
            r = mulmod_u64(r, b, m);
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    return r;
}

bool miller_rabin(std::uint64_t n, std::uint64_t a)
{
    if (a % n == 0)
        return true;
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1)
        return true;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1)
            return true;
    }
    return false;
}

// Floyd cycle finding; n is composite with no factor below 10^6.
std::uint64_t pollard_rho(std::uint64_t n)
{
    for (std::uint64_t c = 1;; ++c) {
        auto f = [&](std::uint64_t x) { return (mulmod_u64(x, x, n) + c) % n; };
        std::uint64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n)
            return d;
    }
}

void push_factor(Factorization & f, std::int64_t p)
{
    for (auto & [q, e] : f.factors) {
        if (q == p) {
            ++e;
            return;
        }
    }
    f.factors.emplace_back(p, 1);
}

void split_large(Factorization & f, std::uint64_t m)
{
    if (m == 1)
        return;
    if (is_prime(static_cast<std::int64_t>(m))) {
        push_factor(f, static_cast<std::int64_t>(m));
        return;
    }
    std::uint64_t d = pollard_rho(m);
    split_large(f, d);
    split_large(f, m / d);
}

} // namespace

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw_resource("64-bit overflow in addition");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw_resource("64-bit overflow in multiplication");
    return r;
}

std::int64_t ipow(std::int64_t base, unsigned exp)
{
    std::int64_t r = 1;
    while (exp--)
        r = checked_mul(r, base);
    return r;
}

std::int64_t isqrt(std::int64_t n)
{
    if (n < 0)
        throw_invalid("isqrt of a negative number");
    if (n < 2)
        return n;
    std::int64_t x = static_cast<std::int64_t>(__builtin_sqrtl(static_cast<long double>(n)));
    // correct the float estimate to the exact floor
    while (x > 0 && static_cast<__int128>(x) * x > n)
        --x;
    while (static_cast<__int128>(x + 1) * (x + 1) <= n)
        ++x;
    return x;
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t m)
{
    if (m <= 0 || exp < 0)
        throw_invalid("mod_pow needs m > 0 and exp >= 0");
    return static_cast<std::int64_t>(
        powmod_u64(static_cast<std::uint64_t>(mod(base, m)), static_cast<std::uint64_t>(exp),
                   static_cast<std::uint64_t>(m)));
}

int kronecker(std::int64_t a, std::int64_t n)
{
    if (n < 1)
        throw_invalid("kronecker symbol needs n >= 1");
    if (n == 1)
        return 1;
    int result = 1;
    while (n % 2 == 0) {
        std::int64_t r = mod(a, 8);
        if (r % 2 == 0)
            return 0;
        if (r == 3 || r == 5)
            result = -result;
        n /= 2;
    }
    // n odd now: Jacobi symbol (a|n)
    a = mod(a, n);
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t r = n % 8;
            if (r == 3 || r == 5)
                result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

unsigned valuation(std::int64_t n, std::int64_t p)
{
    if (n == 0)
        throw_invalid("valuation of zero");
    if (p < 2)
        throw_invalid("valuation needs p >= 2");
    unsigned k = 0;
    while (n % p == 0) {
        n /= p;
        ++k;
    }
    return k;
}

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
        if (n % p == 0)
            return n == p;
    }
    auto un = static_cast<std::uint64_t>(n);
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
        if (!miller_rabin(un, a))
            return false;
    }
    return true;
}

std::int64_t Factorization::reassemble() const
{
    std::int64_t r = 1;
    for (auto const & [p, e] : factors)
        r = checked_mul(r, ipow(p, e));
    return r;
}

std::vector<std::int64_t> Factorization::primes() const
{
    std::vector<std::int64_t> r;
    r.reserve(factors.size());
    for (auto const & f : factors)
        r.push_back(f.first);
    return r;
}

Factorization factorize(std::int64_t n)
{
    if (n < 1)
        throw_invalid("factorize needs n >= 1");
    if (n > factorize_limit)
        throw_resource("factorize: input " + std::to_string(n) + " too large");
    Factorization f;
    f.value = n;
    std::int64_t m = n;
    for (std::int64_t p = 2; p <= 1'000'000 && p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p)
            continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.factors.emplace_back(p, e);
    }
    if (m > 1) {
        std::size_t before = f.factors.size();
        split_large(f, static_cast<std::uint64_t>(m));
        std::sort(f.factors.begin() + static_cast<std::ptrdiff_t>(before), f.factors.end());
    }
    if (f.reassemble() != n)
        throw_internal("factorization does not reassemble");
    return f;
}

bool is_squarefree(std::int64_t n)
{
    for (auto const & [p, e] : factorize(std::llabs(n)).factors) {
        if (e > 1)
            return false;
    }
    return true;
}

std::int64_t prime_to_part(std::int64_t n, std::span<std::int64_t const> primes)
{
    for (std::int64_t p : primes) {
        while (n != 0 && n % p == 0)
            n /= p;
    }
    return n;
}

bool is_fundamental_discriminant(std::int64_t d)
{
    if (d == 0 || d == 1)
        return false;
    std::int64_t r = mod(d, 4);
    if (r == 1)
        return is_squarefree(d);
    if (r != 0)
        return false;
    std::int64_t m = d / 4;
    std::int64_t rm = mod(m, 4);
    return (rm == 2 || rm == 3) && is_squarefree(m);
}

} // namespace cmfiber::arith
