#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"

using namespace cmfiber;
using namespace cmfiber::arith;

namespace {

// Legendre symbol straight from the definition: scan the squares mod p.
int legendre_by_squares(std::int64_t a, std::int64_t p)
{
    std::int64_t r = mod(a, p);
    if (r == 0)
        return 0;
    for (std::int64_t x = 1; x < p; ++x) {
        if (x * x % p == r)
            return 1;
    }
    return -1;
}

} // namespace

TEST_CASE("kronecker symbol examples")
{
    for (std::int64_t p : {2, 3, 5, 7, 11, 13, 101})
        CHECK(kronecker(1, p) == 1);
    for (std::int64_t p : {2, 3, 5, 7, 11, 13, 101})
        CHECK(kronecker(p, p) == 0);

    std::set<std::int64_t> squares;
    for (std::int64_t x = 1; x < 11; ++x)
        squares.insert(x * x % 11);
    CHECK(squares == std::set<std::int64_t>{1, 3, 4, 5, 9});
    CHECK(kronecker(-3, 11) == -1);
}

TEST_CASE("kronecker at 2 follows the mod 8 rule")
{
    CHECK(kronecker(-7, 2) == 1);  // -7 = 1 mod 8
    CHECK(kronecker(-3, 2) == -1); // -3 = 5 mod 8
    CHECK(kronecker(-4, 2) == 0);
    CHECK(kronecker(-8, 2) == 0);
    CHECK(kronecker(-15, 2) == 1);
}

TEST_CASE("kronecker agrees with Euler's criterion and the square scan")
{
    for (std::int64_t p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
        for (std::int64_t a = -60; a <= 60; ++a) {
            int k = kronecker(a, p);
            CHECK(k == legendre_by_squares(a, p));
            std::int64_t e = mod_pow(a, (p - 1) / 2, p);
            CHECK(mod(k, p) == e);
        }
    }
}

TEST_CASE("kronecker is multiplicative in n")
{
    for (std::int64_t a : {-3, -4, -7, -8, -11, -15, 5, 12})
        for (std::int64_t m = 1; m < 30; ++m)
            for (std::int64_t n = 1; n < 30; ++n)
                CHECK(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
}

TEST_CASE("valuation")
{
    CHECK(valuation(1, 5) == 0);
    CHECK(valuation(12, 2) == 2);
    CHECK(valuation(12, 3) == 1);
    CHECK(valuation(-250, 5) == 3);
    CHECK_THROWS_AS(valuation(0, 3), error);
}

TEST_CASE("factorize examples")
{
    CHECK(factorize(1).factors.empty());
    using F = std::vector<std::pair<std::int64_t, unsigned>>;
    CHECK(factorize(36).factors == F{{2, 2}, {3, 2}});
    CHECK(factorize(9999).factors == F{{3, 2}, {11, 1}, {101, 1}});
    // two factors above the trial-division range
    CHECK(factorize(1'000'003LL * 1'000'033LL).factors == F{{1'000'003, 1}, {1'000'033, 1}});
    CHECK(factorize(1'000'003LL * 1'000'003LL).factors == F{{1'000'003, 2}});
}

TEST_CASE("factorize rejects inputs beyond the supported size")
{
    try {
        factorize(factorize_limit + 1);
        FAIL("expected an error");
    } catch (error const & e) {
        CHECK(e.code() == errc::resource_limit);
    }
    CHECK_THROWS_AS(factorize(0), error);
}

TEST_CASE("factorize reassembles and is sorted (randomized)")
{
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::int64_t> dist(1, factorize_limit);
    for (int i = 0; i < 300; ++i) {
        std::int64_t n = i < 200 ? dist(rng) % 1'000'000 + 1 : dist(rng);
        auto f = factorize(n);
        CHECK(f.reassemble() == n);
        for (std::size_t k = 0; k < f.factors.size(); ++k) {
            CHECK(is_prime(f.factors[k].first));
            CHECK(f.factors[k].second >= 1);
            if (k > 0)
                CHECK(f.factors[k - 1].first < f.factors[k].first);
        }
    }
}

TEST_CASE("is_prime against a sieve")
{
    constexpr int n = 20000;
    std::vector<bool> comp(n, false);
    for (int i = 2; i < n; ++i)
        for (int j = 2 * i; j < n; j += i)
            comp[static_cast<std::size_t>(j)] = true;
    for (int i = 0; i < n; ++i)
        CHECK(is_prime(i) == (i >= 2 && !comp[static_cast<std::size_t>(i)]));
}

TEST_CASE("fundamental discriminants")
{
    for (std::int64_t d : {-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, 5, 8, 12, 13})
        CHECK(is_fundamental_discriminant(d));
    for (std::int64_t d : {-12, -16, -27, -36, -2, -1, 0, 1, 4, 9})
        CHECK_FALSE(is_fundamental_discriminant(d));
}

TEST_CASE("prime_to_part and isqrt")
{
    std::vector<std::int64_t> s{2, 3};
    CHECK(prime_to_part(360, s) == 5);
    CHECK(prime_to_part(7, s) == 7);
    for (std::int64_t n = 0; n < 5000; ++n) {
        std::int64_t r = isqrt(n);
        CHECK(r * r <= n);
        CHECK((r + 1) * (r + 1) > n);
    }
    CHECK(isqrt(999'999'999'999'999'999LL) == 999'999'999LL);
}

TEST_CASE("checked arithmetic refuses to wrap")
{
    CHECK_THROWS_AS(checked_mul(INT64_MAX / 2, 3), error);
    CHECK_THROWS_AS(ipow(10, 19), error);
    CHECK(ipow(10, 18) == 1'000'000'000'000'000'000LL);
}
