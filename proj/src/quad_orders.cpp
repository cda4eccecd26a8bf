#include "cmfiber/quad_orders.hpp"

#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"

namespace cmfiber::quad {

QuadOrder::QuadOrder(std::int64_t dK, std::int64_t c) : dK_(dK), c_(c)
{
    if (dK >= 0 || !arith::is_fundamental_discriminant(dK))
        throw_invalid("dK = " + std::to_string(dK) +
                      " is not a negative fundamental discriminant");
    if (c < 1)
        throw_invalid("conductor must be positive, got " + std::to_string(c));
}

std::int64_t QuadOrder::discriminant() const
{
    return arith::checked_mul(arith::checked_mul(c_, c_), dK_);
}

std::vector<ReducedForm> reduced_forms(std::int64_t disc)
{
    if (disc >= 0 || (arith::mod(disc, 4) != 0 && arith::mod(disc, 4) != 1))
        throw_invalid("reduced_forms: " + std::to_string(disc) +
                      " is not a negative discriminant (0 or 1 mod 4)");
    std::vector<ReducedForm> out;
    std::int64_t const amax = arith::isqrt(-disc / 3);
    std::int64_t const parity = arith::mod(disc, 2);
    for (std::int64_t a = 1; a <= amax; ++a) {
        // b runs over 0 <= b <= a with b = disc mod 2; r tracks (b^2 - disc) mod 4a
        std::int64_t const m = 4 * a;
        std::int64_t b = parity;
        std::int64_t r = arith::mod(b * b - disc, m);
        for (; b <= a; b += 2) {
            if (r == 0) {
                std::int64_t c = (b * b - disc) / m;
                if (c >= a && std::gcd(std::gcd(a, b), c) == 1) {
                    out.push_back({a, b, c});
                    if (b != 0 && b != a && c != a)
                        out.push_back({a, -b, c});
                }
            }
            // (b+2)^2 - b^2 = 4b + 4 < 2m
            r += 4 * b + 4;
            while (r >= m)
                r -= m;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t class_number(QuadOrder const & ord)
{
    // Cached: the orbit sweeps query the same handful of discriminants
    // millions of times.
    static std::mutex mu;
    static std::map<std::int64_t, std::int64_t> cache;
    std::int64_t const disc = ord.discriminant();
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(disc); it != cache.end())
            return it->second;
    }
    auto h = static_cast<std::int64_t>(reduced_forms(disc).size());
    std::lock_guard lock(mu);
    cache.emplace(disc, h);
    return h;
}

std::int64_t ring_class_degree(QuadOrder const & ord, std::int64_t cS)
{
    if (cS < 1 || ord.conductor() % cS != 0)
        throw_invalid("ring_class_degree: " + std::to_string(cS) + " does not divide " +
                      std::to_string(ord.conductor()));
    std::int64_t h = class_number(ord);
    std::int64_t hS = class_number(QuadOrder(ord.dK(), cS));
    if (h % hS != 0)
        throw_internal("class number " + std::to_string(hS) + " does not divide " +
                       std::to_string(h));
    return h / hS;
}

tree::Kind splitting_kind(std::int64_t dK, std::int64_t p)
{
    if (!arith::is_prime(p))
        throw_invalid("splitting_kind: " + std::to_string(p) + " is not prime");
    switch (arith::kronecker(dK, p)) {
    case 1:
        return tree::Kind::split;
    case -1:
        return tree::Kind::inert;
    default:
        return tree::Kind::ramified;
    }
}

std::int64_t unit_index(QuadOrder const & ord)
{
    if (ord.conductor() == 1)
        return 1;
    if (ord.dK() == -3)
        return 3;
    if (ord.dK() == -4)
        return 2;
    return 1;
}

} // namespace cmfiber::quad
