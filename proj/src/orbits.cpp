#include "cmfiber/orbits.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"
#include "cmfiber/quad_orders.hpp"

namespace cmfiber::orbits {

namespace {

std::uint64_t mul_u64(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw_resource("orbit count overflows 64 bits");
    return r;
}

bool contains(std::vector<std::int64_t> const & sorted, std::int64_t p)
{
    return std::binary_search(sorted.begin(), sorted.end(), p);
}

std::vector<std::int64_t> normalize_primes(std::vector<std::int64_t> ps, char const * what)
{
    for (auto p : ps)
        if (!arith::is_prime(p))
            throw_invalid(std::string(what) + ": " + std::to_string(p) + " is not prime");
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

// Primes dividing any of the given positive integers.
std::set<std::int64_t> support(std::initializer_list<std::int64_t> ns)
{
    std::set<std::int64_t> out;
    for (auto n : ns)
        for (auto p : arith::factorize(n).primes())
            out.insert(p);
    return out;
}

void require_positive(FineConductor const & fc)
{
    if (fc.c_prime < 1 || fc.c_double < 1)
        throw_invalid("fine conductor entries must be positive");
}

void require_prime_to(FineConductor const & fc, std::vector<std::int64_t> const & ps,
                      char const * what)
{
    for (auto p : ps)
        if (fc.c_prime % p == 0 || fc.c_double % p == 0)
            throw_invalid("fine conductor (" + std::to_string(fc.c_prime) + ", " +
                          std::to_string(fc.c_double) + ") is not prime to " + what +
                          " prime " + std::to_string(p));
}

// The closed-form local count at p with explicit exponents.
std::uint64_t local_count(std::int64_t dK, std::int64_t p, unsigned n1, unsigned n2,
                          unsigned delta)
{
    return tree::closed_form_N(static_cast<std::uint64_t>(p), quad::splitting_kind(dK, p),
                               n1, n2, delta);
}

// Shared body of the two orbit counts: `ram` plays the role of Ram_f.
std::uint64_t orbit_count(std::int64_t dK, std::vector<std::int64_t> const & ram,
                          std::int64_t level, FineConductor const & fc)
{
    std::uint64_t total = 1;
    for (auto p : ram)
        if (quad::splitting_kind(dK, p) == tree::Kind::inert)
            total = mul_u64(total, 2);
    for (auto p : support({fc.c_prime, fc.c_double, level})) {
        if (contains(ram, p))
            continue;
        total = mul_u64(total, local_count(dK, p, arith::valuation(fc.c_prime, p),
                                           arith::valuation(fc.c_double, p),
                                           arith::valuation(level, p)));
        if (total == 0)
            return 0;
    }
    return total;
}

std::vector<std::int64_t> merged(std::vector<std::int64_t> const & a,
                                 std::vector<std::int64_t> const & b)
{
    std::vector<std::int64_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

std::vector<std::int64_t> GlobalContext::inert_S() const
{
    std::vector<std::int64_t> out;
    for (auto p : S)
        if (quad::splitting_kind(dK, p) == tree::Kind::inert)
            out.push_back(p);
    return out;
}

GlobalContext make_context(std::int64_t dK, std::vector<std::int64_t> ramB,
                           std::int64_t level, std::vector<std::int64_t> S)
{
    if (dK >= 0 || !arith::is_fundamental_discriminant(dK))
        throw_invalid("dK = " + std::to_string(dK) +
                      " is not a negative fundamental discriminant");
    if (level < 1)
        throw_invalid("level must be positive, got " + std::to_string(level));
    return {dK, normalize_primes(std::move(ramB), "ramB"), level,
            normalize_primes(std::move(S), "S")};
}

std::int64_t FineConductor::coarse() const
{
    return std::lcm(c_prime, c_double);
}

std::vector<Violation> validate_context(GlobalContext const & ctx)
{
    std::vector<Violation> out;
    for (auto p : ctx.S)
        if (contains(ctx.ramB, p))
            out.push_back({"H.1", std::to_string(p) + " lies in both ramB and S"});
    std::size_t places = ctx.S.size() + ctx.ramB.size() + 1;
    if (places % 2 != 0)
        out.push_back({"H.2", "|S| + |ramB| + 1 = " + std::to_string(places) + " is odd"});
    for (auto p : ctx.S)
        if (quad::splitting_kind(ctx.dK, p) == tree::Kind::split)
            out.push_back({"H.3", std::to_string(p) + " in S splits in K"});
    for (auto p : ctx.ramB)
        if (quad::splitting_kind(ctx.dK, p) == tree::Kind::split)
            out.push_back({"K-embeds-in-B", std::to_string(p) + " in ramB splits in K"});
    for (auto p : ctx.ramB)
        if (ctx.level % p == 0)
            out.push_back({"level-coprime-to-ramB",
                           std::to_string(p) + " in ramB divides the level"});
    return out;
}

void require_valid(GlobalContext const & ctx)
{
    auto v = validate_context(ctx);
    if (!v.empty())
        throw error(errc::hypothesis, v.front().hypothesis + " violated: " + v.front().detail);
}

bool admissible(FineConductor const & fc, GlobalContext const & ctx)
{
    require_positive(fc);
    for (auto p : ctx.inert_S()) {
        std::int64_t diff = static_cast<std::int64_t>(arith::valuation(fc.c_prime, p)) -
                            static_cast<std::int64_t>(arith::valuation(fc.c_double, p));
        if (arith::mod(diff - arith::valuation(ctx.level, p), 2) != 0)
            return false;
    }
    return true;
}

std::uint64_t local_factor(GlobalContext const & ctx, std::int64_t p, FineConductor const & fc)
{
    require_positive(fc);
    if (contains(ctx.ramB, p))
        throw_invalid("local_factor: " + std::to_string(p) + " lies in ramB");
    return local_count(ctx.dK, p, arith::valuation(fc.c_prime, p),
                       arith::valuation(fc.c_double, p), arith::valuation(ctx.level, p));
}

std::uint64_t orbit_count_B(GlobalContext const & ctx, FineConductor const & fc)
{
    require_positive(fc);
    require_prime_to(fc, ctx.ramB, "ramB");
    return orbit_count(ctx.dK, ctx.ramB, ctx.level, fc);
}

std::uint64_t orbit_count_BS(GlobalContext const & ctx, FineConductor const & fc)
{
    require_positive(fc);
    require_prime_to(fc, ctx.S, "S");
    require_prime_to(fc, ctx.ramB, "ramB");
    return orbit_count(ctx.dK, merged(ctx.ramB, ctx.S),
                       arith::prime_to_part(ctx.level, ctx.S), fc);
}

FineConductor prime_to_S(FineConductor const & fc, GlobalContext const & ctx)
{
    require_positive(fc);
    return {arith::prime_to_part(fc.c_prime, ctx.S), arith::prime_to_part(fc.c_double, ctx.S)};
}

namespace {

void require_admissible(GlobalContext const & ctx, FineConductor const & fc)
{
    require_valid(ctx);
    if (!admissible(fc, ctx))
        throw error(errc::hypothesis,
                    "fine conductor (" + std::to_string(fc.c_prime) + ", " +
                        std::to_string(fc.c_double) +
                        ") is not admissible: v(c') - v(c'') != v(level) mod 2 at some inert "
                        "prime of S");
}

} // namespace

KappaResult kappa(GlobalContext const & ctx, FineConductor const & fc)
{
    require_admissible(ctx, fc);
    KappaResult r;
    std::int64_t c = fc.coarse();
    r.degree = quad::ring_class_degree(quad::QuadOrder(ctx.dK, c),
                                       arith::prime_to_part(c, ctx.S));
    for (auto p : ctx.S)
        r.s_local = mul_u64(r.s_local, local_factor(ctx, p, fc));
    r.empty_fiber = r.s_local == 0;
    r.value = mul_u64(static_cast<std::uint64_t>(r.degree), r.s_local);
    return r;
}

SignVector sign_vector(FineConductor const & fc, GlobalContext const & ctx,
                       std::map<std::int64_t, std::int64_t> const & base_profile)
{
    require_admissible(ctx, fc);
    SignVector out;
    for (auto p : ctx.inert_S()) {
        std::int64_t base = 0;
        if (auto it = base_profile.find(p); it != base_profile.end())
            base = it->second;
        out.bits[p] = static_cast<int>(
            arith::mod(static_cast<std::int64_t>(arith::valuation(fc.c_prime, p)) - base, 2));
    }
    return out;
}

SignVector sign_vector_from_double(FineConductor const & fc, GlobalContext const & ctx)
{
    require_admissible(ctx, fc);
    SignVector out;
    for (auto p : ctx.inert_S()) {
        std::int64_t v = arith::valuation(fc.c_double, p);
        std::int64_t base = arith::valuation(ctx.level, p) % 2;
        out.bits[p] = static_cast<int>(arith::mod(v - base, 2));
    }
    return out;
}

ConsistencyReport theorem_consistency(GlobalContext const & ctx, FineConductor const & fc)
{
    require_admissible(ctx, fc);
    ConsistencyReport r;
    FineConductor fc_S = prime_to_S(fc, ctx);
    r.count_B = orbit_count_B(ctx, fc);
    r.count_BS = orbit_count_BS(ctx, fc_S);
    r.sign_classes = std::uint64_t{1} << ctx.inert_S().size();
    r.kappa = kappa(ctx, fc);
    r.h_coarse = quad::class_number(ctx.dK, fc.coarse());
    r.h_coarse_S = quad::class_number(ctx.dK, fc_S.coarse());

    bool divides = r.count_BS % r.sign_classes == 0;
    r.checks.push_back({"sign classes divide count_BS", divides,
                        "0 mod " + std::to_string(r.sign_classes),
                        std::to_string(r.count_BS % r.sign_classes) + " mod " +
                            std::to_string(r.sign_classes)});
    std::uint64_t per_sign = r.count_BS / r.sign_classes;

    std::uint64_t rhs_a = mul_u64(per_sign, r.kappa.s_local);
    r.checks.push_back({"orbit count identity", divides && r.count_B == rhs_a,
                        std::to_string(rhs_a), std::to_string(r.count_B)});

    r.source_size = mul_u64(r.count_B, static_cast<std::uint64_t>(r.h_coarse));
    r.target_size = mul_u64(per_sign, static_cast<std::uint64_t>(r.h_coarse_S));
    std::uint64_t rhs_b = mul_u64(r.kappa.value, r.target_size);
    r.checks.push_back({"fiber size identity", divides && r.source_size == rhs_b,
                        std::to_string(rhs_b), std::to_string(r.source_size)});
    return r;
}

} // namespace cmfiber::orbits
