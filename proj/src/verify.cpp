#include "cmfiber/verify.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <random>
#include <sstream>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"
#include "cmfiber/orbits.hpp"
#include "cmfiber/quad_orders.hpp"
#include "cmfiber/quaternion.hpp"

namespace cmfiber::verify {

namespace {

using tree::Kind;

constexpr Kind all_kinds[] = {Kind::split, Kind::inert, Kind::ramified};

// f(0..n-1) spread over `jobs` threads; results come back in index order.
template <class F>
auto parallel_map(std::size_t n, unsigned jobs, F f) -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(n);
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f(i);
        return out;
    }
    std::vector<std::future<void>> workers;
    std::size_t const w = std::min<std::size_t>(jobs, n);
    for (std::size_t t = 0; t < w; ++t)
        workers.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < n; i += w)
                out[i] = f(i);
        }));
    for (auto & fu : workers)
        fu.get();
    return out;
}

// Tally of a family of equalities, keeping the first failure.
struct Tally {
    std::uint64_t tested = 0;
    std::uint64_t failed = 0;
    std::string first;

    void record(bool ok, std::string const & what)
    {
        ++tested;
        if (!ok && failed++ == 0)
            first = what;
    }
    void merge(Tally const & o)
    {
        tested += o.tested;
        if (o.failed && failed == 0)
            first = o.first;
        failed += o.failed;
    }
    Check check(std::string name) const
    {
        std::string actual = std::to_string(failed) + " of " + std::to_string(tested) + " failed";
        if (failed)
            actual += "; first: " + first;
        return {std::move(name), failed == 0 && tested > 0, "0 of " + std::to_string(tested) + " failed",
                actual};
    }
};

std::string kind_name(Kind k)
{
    return std::string(tree::to_string(k));
}

std::string tuple_str(std::int64_t q, Kind k, unsigned n1, unsigned n2, unsigned delta)
{
    std::ostringstream os;
    os << "q=" << q << " " << kind_name(k) << " (" << n1 << "," << n2 << "," << delta << ")";
    return os.str();
}

std::string set_str(std::vector<std::int64_t> const & v)
{
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

std::vector<std::vector<std::int64_t>> subsets(std::vector<std::int64_t> const & base,
                                               std::size_t max_size)
{
    std::vector<std::vector<std::int64_t>> out;
    std::size_t const n = base.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_size)
            continue;
        std::vector<std::int64_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i))
                s.push_back(base[i]);
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](auto const & a, auto const & b) { return a.size() < b.size(); });
    return out;
}

bool prime_to(std::int64_t n, std::vector<std::int64_t> const & ps)
{
    for (auto p : ps)
        if (n % p == 0)
            return false;
    return true;
}

std::string context_str(orbits::GlobalContext const & ctx, orbits::FineConductor const & fc)
{
    std::ostringstream os;
    os << "dK=" << ctx.dK << " ramB=" << set_str(ctx.ramB) << " level=" << ctx.level
       << " S=" << set_str(ctx.S) << " c=(" << fc.c_prime << "," << fc.c_double << ")";
    return os.str();
}

// Every (dK, ramB, S, level) of the sweep, validated or not.
std::vector<orbits::GlobalContext> sweep_contexts(SweepOptions const & opt)
{
    std::vector<orbits::GlobalContext> out;
    auto S_sets = subsets(opt.s_primes, opt.s_max);
    auto R_sets = subsets(opt.ram_primes, opt.ram_max);
    for (auto dK : opt.discriminants)
        for (auto const & S : S_sets)
            for (auto const & R : R_sets)
                for (std::int64_t level = 1; level <= opt.level_max; ++level)
                    out.push_back(orbits::make_context(dK, R, level, S));
    return out;
}

struct SweepTally {
    Tally a, b, division, kappa_positive;
};

SweepTally sweep_one(orbits::GlobalContext const & ctx, std::int64_t c_max)
{
    SweepTally t;
    for (std::int64_t c1 = 1; c1 <= c_max; ++c1) {
        if (!prime_to(c1, ctx.ramB))
            continue;
        for (std::int64_t c2 = 1; c2 <= c_max; ++c2) {
            orbits::FineConductor fc{c1, c2};
            if (!prime_to(c2, ctx.ramB) || !orbits::admissible(fc, ctx))
                continue;
            auto r = orbits::theorem_consistency(ctx, fc);
            std::string where = context_str(ctx, fc);
            t.division.record(r.checks[0].pass, where + ": " + r.checks[0].actual);
            t.a.record(r.checks[1].pass, where + ": expected " + r.checks[1].expected +
                                             ", got " + r.checks[1].actual);
            t.b.record(r.checks[2].pass, where + ": expected " + r.checks[2].expected +
                                             ", got " + r.checks[2].actual);
            if (!r.kappa.empty_fiber)
                t.kappa_positive.record(r.kappa.value >= 1, where);
        }
    }
    return t;
}

} // namespace

Check local_count_oracle(std::int64_t p, Kind kind, unsigned n_max, unsigned delta_max, unsigned jobs)
{
    auto K = tree::make_local_quadratic(p, kind);
    struct T {
        unsigned n1, n2, delta;
    };
    std::vector<T> tuples;
    for (unsigned n1 = 0; n1 <= n_max; ++n1)
        for (unsigned n2 = 0; n2 <= n_max; ++n2)
            for (unsigned d = 0; d <= delta_max; ++d)
                tuples.push_back({n1, n2, d});
    auto results = parallel_map(tuples.size(), jobs, [&](std::size_t i) {
        auto [n1, n2, d] = tuples[i];
        return std::pair{tree::brute_force_N(K, n1, n2, d),
                         tree::closed_form_N(static_cast<std::uint64_t>(p), kind, n1, n2, d)};
    });
    Tally t;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        auto [n1, n2, d] = tuples[i];
        t.record(results[i].first == results[i].second,
                 tuple_str(p, kind, n1, n2, d) + ": enumerated " +
                     std::to_string(results[i].first) + ", closed form " +
                     std::to_string(results[i].second));
    }
    return t.check("orbit count oracle p=" + std::to_string(p) + " " + kind_name(kind));
}

namespace {

Check partition(std::int64_t q, Kind kind, unsigned n_max, unsigned delta_max, bool weighted)
{
    auto uq = static_cast<std::uint64_t>(q);
    Tally t;
    for (unsigned n1 = 0; n1 <= n_max; ++n1)
        for (unsigned d = 0; d <= delta_max; ++d) {
            std::uint64_t total = 0;
            // conductors beyond n1 + d cannot occur at distance d
            for (unsigned n2 = 0; n2 <= n1 + d; ++n2)
                total += weighted ? tree::closed_form_sphere_count(uq, kind, n1, n2, d)
                                  : tree::closed_form_N(uq, kind, n1, n2, d);
            std::uint64_t expect = tree::sphere_size(q, d);
            t.record(total == expect, "q=" + std::to_string(q) + " " + kind_name(kind) +
                                          " n'=" + std::to_string(n1) + " delta=" +
                                          std::to_string(d) + ": sum " + std::to_string(total) +
                                          ", sphere " + std::to_string(expect));
        }
    return t.check(std::string(weighted ? "vertex" : "orbit") + " sphere partition q=" +
                   std::to_string(q) + " " + kind_name(kind));
}

} // namespace

Check orbit_partition(std::int64_t q, Kind kind, unsigned n_max, unsigned delta_max)
{
    return partition(q, kind, n_max, delta_max, false);
}

Check vertex_partition(std::int64_t q, Kind kind, unsigned n_max, unsigned delta_max)
{
    return partition(q, kind, n_max, delta_max, true);
}

Check vertex_count_oracle(std::int64_t p, Kind kind, unsigned n_max, unsigned delta_max,
                          unsigned jobs)
{
    auto K = tree::make_local_quadratic(p, kind);
    Tally t;
    for (unsigned nb = 0; nb <= n_max; ++nb)
        for (unsigned no = 0; no <= n_max; ++no)
            for (unsigned d = 0; d <= delta_max; ++d) {
                auto e = tree::sphere_conductor_count(K, nb, no, d, tree::default_vertex_cap, jobs);
                auto c = tree::closed_form_sphere_count(static_cast<std::uint64_t>(p), kind, nb,
                                                        no, d);
                t.record(e == c, tuple_str(p, kind, nb, no, d) + ": enumerated " +
                                     std::to_string(e) + ", closed form " + std::to_string(c));
            }
    return t.check("vertex count oracle p=" + std::to_string(p) + " " + kind_name(kind));
}

std::vector<Check> consistency_sweep(SweepOptions const & opt, unsigned jobs)
{
    auto contexts = sweep_contexts(opt);
    contexts.erase(std::remove_if(contexts.begin(), contexts.end(),
                                  [](auto const & c) {
                                      return !orbits::validate_context(c).empty();
                                  }),
                   contexts.end());
    auto parts = parallel_map(contexts.size(), jobs,
                              [&](std::size_t i) { return sweep_one(contexts[i], opt.c_max); });
    SweepTally all;
    for (auto const & p : parts) {
        all.a.merge(p.a);
        all.b.merge(p.b);
        all.division.merge(p.division);
        all.kappa_positive.merge(p.kappa_positive);
    }
    std::string scope = " (" + std::to_string(contexts.size()) + " contexts)";
    return {all.division.check("sign classes divide the B_S count" + scope),
            all.a.check("orbit count identity" + scope),
            all.b.check("fiber size identity" + scope),
            all.kappa_positive.check("kappa >= 1 on nonempty fibers" + scope)};
}

Check heegner_orbits(SweepOptions const & opt)
{
    Tally t;
    for (auto const & ctx : sweep_contexts(opt)) {
        if (!prime_to(ctx.level, ctx.ramB))
            continue;
        std::vector<std::int64_t> inert;
        for (auto p : arith::factorize(ctx.level).primes())
            if (arith::kronecker(ctx.dK, p) == -1)
                inert.push_back(p);
        if (inert.empty())
            continue;
        for (std::int64_t c1 = 1; c1 <= opt.c_max; ++c1)
            for (std::int64_t c2 = 1; c2 <= opt.c_max; ++c2) {
                if (!prime_to(c1 * c2, ctx.ramB) || !prime_to(c1 * c2, inert))
                    continue;
                orbits::FineConductor fc{c1, c2};
                auto n = orbits::orbit_count_B(ctx, fc);
                t.record(n == 0, context_str(ctx, fc) + ": count " + std::to_string(n));
            }
    }
    return t.check("inert level prime empties orbit_count_B");
}

std::vector<Check> quaternion_certificates(std::int64_t ell, std::int64_t N)
{
    std::string tag = " ell=" + std::to_string(ell) + " N=" + std::to_string(N);
    std::vector<Check> out;
    auto O = quat::maximalize(quat::make_algebra(ell));
    out.push_back({"maximal order reduced discriminant" + tag, O.red_disc == ell,
                   std::to_string(ell), std::to_string(O.red_disc)});
    auto E = quat::eichler_order(O, N);
    out.push_back({"eichler order reduced discriminant" + tag, E.order.red_disc == ell * N,
                   std::to_string(ell * N), std::to_string(E.order.red_disc)});
    auto ics = quat::right_ideal_classes(E.order, N);
    out.push_back({"mass certificate" + tag + " (" + std::to_string(ics.classes.size()) +
                       " classes)",
                   ics.mass == ics.expected_mass, ics.expected_mass.get_str(),
                   ics.mass.get_str()});
    return out;
}

std::vector<Check> census_checks(std::int64_t ell, std::int64_t N, std::int64_t dK, std::int64_t c)
{
    auto cen = quat::embedding_census(ell, N, dK, c);
    std::string tag = "census ell=" + std::to_string(ell) + " N=" + std::to_string(N) +
                      " dK=" + std::to_string(dK) + " c=" + std::to_string(c) + ": ";
    auto checks = cen.checks;
    for (auto & ch : checks)
        ch.name = tag + ch.name;
    return checks;
}

namespace {

void append(std::vector<Check> & out, std::vector<Check> more)
{
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
}

std::vector<Check> local_suite(std::uint64_t seed, unsigned jobs)
{
    std::vector<Check> out;
    for (std::int64_t p : {2, 3, 5}) {
        unsigned dmax = p == 5 ? 6 : 8;
        for (auto k : all_kinds) {
            out.push_back(local_count_oracle(p, k, 3, dmax, jobs));
            out.push_back(vertex_count_oracle(p, k, 3, std::min(dmax, 6u), jobs));
            out.push_back(vertex_partition(p, k, 3, 8));
        }
    }
    // seeded extras: larger primes by enumeration, prime powers in closed form
    std::mt19937_64 rng(seed);
    Tally brute, sym, vpart;
    std::int64_t const primes[] = {7, 11, 13};
    for (int it = 0; it < 24; ++it) {
        std::int64_t p = primes[rng() % 3];
        Kind k = all_kinds[rng() % 3];
        unsigned n1 = rng() % 3, n2 = rng() % 3, d = rng() % 4;
        auto K = tree::make_local_quadratic(p, k);
        auto e = tree::brute_force_N(K, n1, n2, d, tree::default_vertex_cap, jobs);
        auto c = tree::closed_form_N(static_cast<std::uint64_t>(p), k, n1, n2, d);
        brute.record(e == c, tuple_str(p, k, n1, n2, d) + ": enumerated " + std::to_string(e) +
                                 ", closed form " + std::to_string(c));
    }
    std::uint64_t const qs[] = {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49};
    for (int it = 0; it < 2000; ++it) {
        std::uint64_t q = qs[rng() % std::size(qs)];
        Kind k = all_kinds[rng() % 3];
        unsigned n1 = rng() % 6, n2 = rng() % 6, d = rng() % 12;
        auto a = tree::closed_form_N(q, k, n1, n2, d), b = tree::closed_form_N(q, k, n2, n1, d);
        sym.record(a == b, tuple_str(static_cast<std::int64_t>(q), k, n1, n2, d));
    }
    for (std::uint64_t q : qs)
        for (auto k : all_kinds) {
            auto ch = vertex_partition(static_cast<std::int64_t>(q), k, 5, 10);
            vpart.record(ch.pass, ch.actual);
        }
    out.push_back(brute.check("orbit count oracle, random p in {7,11,13} (seed " +
                              std::to_string(seed) + ")"));
    out.push_back(sym.check("closed form symmetric in (n', n'') (seed " + std::to_string(seed) +
                            ")"));
    out.push_back(vpart.check("vertex sphere partition for prime powers q <= 49"));
    return out;
}

std::vector<std::int64_t> const discriminants{-3, -4, -7, -8, -11, -15, -19, -20};

std::vector<Check> orbits_suite(std::uint64_t seed, unsigned jobs)
{
    std::vector<Check> out;
    SweepOptions small;
    small.discriminants = discriminants;
    append(out, consistency_sweep(small, jobs));
    out.push_back(heegner_orbits(small));

    std::mt19937_64 rng(seed);
    Tally random_a, random_b, sym, signs;
    std::vector<std::int64_t> const s_pool{2, 3, 5, 7}, r_pool{2, 3, 5, 7, 11, 13};
    for (int it = 0; it < 20000; ++it) {
        std::int64_t dK = discriminants[rng() % discriminants.size()];
        std::vector<std::int64_t> S, R;
        for (auto p : s_pool)
            if (rng() % 3 == 0)
                S.push_back(p);
        if (S.size() > 2)
            S.resize(2);
        R.push_back(r_pool[rng() % r_pool.size()]);
        if ((S.size() + R.size() + 1) % 2 != 0)
            R.clear();
        std::int64_t level = 1 + static_cast<std::int64_t>(rng() % 30);
        std::int64_t c1 = 1 + static_cast<std::int64_t>(rng() % 50);
        std::int64_t c2 = 1 + static_cast<std::int64_t>(rng() % 50);
        auto ctx = orbits::make_context(dK, R, level, S);
        orbits::FineConductor fc{c1, c2};
        if (!orbits::validate_context(ctx).empty() || !prime_to(c1 * c2, ctx.ramB) ||
            !orbits::admissible(fc, ctx))
            continue;
        auto r = orbits::theorem_consistency(ctx, fc);
        random_a.record(r.checks[0].pass && r.checks[1].pass, context_str(ctx, fc));
        random_b.record(r.checks[2].pass, context_str(ctx, fc));
        sym.record(orbits::orbit_count_B(ctx, fc) == orbits::orbit_count_B(ctx, {c2, c1}),
                   context_str(ctx, fc));
        signs.record(orbits::sign_vector(fc, ctx) == orbits::sign_vector_from_double(fc, ctx),
                     context_str(ctx, fc));
    }
    std::string s = " (seed " + std::to_string(seed) + ")";
    out.push_back(random_a.check("orbit count identity, random c <= 50, level <= 30" + s));
    out.push_back(random_b.check("fiber size identity, random c <= 50, level <= 30" + s));
    out.push_back(sym.check("orbit_count_B symmetric in (c', c'')" + s));
    out.push_back(signs.check("sign vector from c' equals sign vector from c''" + s));
    return out;
}

std::vector<Check> quaternion_suite(std::uint64_t seed, unsigned jobs)
{
    struct Job {
        int kind; // 0 certificate, 1 census
        std::int64_t ell, N, dK, c;
    };
    std::vector<Job> work;
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13})
        for (std::int64_t N : {1, 2, 3, 5})
            if (N % ell != 0)
                work.push_back({0, ell, N, 0, 0});
    std::vector<std::array<std::int64_t, 4>> census{
        {2, 1, -3, 1}, {3, 1, -4, 1}, {3, 1, -4, 5}, {11, 1, -3, 1}, {2, 5, -3, 1}};
    std::vector<std::array<std::int64_t, 4>> pool{
        {2, 3, -3, 1}, {2, 7, -3, 1}, {3, 2, -7, 1}, {3, 5, -4, 1}, {5, 1, -3, 2},
        {5, 2, -8, 1}, {7, 1, -4, 3}, {11, 2, -3, 1}, {11, 1, -4, 3}, {13, 1, -7, 1},
        {3, 7, -4, 1}, {2, 1, -11, 3}, {5, 3, -3, 1}, {7, 2, -4, 1}};
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    census.insert(census.end(), pool.begin(), pool.begin() + 4);
    for (auto [ell, N, dK, c] : census)
        work.push_back({1, ell, N, dK, c});
    auto parts = parallel_map(work.size(), jobs, [&](std::size_t i) {
        auto const & w = work[i];
        return w.kind == 0 ? quaternion_certificates(w.ell, w.N)
                           : census_checks(w.ell, w.N, w.dK, w.c);
    });
    std::vector<Check> out;
    for (auto & p : parts)
        append(out, std::move(p));
    return out;
}

} // namespace

std::vector<Check> run_suite(std::string_view suite, std::uint64_t seed, unsigned jobs)
{
    bool all = suite == "all";
    if (!all && suite != "local" && suite != "orbits" && suite != "quaternion")
        throw_invalid("unknown suite '" + std::string(suite) +
                      "' (expected local, orbits, quaternion or all)");
    std::vector<Check> out;
    if (all || suite == "local")
        append(out, local_suite(seed, jobs));
    if (all || suite == "orbits")
        append(out, orbits_suite(seed, jobs));
    if (all || suite == "quaternion")
        append(out, quaternion_suite(seed, jobs));
    return out;
}

} // namespace cmfiber::verify
