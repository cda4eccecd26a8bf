#include "cmfiber/cmfiber.h"

#include <new>
#include <map>
#include <string>

#include "cmfiber/error.hpp"
#include "cmfiber/local_tree.hpp"
#include "cmfiber/orbits.hpp"
#include "cmfiber/quad_orders.hpp"
#include "cmfiber/quaternion.hpp"
#include "cmfiber/verify.hpp"

using namespace cmfiber;

struct cmf_report {
    std::vector<Check> checks;
};

struct cmf_context {
    orbits::GlobalContext ctx;
    std::vector<orbits::Violation> violations;
};

struct cmf_ideal_classes {
    quat::IdealClassSet set;
    std::string mass, expected;
};

struct cmf_census {
    quat::Census census;
    cmf_report checks;
};

namespace {

thread_local std::string last_error;

template <class F>
int guarded(F && f)
{
    try {
        return f();
    } catch (error const & e) {
        last_error = e.what();
        switch (e.code()) {
        case errc::invalid_argument:
            return CMF_ERR_INVALID;
        case errc::hypothesis:
            return CMF_ERR_HYPOTHESIS;
        case errc::resource_limit:
            return CMF_ERR_RESOURCE;
        case errc::internal:
            return CMF_ERR_INTERNAL;
        }
        return CMF_ERR_INTERNAL;
    } catch (std::bad_alloc const &) {
        last_error = "out of memory";
        return CMF_ERR_RESOURCE;
    } catch (std::exception const & e) {
        last_error = std::string("unexpected exception: ") + e.what();
        return CMF_ERR_INTERNAL;
    }
}

int null_error(char const * what)
{
    last_error = std::string("null argument: ") + what;
    return CMF_ERR_NULL;
}

int range_error(size_t index, size_t size)
{
    last_error = "index " + std::to_string(index) + " out of range (size " + std::to_string(size) +
                 ")";
    return CMF_ERR_RANGE;
}

tree::Kind to_kind(cmf_kind k)
{
    switch (k) {
    case CMF_SPLIT:
        return tree::Kind::split;
    case CMF_INERT:
        return tree::Kind::inert;
    case CMF_RAMIFIED:
        return tree::Kind::ramified;
    }
    throw_invalid("unknown kind " + std::to_string(static_cast<int>(k)));
}

cmf_kind from_kind(tree::Kind k)
{
    switch (k) {
    case tree::Kind::split:
        return CMF_SPLIT;
    case tree::Kind::inert:
        return CMF_INERT;
    case tree::Kind::ramified:
        return CMF_RAMIFIED;
    }
    return CMF_SPLIT;
}

cmf_kappa to_c(orbits::KappaResult const & k)
{
    return {k.value, k.degree, k.s_local, k.empty_fiber ? 1 : 0};
}

cmf_census_row to_c(quat::CensusRow const & r)
{
    return {r.ideal_class, r.unit_count, r.elements, r.classes,
            r.pairs,       r.self_paired, r.sign0,   r.sign1};
}

} // namespace

#define CMF_REQUIRE(ptr)                                                                          \
    do {                                                                                          \
        if (!(ptr))                                                                               \
            return null_error(#ptr);                                                              \
    } while (0)

extern "C" {

const char * cmf_version(void)
{
    return "0.1.0";
}

const char * cmf_last_error(void)
{
    return last_error.c_str();
}

const char * cmf_status_name(int status)
{
    switch (status) {
    case CMF_OK:
        return "ok";
    case CMF_ERR_INVALID:
        return "invalid argument";
    case CMF_ERR_HYPOTHESIS:
        return "hypothesis violated";
    case CMF_ERR_RESOURCE:
        return "resource limit";
    case CMF_ERR_CHECK:
        return "check failed";
    case CMF_ERR_INTERNAL:
        return "internal error";
    case CMF_ERR_NULL:
        return "null argument";
    case CMF_ERR_RANGE:
        return "index out of range";
    default:
        return "unknown status";
    }
}

int cmf_parse_kind(const char * name, cmf_kind * out)
{
    CMF_REQUIRE(name);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = from_kind(tree::parse_kind(name));
        return CMF_OK;
    });
}

int cmf_closed_form_n(uint64_t q, cmf_kind kind, unsigned n1, unsigned n2, unsigned delta,
                      uint64_t * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = tree::closed_form_N(q, to_kind(kind), n1, n2, delta);
        return CMF_OK;
    });
}

int cmf_brute_force_n(int64_t p, cmf_kind kind, unsigned n1, unsigned n2, unsigned delta,
                      uint64_t cap, unsigned jobs, uint64_t * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        auto K = tree::make_local_quadratic(p, to_kind(kind));
        *out = tree::brute_force_N(K, n1, n2, delta, cap ? cap : tree::default_vertex_cap,
                                   jobs ? jobs : 1);
        return CMF_OK;
    });
}

int cmf_sphere_size(int64_t p, unsigned delta, uint64_t * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = tree::sphere_size(p, delta);
        return CMF_OK;
    });
}

int cmf_class_number(int64_t dk, int64_t c, int64_t * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = quad::class_number(dk, c);
        return CMF_OK;
    });
}

int cmf_splitting_kind(int64_t dk, int64_t p, cmf_kind * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = from_kind(quad::splitting_kind(dk, p));
        return CMF_OK;
    });
}

void cmf_report_free(cmf_report * r)
{
    delete r;
}

int cmf_report_check_count(const cmf_report * r, size_t * out)
{
    CMF_REQUIRE(r);
    CMF_REQUIRE(out);
    *out = r->checks.size();
    return CMF_OK;
}

int cmf_report_check(const cmf_report * r, size_t index, const char ** name, int * pass,
                     const char ** expected, const char ** actual)
{
    CMF_REQUIRE(r);
    if (index >= r->checks.size())
        return range_error(index, r->checks.size());
    auto const & c = r->checks[index];
    if (name)
        *name = c.name.c_str();
    if (pass)
        *pass = c.pass ? 1 : 0;
    if (expected)
        *expected = c.expected.c_str();
    if (actual)
        *actual = c.actual.c_str();
    return CMF_OK;
}

int cmf_report_ok(const cmf_report * r, int * out)
{
    CMF_REQUIRE(r);
    CMF_REQUIRE(out);
    *out = all_pass(r->checks) ? 1 : 0;
    return CMF_OK;
}

int cmf_context_create(int64_t dk, const int64_t * ram_b, size_t n_ram, int64_t level,
                       const int64_t * s, size_t n_s, cmf_context ** out)
{
    CMF_REQUIRE(out);
    if (n_ram)
        CMF_REQUIRE(ram_b);
    if (n_s)
        CMF_REQUIRE(s);
    return guarded([&] {
        auto ctx = orbits::make_context(dk, std::vector<std::int64_t>(ram_b, ram_b + n_ram), level,
                                        std::vector<std::int64_t>(s, s + n_s));
        auto v = orbits::validate_context(ctx);
        *out = new cmf_context{std::move(ctx), std::move(v)};
        return CMF_OK;
    });
}

void cmf_context_free(cmf_context * ctx)
{
    delete ctx;
}

int cmf_context_violation_count(const cmf_context * ctx, size_t * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    *out = ctx->violations.size();
    return CMF_OK;
}

int cmf_context_violation(const cmf_context * ctx, size_t index, const char ** hypothesis,
                          const char ** detail)
{
    CMF_REQUIRE(ctx);
    if (index >= ctx->violations.size())
        return range_error(index, ctx->violations.size());
    if (hypothesis)
        *hypothesis = ctx->violations[index].hypothesis.c_str();
    if (detail)
        *detail = ctx->violations[index].detail.c_str();
    return CMF_OK;
}

int cmf_admissible(const cmf_context * ctx, int64_t c_prime, int64_t c_double, int * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = orbits::admissible({c_prime, c_double}, ctx->ctx) ? 1 : 0;
        return CMF_OK;
    });
}

int cmf_local_factor(const cmf_context * ctx, int64_t p, int64_t c_prime, int64_t c_double,
                     uint64_t * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = orbits::local_factor(ctx->ctx, p, {c_prime, c_double});
        return CMF_OK;
    });
}

int cmf_orbit_count_b(const cmf_context * ctx, int64_t c_prime, int64_t c_double, uint64_t * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = orbits::orbit_count_B(ctx->ctx, {c_prime, c_double});
        return CMF_OK;
    });
}

int cmf_orbit_count_bs(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                       uint64_t * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = orbits::orbit_count_BS(ctx->ctx, {c_prime, c_double});
        return CMF_OK;
    });
}

int cmf_kappa_compute(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                      cmf_kappa * out)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = to_c(orbits::kappa(ctx->ctx, {c_prime, c_double}));
        return CMF_OK;
    });
}

int cmf_sign_vector(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                    const int64_t * profile_primes, const int64_t * profile_values,
                    size_t n_profile, int64_t * primes, int * bits, size_t cap, size_t * count)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(count);
    if (n_profile) {
        CMF_REQUIRE(profile_primes);
        CMF_REQUIRE(profile_values);
    }
    if (cap) {
        CMF_REQUIRE(primes);
        CMF_REQUIRE(bits);
    }
    return guarded([&] {
        std::map<std::int64_t, std::int64_t> profile;
        for (size_t i = 0; i < n_profile; ++i)
            profile[profile_primes[i]] = profile_values[i];
        auto sv = orbits::sign_vector({c_prime, c_double}, ctx->ctx, profile);
        *count = sv.bits.size();
        size_t i = 0;
        for (auto [p, b] : sv.bits) {
            if (i >= cap)
                break;
            primes[i] = p;
            bits[i] = b;
            ++i;
        }
        return CMF_OK;
    });
}

int cmf_theorem_consistency(const cmf_context * ctx, int64_t c_prime, int64_t c_double,
                            cmf_consistency * out, cmf_report ** checks)
{
    CMF_REQUIRE(ctx);
    CMF_REQUIRE(out);
    return guarded([&] {
        auto r = orbits::theorem_consistency(ctx->ctx, {c_prime, c_double});
        *out = {r.count_B,     r.count_BS,    r.sign_classes, to_c(r.kappa), r.h_coarse,
                r.h_coarse_S, r.source_size, r.target_size,  r.ok() ? 1 : 0};
        if (checks)
            *checks = new cmf_report{r.checks};
        return CMF_OK;
    });
}

int cmf_hilbert_symbol(int64_t a, int64_t b, int64_t p, int * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = quat::hilbert_symbol(a, b, p);
        return CMF_OK;
    });
}

int cmf_algebra_info_compute(int64_t ell, int64_t level, cmf_algebra_info * out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        auto alg = quat::make_algebra(ell);
        auto O = quat::maximalize(alg);
        auto E = quat::eichler_order(O, level);
        *out = {alg.a, alg.b, alg.ell, O.red_disc, E.order.red_disc,
                static_cast<int64_t>(quat::unit_group(O).size())};
        return CMF_OK;
    });
}

int cmf_ideal_classes_create(int64_t ell, int64_t level, cmf_ideal_classes ** out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        auto E = quat::eichler_order(quat::maximalize(quat::make_algebra(ell)), level);
        auto set = quat::right_ideal_classes(E.order, level);
        std::string m = set.mass.get_str(), e = set.expected_mass.get_str();
        *out = new cmf_ideal_classes{std::move(set), std::move(m), std::move(e)};
        return CMF_OK;
    });
}

void cmf_ideal_classes_free(cmf_ideal_classes * ic)
{
    delete ic;
}

int cmf_ideal_classes_count(const cmf_ideal_classes * ic, size_t * out)
{
    CMF_REQUIRE(ic);
    CMF_REQUIRE(out);
    *out = ic->set.classes.size();
    return CMF_OK;
}

int cmf_ideal_classes_units(const cmf_ideal_classes * ic, size_t index, int64_t * out)
{
    CMF_REQUIRE(ic);
    CMF_REQUIRE(out);
    if (index >= ic->set.classes.size())
        return range_error(index, ic->set.classes.size());
    *out = ic->set.classes[index].unit_count;
    return CMF_OK;
}

int cmf_ideal_classes_neighbor_prime(const cmf_ideal_classes * ic, int64_t * out)
{
    CMF_REQUIRE(ic);
    CMF_REQUIRE(out);
    *out = ic->set.neighbor_prime;
    return CMF_OK;
}

int cmf_ideal_classes_mass(const cmf_ideal_classes * ic, const char ** mass,
                           const char ** expected)
{
    CMF_REQUIRE(ic);
    if (mass)
        *mass = ic->mass.c_str();
    if (expected)
        *expected = ic->expected.c_str();
    return CMF_OK;
}

int cmf_census_create(int64_t ell, int64_t level, int64_t dk, int64_t c, cmf_census ** out)
{
    CMF_REQUIRE(out);
    return guarded([&] {
        auto cen = quat::embedding_census(ell, level, dk, c);
        auto checks = cen.checks;
        *out = new cmf_census{std::move(cen), cmf_report{std::move(checks)}};
        return CMF_OK;
    });
}

void cmf_census_free(cmf_census * cen)
{
    delete cen;
}

int cmf_census_info_get(const cmf_census * cen, cmf_census_info * out)
{
    CMF_REQUIRE(cen);
    CMF_REQUIRE(out);
    auto const & c = cen->census;
    *out = {c.ell, c.level, c.dK, c.c, c.signs_defined ? 1 : 0, c.ideal_classes,
            c.expected_total, to_c(c.totals), c.ok() ? 1 : 0};
    return CMF_OK;
}

int cmf_census_row_count(const cmf_census * cen, size_t * out)
{
    CMF_REQUIRE(cen);
    CMF_REQUIRE(out);
    *out = cen->census.rows.size();
    return CMF_OK;
}

int cmf_census_row_get(const cmf_census * cen, size_t index, cmf_census_row * out)
{
    CMF_REQUIRE(cen);
    CMF_REQUIRE(out);
    if (index >= cen->census.rows.size())
        return range_error(index, cen->census.rows.size());
    *out = to_c(cen->census.rows[index]);
    return CMF_OK;
}

int cmf_census_checks(const cmf_census * cen, const cmf_report ** out)
{
    CMF_REQUIRE(cen);
    CMF_REQUIRE(out);
    *out = &cen->checks;
    return CMF_OK;
}

int cmf_verify_run(const char * suite, uint64_t seed, unsigned jobs, cmf_report ** out)
{
    CMF_REQUIRE(suite);
    CMF_REQUIRE(out);
    return guarded([&] {
        *out = new cmf_report{verify::run_suite(suite, seed, jobs ? jobs : 1)};
        return CMF_OK;
    });
}

} // extern "C"
