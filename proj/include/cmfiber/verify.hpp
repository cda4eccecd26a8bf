#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cmfiber/check.hpp"
#include "cmfiber/local_tree.hpp"

namespace cmfiber::verify {

// brute_force_N == closed_form_N for n', n'' <= n_max and delta <= delta_max.
Check local_count_oracle(std::int64_t p, tree::Kind kind, unsigned n_max, unsigned delta_max,
                   unsigned jobs = 1);

// sum over n'' of closed_form_N(q, kind, n', n'', delta) == (q+1) q^(delta-1).
Check orbit_partition(std::int64_t q, tree::Kind kind, unsigned n_max, unsigned delta_max);

// The same partition with every orbit count weighted by its orbit size.
Check vertex_partition(std::int64_t q, tree::Kind kind, unsigned n_max, unsigned delta_max);

// Enumerated sphere_conductor_count == closed_form_sphere_count.
Check vertex_count_oracle(std::int64_t p, tree::Kind kind, unsigned n_max, unsigned delta_max,
                          unsigned jobs = 1);

struct SweepOptions {
    std::vector<std::int64_t> discriminants;
    std::int64_t c_max = 12;
    std::int64_t level_max = 10;
    std::vector<std::int64_t> s_primes{2, 3, 5};
    std::size_t s_max = 2;
    std::vector<std::int64_t> ram_primes{2, 3, 5, 7, 11, 13};
    std::size_t ram_max = 1;
};

// Exhaustive theorem_consistency sweep over every validated context and
// admissible fine conductor in range. Returns the identity checks, the
// kappa positivity check, and the tuple count.
std::vector<Check> consistency_sweep(SweepOptions const & opt, unsigned jobs = 1);

// For every level prime p inert in K with p prime to c'c'', orbit_count_B
// is 0, over the contexts of the sweep (S and ramB empty or not).
Check heegner_orbits(SweepOptions const & opt);

// Maximal order, Eichler order and mass certificates for (ell, N).
std::vector<Check> quaternion_certificates(std::int64_t ell, std::int64_t N);

// Census checks for one (ell, N, dK, c), names prefixed by the instance.
std::vector<Check> census_checks(std::int64_t ell, std::int64_t N, std::int64_t dK,
                                 std::int64_t c);

// Suites: "local", "orbits", "quaternion", "all". Deterministic given seed;
// jobs only changes wall time.
std::vector<Check> run_suite(std::string_view suite, std::uint64_t seed, unsigned jobs = 1);

} // namespace cmfiber::verify
