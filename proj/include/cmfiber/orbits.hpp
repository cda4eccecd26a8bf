#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmfiber/check.hpp"
#include "cmfiber/local_tree.hpp"

namespace cmfiber::orbits {

// Global data over Q: K = Q(sqrt(dK)), the finite ramification of B, the
// level of the Eichler order, and the auxiliary set S. Prime sets are kept
// sorted and duplicate-free by make_context.
struct GlobalContext {
    std::int64_t dK = -3;
    std::vector<std::int64_t> ramB;
    std::int64_t level = 1;
    std::vector<std::int64_t> S;

    // S' : the primes of S inert in K.
    std::vector<std::int64_t> inert_S() const;
};

// Checks the shape of the input (dK negative fundamental, primes prime,
// level >= 1) and normalizes the prime sets. Hypotheses are not checked.
GlobalContext make_context(std::int64_t dK, std::vector<std::int64_t> ramB,
                           std::int64_t level, std::vector<std::int64_t> S);

struct FineConductor {
    std::int64_t c_prime = 1;
    std::int64_t c_double = 1;

    std::int64_t coarse() const; // lcm(c', c'')
    friend bool operator==(FineConductor const &, FineConductor const &) = default;
};

struct SignVector {
    std::map<std::int64_t, int> bits; // p in S' -> 0 or 1
    friend bool operator==(SignVector const &, SignVector const &) = default;
};

struct Violation {
    std::string hypothesis; // "H.1", "H.2", "H.3", "K-embeds-in-B", "level-coprime-to-ramB"
    std::string detail;
};

std::vector<Violation> validate_context(GlobalContext const & ctx);

// Throws errc::hypothesis naming the first violation.
void require_valid(GlobalContext const & ctx);

// v_p(c') - v_p(c'') = v_p(level) mod 2 at every p in S'.
bool admissible(FineConductor const & fc, GlobalContext const & ctx);

// closed_form_N at p with the valuations of c', c'' and the level.
// p in ramB is errc::invalid_argument.
std::uint64_t local_factor(GlobalContext const & ctx, std::int64_t p,
                           FineConductor const & fc);

// 2^{#ramB inert in K} * prod over p not in ramB of local_factor.
std::uint64_t orbit_count_B(GlobalContext const & ctx, FineConductor const & fc);

// The same count for B_S: ramB replaced by ramB u S and the level by its
// prime-to-S part. fc must already be prime to S.
std::uint64_t orbit_count_BS(GlobalContext const & ctx, FineConductor const & fc);

// The prime-to-S parts of c' and c''.
FineConductor prime_to_S(FineConductor const & fc, GlobalContext const & ctx);

struct KappaResult {
    std::uint64_t value = 0;        // degree * s_local, 0 on an empty fiber
    std::int64_t degree = 1;        // [K[c] : K[c_S]]
    std::uint64_t s_local = 1;      // prod over p in S of local_factor
    bool empty_fiber = false;       // some S-local factor vanished
};

// Requires a valid context and admissible fc (errc::hypothesis otherwise).
KappaResult kappa(GlobalContext const & ctx, FineConductor const & fc);

// bit_p = (v_p(c') - profile(p)) mod 2 for p in S'; missing profile
// entries count as 0.
SignVector sign_vector(FineConductor const & fc, GlobalContext const & ctx,
                       std::map<std::int64_t, std::int64_t> const & base_profile = {});

// The same vector read from c'': bit_p = (v_p(c'') - profile(p)) mod 2 with
// the default profile v_p(level) mod 2.
SignVector sign_vector_from_double(FineConductor const & fc, GlobalContext const & ctx);

struct ConsistencyReport {
    std::uint64_t count_B = 0;
    std::uint64_t count_BS = 0;
    std::uint64_t sign_classes = 1; // 2^{|S'|}
    KappaResult kappa;
    std::int64_t h_coarse = 0;      // h(dK, lcm(c', c''))
    std::int64_t h_coarse_S = 0;    // h(dK, prime-to-S part of the lcm)
    std::uint64_t source_size = 0;  // count_B * h_coarse
    std::uint64_t target_size = 0;  // count_BS / 2^{|S'|} * h_coarse_S
    std::vector<Check> checks;
    bool ok() const { return all_pass(checks); }
};

// Orbit count identity: count_B = count_BS / 2^{|S'|} * prod_S local_factor and
// fiber size identity: source_size = kappa * target_size, checked as exact integer equations.
ConsistencyReport theorem_consistency(GlobalContext const & ctx, FineConductor const & fc);

} // namespace cmfiber::orbits
