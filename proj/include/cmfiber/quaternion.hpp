#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "cmfiber/check.hpp"

namespace cmfiber::quat {

// Coordinates in the standard basis 1, i, j, k.
using Elem = std::array<mpq_class, 4>;
using Coords = std::array<mpz_class, 4>;

inline constexpr std::int64_t infinity = 0;

// Local Hilbert symbol (a, b)_p; p = infinity selects the real place.
int hilbert_symbol(std::int64_t a, std::int64_t b, std::int64_t p);

// B = (a, b | Q): i^2 = a, j^2 = b, ij = -ji = k, ramified at {ell, inf}.
struct QuatAlgebra {
    std::int64_t a = -1;
    std::int64_t b = -1;
    std::int64_t ell = 2;

    Elem mul(Elem const & x, Elem const & y) const;
    Elem conj(Elem const & x) const;
    Elem inverse(Elem const & x) const;
    mpq_class trd(Elem const & x) const;
    mpq_class nrd(Elem const & x) const;
    // trd(x conj(y)) / 2, the polar form of nrd.
    mpq_class inner(Elem const & x, Elem const & y) const;
};

Elem scalar(mpq_class const & s);
Elem operator+(Elem const & x, Elem const & y);
Elem operator-(Elem const & x, Elem const & y);
Elem operator*(mpq_class const & s, Elem const & x);

// (a, b) verified to ramify exactly at ell and infinity.
QuatAlgebra make_algebra(std::int64_t ell);

// Full-rank Z-lattice in B, kept as the Hermite normal form of D * L
// divided by D; equal lattices have identical bases.
class Lattice {
    std::array<Elem, 4> basis_;
    explicit Lattice(std::array<Elem, 4> basis) : basis_(std::move(basis)) {}

public:
    // Z-span of the generators; throws if they do not span a rank 4 lattice.
    static Lattice span(std::vector<Elem> const & gens);

    std::array<Elem, 4> const & basis() const { return basis_; }
    // Coordinates of x in basis(); nullopt when x is not in the lattice.
    std::optional<Coords> coordinates(Elem const & x) const;
    std::array<mpq_class, 4> rational_coordinates(Elem const & x) const;
    bool contains(Elem const & x) const { return coordinates(x).has_value(); }
    bool contains(Lattice const & other) const;
    Elem element(Coords const & v) const;
    // |det| of the basis in 1, i, j, k coordinates.
    mpq_class covolume() const;

    friend bool operator==(Lattice const &, Lattice const &) = default;
};

Lattice sum(Lattice const & L, Lattice const & M);
Lattice intersection(Lattice const & L, Lattice const & M);
Lattice product(QuatAlgebra const & alg, Lattice const & L, Lattice const & M);
Lattice conjugate(QuatAlgebra const & alg, Lattice const & L);
Lattice left_multiply(QuatAlgebra const & alg, Elem const & x, Lattice const & L);
Lattice right_multiply(QuatAlgebra const & alg, Lattice const & L, Elem const & x);
Lattice right_order_of(QuatAlgebra const & alg, Lattice const & I);
Lattice left_order_of(QuatAlgebra const & alg, Lattice const & I);

// Matrix of trd(e_i conj(e_j)).
std::array<std::array<mpq_class, 4>, 4> trace_gram(QuatAlgebra const & alg, Lattice const & L);
// gcd of the values of nrd on L.
mpq_class lattice_norm(QuatAlgebra const & alg, Lattice const & L);
// True when nrd and trd are integral on L.
bool is_integral(QuatAlgebra const & alg, Lattice const & L);

// LLL-reduced basis of L for the form nrd (delta = 3/4, exact arithmetic).
std::array<Elem, 4> lll_basis(QuatAlgebra const & alg, Lattice const & L);

inline constexpr std::uint64_t default_node_cap = 50'000'000;

// Every x in L with nrd(x - center) <= bound, by exact Fincke-Pohst
// enumeration. Visiting order is deterministic.
void for_each_close_vector(QuatAlgebra const & alg, Lattice const & L, Elem const & center,
                           mpq_class const & bound,
                           std::function<void(Elem const &)> const & visit,
                           std::uint64_t cap = default_node_cap);
std::vector<Elem> vectors_of_norm(QuatAlgebra const & alg, Lattice const & L,
                                  mpq_class const & norm, std::uint64_t cap = default_node_cap);

struct QuatOrder {
    QuatAlgebra alg;
    Lattice lattice;
    std::int64_t red_disc;
};

// Validates that L is an order (contains 1, closed, integral) and computes
// its reduced discriminant sqrt|det trace_gram|.
QuatOrder make_order(QuatAlgebra const & alg, Lattice const & L);
bool is_order(QuatAlgebra const & alg, Lattice const & L);

// A maximal order containing Z<1, i, j, k>, found by p-saturation.
QuatOrder maximalize(QuatAlgebra const & alg, unsigned max_rounds = 64);

struct EichlerOrder {
    QuatOrder order;    // R = R1 cap R2
    QuatOrder r1, r2;   // the two maximal orders
    Elem gamma;         // R2 = gamma R1 gamma^-1
    std::int64_t level = 1;
};

EichlerOrder eichler_order(QuatOrder const & max_order, std::int64_t N);

// Elements of reduced norm 1, sorted by coordinates in the order's basis.
std::vector<Elem> unit_group(QuatOrder const & ord);

struct RightIdealClass {
    Lattice ideal;
    mpq_class norm;
    QuatOrder right_order;
    QuatOrder left_order;
    std::int64_t unit_count;
};

struct IdealClassSet {
    std::vector<RightIdealClass> classes;
    std::int64_t neighbor_prime = 0;
    mpq_class mass;           // sum of 1 / |O_l(I)^x|
    mpq_class expected_mass;  // (ell - 1)/24 * N * prod_{p | N} (1 + 1/p)
};

// (ell - 1)/24 * N * prod_{p | N} (1 + 1/p).
mpq_class eichler_mass(std::int64_t ell, std::int64_t N);

// Breadth-first search over p-neighbours of R until the mass is met.
IdealClassSet right_ideal_classes(QuatOrder const & R, std::int64_t level,
                                  unsigned max_classes = 2000);

// Some alpha with alpha I = J, if the right ideals are isomorphic.
std::optional<Elem> ideal_isomorphism(QuatAlgebra const & alg, Lattice const & I,
                                      Lattice const & J);

// Trace and norm of the standard generator of O_c in Q(sqrt dK):
// c(dK + sqrt dK)/2 for dK = 1 mod 4, c sqrt(dK)/2 for dK = 0 mod 4.
std::pair<std::int64_t, std::int64_t> generator_trace_norm(std::int64_t dK, std::int64_t c);

struct EmbeddingClass {
    Elem representative;
    Coords coords;              // in the order's basis
    std::int64_t trd = 0, nrd = 0;
    std::int64_t size = 0;
    int sign = -1;              // residue sign, -1 when not defined
    std::size_t partner = 0;    // class of trd - x
};

struct EmbeddingSet {
    std::vector<Elem> elements; // all optimal elements, sorted by coordinates
    std::vector<std::size_t> class_of;
    std::vector<int> element_sign; // residue sign per element, or empty
    std::vector<EmbeddingClass> classes;
    std::int64_t unit_count = 0;
    std::int64_t pairs = 0;        // two-element orbits of the pairing
    std::int64_t self_paired = 0;  // classes fixed by the pairing
};

// Optimal embeddings of O_c into ord, up to conjugation by ord^x. When
// ell = alg.ell is inert in K and prime to c, each class carries its
// residue sign relative to the first element of `elements`.
EmbeddingSet optimal_embeddings(QuatOrder const & ord, std::int64_t dK, std::int64_t c,
                                std::uint64_t cap = default_node_cap);

// R/P = F_{ell^2} for the maximal two-sided ideal P of ord above ell.
class ResidueField {
    QuatOrder ord_;
    Lattice P_;
    std::int64_t ell_;
    std::int64_t s_, t_; // canonical modulus u^2 + s u + t

public:
    ResidueField(QuatOrder const & ord, std::int64_t ell);

    std::int64_t ell() const { return ell_; }
    Lattice const & prime() const { return P_; }
    std::pair<std::int64_t, std::int64_t> modulus() const { return {s_, t_}; }

    // 0 if x maps to the smaller root of its minimal polynomial in
    // F_ell[u]/(u^2 + s u + t), 1 for the other root; the embedding of
    // R/P is fixed by sending `reference` to the smaller root of its own
    // minimal polynomial.
    int sign(Elem const & x, Elem const & reference) const;
};

int residue_sign(QuatOrder const & ord, Elem const & x, std::int64_t ell, Elem const & reference);

struct CensusRow {
    std::size_t ideal_class = 0;
    std::int64_t unit_count = 0;
    std::int64_t elements = 0;
    std::int64_t classes = 0;
    std::int64_t pairs = 0;
    std::int64_t self_paired = 0;
    std::int64_t sign0 = 0, sign1 = 0;
};

struct Census {
    std::int64_t ell = 0, level = 1, dK = 0, c = 1;
    bool signs_defined = false; // ell inert in K
    std::vector<CensusRow> rows;
    CensusRow totals;
    std::int64_t ideal_classes = 0;
    std::uint64_t expected_total = 0; // orbit_count_BS((c, c)) * h(dK, c)
    std::vector<Check> checks;
    bool ok() const { return all_pass(checks); }
};

Census embedding_census(std::int64_t ell, std::int64_t N, std::int64_t dK, std::int64_t c);

} // namespace cmfiber::quat
