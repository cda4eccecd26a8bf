#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace cmfiber::tree {

// How a prime behaves in a quadratic algebra K_v over Q_p.
enum class Kind { split, inert, ramified };

std::string_view to_string(Kind k);
// Accepts "split", "inert", "ramified"; anything else is errc::invalid_argument.
Kind parse_kind(std::string_view s);

using Vec2 = std::array<std::int64_t, 2>;
// Row-major: m[row][col].
using Mat2 = std::array<std::array<std::int64_t, 2>, 2>;

Vec2 apply_matrix(Mat2 const & m, Vec2 const & v);

// K_v together with the matrix of a generator omega of its maximal order
// acting on the standard basis (1, omega) of Q_p^2.
struct LocalQuadratic {
    std::int64_t p = 2;
    Kind kind = Kind::split;
    Mat2 omega{};
};

// Split: x^2 - x. Inert: x^2 - x + c with c minimal such that 1 - 4c is a
// non-residue (x^2 + x + 1 at p = 2). Ramified: x^2 - p.
LocalQuadratic make_local_quadratic(std::int64_t p, Kind kind);

// The lattice p^scale * span{(a,0), (b,d)} in Q_p^2, stored in column
// Hermite normal form: a and d are powers of p, 0 <= b < a, and the
// matrix is primitive (not every entry divisible by p).
struct Lattice2 {
    std::int64_t p = 2;
    std::int64_t a = 1, b = 0, d = 1;
    int scale = 0;

    bool contains(Vec2 const & w) const; // ignores scale
    friend bool operator==(Lattice2 const &, Lattice2 const &) = default;
};

// Z-span of the given integer columns (full rank, p-power index in Z^2),
// normalized to Lattice2 form; powers of p are moved into `scale`.
Lattice2 lattice_from_columns(std::int64_t p, std::span<Vec2 const> columns, int scale = 0);

// Homothety class of a Lattice2: a vertex of the Bruhat-Tits tree.
struct TreeVertex {
    std::int64_t p = 2;
    std::int64_t a = 1, b = 0, d = 1;

    static TreeVertex root(std::int64_t p) { return {p, 1, 0, 1}; }
    static TreeVertex of(Lattice2 const & lat) { return {lat.p, lat.a, lat.b, lat.d}; }
    Lattice2 lattice() const { return {p, a, b, d, 0}; }

    friend bool operator==(TreeVertex const &, TreeVertex const &) = default;
    friend auto operator<=>(TreeVertex const &, TreeVertex const &) = default;
};

// Smallest n >= 0 with p^n * omega * lat inside lat, i.e. the order of lat
// is Z_p + p^n O_K. Independent of lat.scale.
unsigned conductor_exponent(Lattice2 const & lat, LocalQuadratic const & K);
inline unsigned conductor_exponent(TreeVertex const & v, LocalQuadratic const & K)
{
    return conductor_exponent(v.lattice(), K);
}

// Invariant factors {i1 <= i2}: there is a basis (e1, e2) with
// lat1 = Z_p e1 + Z_p e2 and lat2 = p^i1 e1 + p^i2 e2.
std::pair<int, int> relative_position(Lattice2 const & lat1, Lattice2 const & lat2);

unsigned vertex_distance(TreeVertex const & v1, TreeVertex const & v2);

// The p + 1 vertices adjacent to v.
std::vector<TreeVertex> neighbors(TreeVertex const & v);

inline constexpr std::uint64_t default_vertex_cap = 10'000'000;

// (p+1) p^(delta-1), or 1 for delta = 0. Saturates at UINT64_MAX.
std::uint64_t sphere_size(std::int64_t p, unsigned delta);

// Streams every vertex at distance exactly delta from v (depth-first,
// remembering only the predecessor on the current path).
void for_each_on_sphere(TreeVertex const & v, unsigned delta,
                        std::function<void(TreeVertex const &)> const & visit,
                        std::uint64_t cap = default_vertex_cap);

std::vector<TreeVertex> enumerate_sphere(TreeVertex const & v, unsigned delta,
                                         std::uint64_t cap = default_vertex_cap);

// The vertex of span{e1, p^n e2} = O_{p^n} e1, which has conductor n.
TreeVertex base_vertex(LocalQuadratic const & K, unsigned n);

// Number of vertices at distance delta from base_vertex(K, n_base) whose
// conductor exponent is n_other. Enumerated, not computed from a formula.
std::uint64_t sphere_conductor_count(LocalQuadratic const & K, unsigned n_base,
                                     unsigned n_other, unsigned delta,
                                     std::uint64_t cap = default_vertex_cap,
                                     unsigned jobs = 1);

// Number of K^x-orbits of vertex pairs with conductors (n1, n2) at distance
// delta, by enumeration: the base vertex carries the larger conductor, whose
// stabilizer fixes every vertex of the smaller conductor at that distance.
std::uint64_t brute_force_N(LocalQuadratic const & K, unsigned n1, unsigned n2,
                            unsigned delta, std::uint64_t cap = default_vertex_cap,
                            unsigned jobs = 1);

// The closed form of the orbit count N(n1, n2, delta) for residue field size
// q (any prime power). Zero outside the four admissible configurations:
//   1. delta = |n1 - n2| + 2r, 0 <= r < min: 1 if r = 0, (q-1)q^(r-1) otherwise
//   2. inert, delta = n1 + n2: q^min
//   3. ramified, delta = n1 + n2 + s, s in {0,1}:
//        q^min if s = 1 or min = 0, (q-1)q^(min-1) otherwise
//   4. split, delta = n1 + n2 + s, s >= 0:
//        1 (min = 0 = s), 2 (min = 0 < s), (q-2)q^(min-1) (min > 0 = s),
//        2(q-1)q^(min-1) (min, s > 0)
std::uint64_t closed_form_N(std::uint64_t q, Kind kind, unsigned n1, unsigned n2,
                            unsigned delta);

// [O_{n_base}^x : O_{n_other}^x], the size of one stabilizer orbit of
// vertices of conductor n_other seen from a vertex of conductor n_base.
// Equals 1 when n_other <= n_base.
std::uint64_t orbit_index(std::uint64_t q, Kind kind, unsigned n_base, unsigned n_other);

// Closed-form counterpart of sphere_conductor_count:
// closed_form_N(q, kind, n_base, n_other, delta) * orbit_index(...).
std::uint64_t closed_form_sphere_count(std::uint64_t q, Kind kind, unsigned n_base,
                                       unsigned n_other, unsigned delta);

} // namespace cmfiber::tree
