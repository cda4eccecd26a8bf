#include "cmfiber/local_tree.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>
#include <string>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"

namespace cmfiber::tree {

using arith::checked_add;
using arith::checked_mul;

std::string_view to_string(Kind k)
{
    switch (k) {
    case Kind::split:
        return "split";
    case Kind::inert:
        return "inert";
    case Kind::ramified:
        return "ramified";
    }
    return "?";
}

Kind parse_kind(std::string_view s)
{
    if (s == "split")
        return Kind::split;
    if (s == "inert")
        return Kind::inert;
    if (s == "ramified")
        return Kind::ramified;
    throw_invalid("unknown kind '" + std::string(s) + "' (expected split, inert or ramified)");
}

Vec2 apply_matrix(Mat2 const & m, Vec2 const & v)
{
    return {checked_add(checked_mul(m[0][0], v[0]), checked_mul(m[0][1], v[1])),
            checked_add(checked_mul(m[1][0], v[0]), checked_mul(m[1][1], v[1]))};
}

namespace {

// Companion matrix of x^2 + c1 x + c0: omega e1 = e2, omega e2 = -c0 e1 - c1 e2.
Mat2 companion(std::int64_t c1, std::int64_t c0)
{
    return Mat2{{{0, -c0}, {1, -c1}}};
}

bool is_p_power(std::int64_t n, std::int64_t p)
{
    if (n < 1)
        return false;
    while (n % p == 0)
        n /= p;
    return n == 1;
}

// Extended gcd: returns g >= 0 and (x, y) with a x + b y = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t & x, std::int64_t & y)
{
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::int64_t t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

void check_prime(std::int64_t p)
{
    if (!arith::is_prime(p))
        throw_invalid("p = " + std::to_string(p) + " is not prime");
}

} // namespace

LocalQuadratic make_local_quadratic(std::int64_t p, Kind kind)
{
    check_prime(p);
    LocalQuadratic K{p, kind, {}};
    switch (kind) {
    case Kind::split:
        K.omega = companion(-1, 0);
        break;
    case Kind::inert:
        if (p == 2) {
            K.omega = companion(1, 1);
        } else {
            std::int64_t c = 1;
            while (arith::kronecker(1 - 4 * c, p) != -1)
                ++c;
            K.omega = companion(-1, c);
        }
        break;
    case Kind::ramified:
        K.omega = companion(0, -p);
        break;
    }
    return K;
}

bool Lattice2::contains(Vec2 const & w) const
{
    if (w[1] % d != 0)
        return false;
    std::int64_t y = w[1] / d;
    std::int64_t rest = checked_add(w[0], -checked_mul(y, b));
    return rest % a == 0;
}

Lattice2 lattice_from_columns(std::int64_t p, std::span<Vec2 const> columns, int scale)
{
    // Integer column operations bring the 2 x n matrix to [[a, b], [0, d]].
    // `pivot` carries the gcd of the second row; a collects first entries of
    // the columns that were cleared in the second row.
    std::int64_t a = 0;
    Vec2 pivot{0, 0};
    for (auto const & c : columns) {
        if (c[1] == 0) {
            a = std::gcd(a, std::llabs(c[0]));
            continue;
        }
        if (pivot[1] == 0) {
            pivot = c;
            continue;
        }
        std::int64_t x, y;
        std::int64_t g = ext_gcd(pivot[1], c[1], x, y);
        std::int64_t u = c[1] / g, v = pivot[1] / g;
        // [[x, u], [y, -v]] is unimodular
        Vec2 np{checked_add(checked_mul(x, pivot[0]), checked_mul(y, c[0])), g};
        std::int64_t cleared = checked_add(checked_mul(u, pivot[0]), -checked_mul(v, c[0]));
        a = std::gcd(a, std::llabs(cleared));
        pivot = np;
    }
    if (pivot[1] == 0 || a == 0)
        throw_invalid("lattice_from_columns: columns are not of full rank");
    if (pivot[1] < 0)
        pivot = {-pivot[0], -pivot[1]};
    std::int64_t d = pivot[1];
    if (!is_p_power(a, p) || !is_p_power(d, p))
        throw_invalid("lattice_from_columns: index is not a power of p");
    std::int64_t b = arith::mod(pivot[0], a);
    while (a % p == 0 && b % p == 0 && d % p == 0) {
        a /= p;
        b /= p;
        d /= p;
        ++scale;
    }
    return {p, a, b, d, scale};
}

unsigned conductor_exponent(Lattice2 const & lat, LocalQuadratic const & K)
{
    if (lat.p != K.p)
        throw_invalid("conductor_exponent: lattice and algebra have different p");
    Vec2 const c1{lat.a, 0}, c2{lat.b, lat.d};
    Vec2 w1 = apply_matrix(K.omega, c1), w2 = apply_matrix(K.omega, c2);
    // p^m Z^2 lies in lat for m = v_p(a d), so the search is bounded by m.
    unsigned bound = arith::valuation(checked_mul(lat.a, lat.d), K.p);
    for (unsigned n = 0;; ++n) {
        if (lat.contains(w1) && lat.contains(w2))
            return n;
        if (n == bound)
            throw_internal("conductor_exponent exceeded its a priori bound");
        w1 = {checked_mul(w1[0], K.p), checked_mul(w1[1], K.p)};
        w2 = {checked_mul(w2[0], K.p), checked_mul(w2[1], K.p)};
    }
}

std::pair<int, int> relative_position(Lattice2 const & l1, Lattice2 const & l2)
{
    if (l1.p != l2.p)
        throw_invalid("relative_position: lattices over different primes");
    std::int64_t const p = l1.p;
    // adj(B1) * B2 with B = [[a, b], [0, d]]
    std::int64_t m00 = checked_mul(l1.d, l2.a);
    std::int64_t m01 = checked_add(checked_mul(l1.d, l2.b), -checked_mul(l1.b, l2.d));
    std::int64_t m11 = checked_mul(l1.a, l2.d);
    std::int64_t g = std::gcd(std::gcd(m00, std::llabs(m01)), m11);
    int vdet1 = static_cast<int>(arith::valuation(checked_mul(l1.a, l1.d), p));
    int vg = static_cast<int>(arith::valuation(g, p)) - vdet1;
    int vdet = static_cast<int>(arith::valuation(checked_mul(m00, m11), p)) - 2 * vdet1;
    int shift = l2.scale - l1.scale;
    return {vg + shift, vdet - vg + shift};
}

unsigned vertex_distance(TreeVertex const & v1, TreeVertex const & v2)
{
    auto [i1, i2] = relative_position(v1.lattice(), v2.lattice());
    return static_cast<unsigned>(i2 - i1);
}

std::vector<TreeVertex> neighbors(TreeVertex const & v)
{
    std::int64_t const p = v.p;
    Vec2 const c1{v.a, 0}, c2{v.b, v.d};
    std::vector<TreeVertex> out;
    out.reserve(static_cast<std::size_t>(p + 1));
    for (std::int64_t t = 0; t < p; ++t) {
        std::array<Vec2, 2> cols{Vec2{checked_mul(p, c1[0]), 0},
                                 Vec2{checked_add(c2[0], checked_mul(t, c1[0])), c2[1]}};
        out.push_back(TreeVertex::of(lattice_from_columns(p, cols)));
    }
    std::array<Vec2, 2> cols{c1, Vec2{checked_mul(p, c2[0]), checked_mul(p, c2[1])}};
    out.push_back(TreeVertex::of(lattice_from_columns(p, cols)));
    return out;
}

std::uint64_t sphere_size(std::int64_t p, unsigned delta)
{
    if (delta == 0)
        return 1;
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    auto const up = static_cast<std::uint64_t>(p);
    std::uint64_t n = up + 1;
    for (unsigned i = 1; i < delta; ++i) {
        if (n > max / up)
            return max;
        n *= up;
    }
    return n;
}

namespace {

void walk(TreeVertex const & v, TreeVertex const * prev, unsigned remaining,
          std::function<void(TreeVertex const &)> const & visit)
{
    if (remaining == 0) {
        visit(v);
        return;
    }
    for (auto const & w : neighbors(v)) {
        if (prev != nullptr && w == *prev)
            continue;
        walk(w, &v, remaining - 1, visit);
    }
}

void check_cap(std::int64_t p, unsigned delta, std::uint64_t cap)
{
    std::uint64_t n = sphere_size(p, delta);
    if (n > cap)
        throw_resource("sphere of radius " + std::to_string(delta) + " at p = " +
                       std::to_string(p) + " has " + std::to_string(n) +
                       " vertices, above the cap of " + std::to_string(cap));
}

} // namespace

void for_each_on_sphere(TreeVertex const & v, unsigned delta,
                        std::function<void(TreeVertex const &)> const & visit,
                        std::uint64_t cap)
{
    check_cap(v.p, delta, cap);
    walk(v, nullptr, delta, visit);
}

std::vector<TreeVertex> enumerate_sphere(TreeVertex const & v, unsigned delta, std::uint64_t cap)
{
    std::vector<TreeVertex> out;
    out.reserve(static_cast<std::size_t>(sphere_size(v.p, delta)));
    for_each_on_sphere(v, delta, [&](TreeVertex const & w) { out.push_back(w); }, cap);
    return out;
}

TreeVertex base_vertex(LocalQuadratic const & K, unsigned n)
{
    std::array<Vec2, 2> cols{Vec2{1, 0}, Vec2{0, arith::ipow(K.p, n)}};
    TreeVertex v = TreeVertex::of(lattice_from_columns(K.p, cols));
    if (conductor_exponent(v, K) != n)
        throw_internal("base vertex does not have the requested conductor");
    return v;
}

std::uint64_t sphere_conductor_count(LocalQuadratic const & K, unsigned n_base,
                                     unsigned n_other, unsigned delta, std::uint64_t cap,
                                     unsigned jobs)
{
    check_cap(K.p, delta, cap);
    TreeVertex const base = base_vertex(K, n_base);
    auto count_from = [&](TreeVertex const & start, TreeVertex const * prev, unsigned depth) {
        std::uint64_t n = 0;
        walk(start, prev, depth, [&](TreeVertex const & w) {
            if (conductor_exponent(w, K) == n_other)
                ++n;
        });
        return n;
    };
    if (delta == 0 || jobs <= 1)
        return count_from(base, nullptr, delta);

    // One task per first-level subtree; the sum does not depend on the split.
    std::vector<TreeVertex> const first = neighbors(base);
    std::vector<std::future<std::uint64_t>> parts;
    std::size_t const workers = std::min<std::size_t>(jobs, first.size());
    for (std::size_t w = 0; w < workers; ++w) {
        parts.push_back(std::async(std::launch::async, [&, w] {
            std::uint64_t n = 0;
            for (std::size_t i = w; i < first.size(); i += workers)
                n += count_from(first[i], &base, delta - 1);
            return n;
        }));
    }
    std::uint64_t total = 0;
    for (auto & f : parts)
        total += f.get();
    return total;
}

std::uint64_t brute_force_N(LocalQuadratic const & K, unsigned n1, unsigned n2, unsigned delta,
                            std::uint64_t cap, unsigned jobs)
{
    return sphere_conductor_count(K, std::max(n1, n2), std::min(n1, n2), delta, cap, jobs);
}

namespace {

std::uint64_t upow(std::uint64_t q, unsigned e)
{
    return static_cast<std::uint64_t>(arith::ipow(static_cast<std::int64_t>(q), e));
}

} // namespace

std::uint64_t closed_form_N(std::uint64_t q, Kind kind, unsigned n1, unsigned n2, unsigned delta)
{
    if (q < 2)
        throw_invalid("closed_form_N needs q >= 2");
    unsigned const lo = std::min(n1, n2), hi = std::max(n1, n2);
    unsigned const gap = hi - lo;

    // case 1
    if (delta >= gap && (delta - gap) % 2 == 0) {
        unsigned r = (delta - gap) / 2;
        if (r < lo)
            return r == 0 ? 1 : (q - 1) * upow(q, r - 1);
    }
    unsigned const sum = n1 + n2;
    if (delta < sum)
        return 0;
    unsigned const s = delta - sum;
    switch (kind) {
    case Kind::inert:
        return s == 0 ? upow(q, lo) : 0;
    case Kind::ramified:
        if (s > 1)
            return 0;
        if (s == 1 || lo == 0)
            return upow(q, lo);
        return (q - 1) * upow(q, lo - 1);
    case Kind::split:
        if (lo == 0)
            return s == 0 ? 1 : 2;
        if (s == 0)
            return (q - 2) * upow(q, lo - 1);
        return 2 * (q - 1) * upow(q, lo - 1);
    }
    return 0;
}

std::uint64_t orbit_index(std::uint64_t q, Kind kind, unsigned n_base, unsigned n_other)
{
    if (n_other <= n_base)
        return 1;
    if (n_base >= 1)
        return upow(q, n_other - n_base);
    // |(O_K / p)^x / F_q^x| = q + 1, q, q - 1
    std::uint64_t units = kind == Kind::inert ? q + 1 : kind == Kind::ramified ? q : q - 1;
    return units * upow(q, n_other - 1);
}

std::uint64_t closed_form_sphere_count(std::uint64_t q, Kind kind, unsigned n_base,
                                       unsigned n_other, unsigned delta)
{
    return closed_form_N(q, kind, n_base, n_other, delta) * orbit_index(q, kind, n_base, n_other);
}

} // namespace cmfiber::tree
