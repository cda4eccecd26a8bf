#include <algorithm>
#include <cmath>
#include <string>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"
#include "cmfiber/quaternion.hpp"

namespace cmfiber::quat {

namespace {

using Mat4 = std::array<std::array<mpq_class, 4>, 4>;

mpz_class floor_q(mpq_class const & q)
{
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

mpz_class round_q(mpq_class const & q)
{
    return floor_q(q + mpq_class(1, 2));
}

// Inverse of a 4x4 rational matrix by Gauss-Jordan; throws when singular.
Mat4 inverse4(Mat4 m)
{
    Mat4 inv{};
    for (int i = 0; i < 4; ++i)
        inv[i][i] = 1;
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            throw_internal("singular 4x4 matrix");
        std::swap(m[col], m[piv]);
        std::swap(inv[col], inv[piv]);
        mpq_class s = 1 / m[col][col];
        for (int j = 0; j < 4; ++j) {
            m[col][j] *= s;
            inv[col][j] *= s;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col || m[r][col] == 0)
                continue;
            mpq_class f = m[r][col];
            for (int j = 0; j < 4; ++j) {
                m[r][j] -= f * m[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

// Row-style Hermite normal form of an integer matrix with 4 columns. The
// result is upper triangular with positive pivots and entries above each
// pivot reduced into [0, pivot).
std::array<std::array<mpz_class, 4>, 4> hnf(std::vector<std::array<mpz_class, 4>> rows)
{
    std::size_t const n = rows.size();
    std::size_t row = 0;
    for (int col = 0; col < 4; ++col) {
        for (;;) {
            std::size_t piv = n;
            for (std::size_t r = row; r < n; ++r)
                if (rows[r][col] != 0 &&
                    (piv == n || abs(rows[r][col]) < abs(rows[piv][col])))
                    piv = r;
            if (piv == n)
                throw_invalid("lattice generators do not span a rank 4 lattice");
            std::swap(rows[row], rows[piv]);
            bool done = true;
            for (std::size_t r = row + 1; r < n; ++r) {
                if (rows[r][col] == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), rows[r][col].get_mpz_t(), rows[row][col].get_mpz_t());
                for (int j = col; j < 4; ++j)
                    rows[r][j] -= q * rows[row][j];
                if (rows[r][col] != 0)
                    done = false;
            }
            if (done)
                break;
        }
        if (rows[row][col] < 0)
            for (int j = col; j < 4; ++j)
                rows[row][j] = -rows[row][j];
        for (std::size_t r = 0; r < row; ++r) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), rows[r][col].get_mpz_t(), rows[row][col].get_mpz_t());
            if (q != 0)
                for (int j = col; j < 4; ++j)
                    rows[r][j] -= q * rows[row][j];
        }
        ++row;
    }
    std::array<std::array<mpz_class, 4>, 4> out;
    for (int i = 0; i < 4; ++i)
        out[i] = rows[i];
    return out;
}

Mat4 basis_matrix(std::array<Elem, 4> const & b)
{
    Mat4 m;
    for (int i = 0; i < 4; ++i)
        m[i] = b[i];
    return m;
}

// c with sum c_i b_i = x.
std::array<mpq_class, 4> solve_in_basis(std::array<Elem, 4> const & b, Elem const & x)
{
    Mat4 inv = inverse4(basis_matrix(b));
    // x = c M  =>  c = x M^-1
    std::array<mpq_class, 4> c;
    for (int j = 0; j < 4; ++j) {
        c[j] = 0;
        for (int k = 0; k < 4; ++k)
            c[j] += x[k] * inv[k][j];
    }
    return c;
}

Lattice dual(Lattice const & L)
{
    Mat4 inv = inverse4(basis_matrix(L.basis()));
    std::vector<Elem> gens(4);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            gens[i][k] = inv[k][i];
    return Lattice::span(gens);
}

mpq_class gcd_q(mpq_class const & x, mpq_class const & y)
{
    if (x == 0)
        return abs(y);
    if (y == 0)
        return abs(x);
    mpz_class den = lcm(x.get_den(), y.get_den());
    mpz_class nx = x.get_num() * (den / x.get_den());
    mpz_class ny = y.get_num() * (den / y.get_den());
    mpq_class r(gcd(nx, ny), den);
    r.canonicalize();
    return r;
}

} // namespace

// ---- Hilbert symbol and the algebra ----------------------------------

int hilbert_symbol(std::int64_t a, std::int64_t b, std::int64_t p)
{
    if (a == 0 || b == 0)
        throw_invalid("hilbert_symbol: arguments must be nonzero");
    if (p == infinity)
        return (a < 0 && b < 0) ? -1 : 1;
    if (!arith::is_prime(p))
        throw_invalid("hilbert_symbol: " + std::to_string(p) + " is not prime");
    unsigned alpha = arith::valuation(a, p), beta = arith::valuation(b, p);
    std::int64_t u = a / arith::ipow(p, alpha), v = b / arith::ipow(p, beta);
    if (p != 2) {
        int s = 1;
        if (alpha % 2 == 1 && beta % 2 == 1 && p % 4 == 3)
            s = -s;
        if (beta % 2 == 1)
            s *= arith::kronecker(arith::mod(u, p), p);
        if (alpha % 2 == 1)
            s *= arith::kronecker(arith::mod(v, p), p);
        return s;
    }
    auto eps = [](std::int64_t w) { return arith::mod(w, 4) == 3 ? 1 : 0; };
    auto omega = [](std::int64_t w) {
        std::int64_t r = arith::mod(w, 8);
        return (r == 3 || r == 5) ? 1 : 0;
    };
    int e = eps(u) * eps(v) + static_cast<int>(alpha) * omega(v) +
            static_cast<int>(beta) * omega(u);
    return e % 2 == 0 ? 1 : -1;
}

Elem QuatAlgebra::mul(Elem const & x, Elem const & y) const
{
    mpq_class const A(a), B(b);
    return {x[0] * y[0] + A * x[1] * y[1] + B * x[2] * y[2] - A * B * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - B * x[2] * y[3] + B * x[3] * y[2],
            x[0] * y[2] + x[2] * y[0] + A * x[1] * y[3] - A * x[3] * y[1],
            x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1]};
}

Elem QuatAlgebra::conj(Elem const & x) const
{
    return {x[0], -x[1], -x[2], -x[3]};
}

mpq_class QuatAlgebra::trd(Elem const & x) const
{
    return 2 * x[0];
}

mpq_class QuatAlgebra::nrd(Elem const & x) const
{
    return inner(x, x);
}

mpq_class QuatAlgebra::inner(Elem const & x, Elem const & y) const
{
    mpq_class const A(a), B(b);
    return x[0] * y[0] - A * x[1] * y[1] - B * x[2] * y[2] + A * B * x[3] * y[3];
}

Elem QuatAlgebra::inverse(Elem const & x) const
{
    mpq_class n = nrd(x);
    if (n == 0)
        throw_invalid("inverse of zero");
    return mpq_class(1 / n) * conj(x);
}

Elem scalar(mpq_class const & s)
{
    return {s, 0, 0, 0};
}

Elem operator+(Elem const & x, Elem const & y)
{
    return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]};
}

Elem operator-(Elem const & x, Elem const & y)
{
    return {x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]};
}

Elem operator*(mpq_class const & s, Elem const & x)
{
    return {s * x[0], s * x[1], s * x[2], s * x[3]};
}

namespace {

bool ramifies_exactly_at(std::int64_t a, std::int64_t b, std::int64_t ell)
{
    if (a >= 0 || b >= 0)
        return false;
    auto f = arith::factorize(arith::checked_mul(2, arith::checked_mul(-a, -b)));
    for (auto p : f.primes())
        if ((hilbert_symbol(a, b, p) == -1) != (p == ell))
            return false;
    return hilbert_symbol(a, b, ell) == -1;
}

} // namespace

QuatAlgebra make_algebra(std::int64_t ell)
{
    if (!arith::is_prime(ell))
        throw_invalid("make_algebra: " + std::to_string(ell) + " is not prime");
    std::vector<std::pair<std::int64_t, std::int64_t>> tries;
    if (ell == 2)
        tries.push_back({-1, -1});
    else if (ell % 4 == 3)
        tries.push_back({-1, -ell});
    else
        tries.push_back({-2, -ell});
    // fallback: (-q, -ell) over small primes q
    for (std::int64_t q = 2; q < 1000; ++q)
        if (arith::is_prime(q))
            tries.push_back({-q, -ell});
    for (auto [a, b] : tries)
        if (ramifies_exactly_at(a, b, ell))
            return {a, b, ell};
    throw_resource("make_algebra: no (a, b) found for ell = " + std::to_string(ell));
}

// ---- lattices ---------------------------------------------------------

Lattice Lattice::span(std::vector<Elem> const & gens)
{
    mpz_class D = 1;
    for (auto const & g : gens)
        for (auto const & x : g)
            D = lcm(D, x.get_den());
    std::vector<std::array<mpz_class, 4>> rows;
    rows.reserve(gens.size());
    for (auto const & g : gens) {
        std::array<mpz_class, 4> r;
        for (int k = 0; k < 4; ++k)
            r[k] = g[k].get_num() * (D / g[k].get_den());
        rows.push_back(std::move(r));
    }
    auto H = hnf(std::move(rows));
    std::array<Elem, 4> basis;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            basis[i][k] = mpq_class(H[i][k], D);
            basis[i][k].canonicalize();
        }
    return Lattice(std::move(basis));
}

std::array<mpq_class, 4> Lattice::rational_coordinates(Elem const & x) const
{
    // upper triangular basis: forward substitution over columns
    std::array<mpq_class, 4> c;
    for (int col = 0; col < 4; ++col) {
        mpq_class rest = x[col];
        for (int r = 0; r < col; ++r)
            rest -= c[r] * basis_[r][col];
        c[col] = rest / basis_[col][col];
    }
    return c;
}

std::optional<Coords> Lattice::coordinates(Elem const & x) const
{
    auto c = rational_coordinates(x);
    Coords out;
    for (int i = 0; i < 4; ++i) {
        if (c[i].get_den() != 1)
            return std::nullopt;
        out[i] = c[i].get_num();
    }
    return out;
}

bool Lattice::contains(Lattice const & other) const
{
    for (auto const & b : other.basis_)
        if (!contains(b))
            return false;
    return true;
}

Elem Lattice::element(Coords const & v) const
{
    Elem x{0, 0, 0, 0};
    for (int i = 0; i < 4; ++i)
        x = x + mpq_class(v[i]) * basis_[i];
    return x;
}

mpq_class Lattice::covolume() const
{
    mpq_class d = 1;
    for (int i = 0; i < 4; ++i)
        d *= basis_[i][i];
    return abs(d);
}

Lattice sum(Lattice const & L, Lattice const & M)
{
    std::vector<Elem> gens(L.basis().begin(), L.basis().end());
    gens.insert(gens.end(), M.basis().begin(), M.basis().end());
    return Lattice::span(gens);
}

Lattice intersection(Lattice const & L, Lattice const & M)
{
    return dual(sum(dual(L), dual(M)));
}

Lattice product(QuatAlgebra const & alg, Lattice const & L, Lattice const & M)
{
    std::vector<Elem> gens;
    for (auto const & x : L.basis())
        for (auto const & y : M.basis())
            gens.push_back(alg.mul(x, y));
    return Lattice::span(gens);
}

Lattice conjugate(QuatAlgebra const & alg, Lattice const & L)
{
    std::vector<Elem> gens;
    for (auto const & x : L.basis())
        gens.push_back(alg.conj(x));
    return Lattice::span(gens);
}

Lattice left_multiply(QuatAlgebra const & alg, Elem const & x, Lattice const & L)
{
    std::vector<Elem> gens;
    for (auto const & y : L.basis())
        gens.push_back(alg.mul(x, y));
    return Lattice::span(gens);
}

Lattice right_multiply(QuatAlgebra const & alg, Lattice const & L, Elem const & x)
{
    std::vector<Elem> gens;
    for (auto const & y : L.basis())
        gens.push_back(alg.mul(y, x));
    return Lattice::span(gens);
}

Lattice right_order_of(QuatAlgebra const & alg, Lattice const & I)
{
    // {x : I x in I} = intersection of e^-1 I over the basis e of I
    std::optional<Lattice> out;
    for (auto const & e : I.basis()) {
        Lattice piece = left_multiply(alg, alg.inverse(e), I);
        out = out ? intersection(*out, piece) : piece;
    }
    return *out;
}

Lattice left_order_of(QuatAlgebra const & alg, Lattice const & I)
{
    std::optional<Lattice> out;
    for (auto const & e : I.basis()) {
        Lattice piece = right_multiply(alg, I, alg.inverse(e));
        out = out ? intersection(*out, piece) : piece;
    }
    return *out;
}

std::array<std::array<mpq_class, 4>, 4> trace_gram(QuatAlgebra const & alg, Lattice const & L)
{
    std::array<std::array<mpq_class, 4>, 4> g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g[i][j] = 2 * alg.inner(L.basis()[i], L.basis()[j]);
    return g;
}

mpq_class lattice_norm(QuatAlgebra const & alg, Lattice const & L)
{
    auto const & b = L.basis();
    mpq_class g = 0;
    for (int i = 0; i < 4; ++i) {
        g = gcd_q(g, alg.nrd(b[i]));
        for (int j = i + 1; j < 4; ++j)
            g = gcd_q(g, 2 * alg.inner(b[i], b[j]));
    }
    return g;
}

bool is_integral(QuatAlgebra const & alg, Lattice const & L)
{
    auto const & b = L.basis();
    for (int i = 0; i < 4; ++i) {
        if (alg.nrd(b[i]).get_den() != 1 || alg.trd(b[i]).get_den() != 1)
            return false;
        for (int j = i + 1; j < 4; ++j)
            if (mpq_class(2 * alg.inner(b[i], b[j])).get_den() != 1)
                return false;
    }
    return true;
}

// ---- reduction and enumeration ---------------------------------------

std::array<Elem, 4> lll_basis(QuatAlgebra const & alg, Lattice const & L)
{
    std::array<Elem, 4> b = L.basis();
    mpq_class const delta(3, 4);
    std::array<std::array<mpq_class, 4>, 4> mu;
    std::array<mpq_class, 4> Bn;
    auto gso = [&] {
        std::array<Elem, 4> bs;
        for (int i = 0; i < 4; ++i) {
            bs[i] = b[i];
            for (int j = 0; j < i; ++j) {
                mu[i][j] = alg.inner(b[i], bs[j]) / Bn[j];
                bs[i] = bs[i] - mu[i][j] * bs[j];
            }
            Bn[i] = alg.inner(bs[i], bs[i]);
        }
    };
    gso();
    int k = 1;
    while (k < 4) {
        for (int j = k - 1; j >= 0; --j) {
            mpz_class r = round_q(mu[k][j]);
            if (r != 0) {
                b[k] = b[k] - mpq_class(r) * b[j];
                gso();
            }
        }
        if (Bn[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            gso();
            k = std::max(k - 1, 1);
        }
    }
    return b;
}

void for_each_close_vector(QuatAlgebra const & alg, Lattice const & L, Elem const & center,
                           mpq_class const & bound,
                           std::function<void(Elem const &)> const & visit, std::uint64_t cap)
{
    if (bound < 0)
        return;
    std::array<Elem, 4> b = lll_basis(alg, L);
    std::array<mpq_class, 4> ctr = solve_in_basis(b, center);

    // nrd(sum u_i b_i) = sum_i q[i][i] (u_i + sum_{j>i} q[i][j] u_j)^2
    std::array<std::array<mpq_class, 4>, 4> q;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            q[i][j] = alg.inner(b[i], b[j]);
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < i; ++k)
            q[i][i] -= q[k][k] * q[k][i] * q[k][i];
        if (q[i][i] <= 0)
            throw_invalid("reduced norm form is not positive definite");
        for (int j = i + 1; j < 4; ++j) {
            for (int k = 0; k < i; ++k)
                q[i][j] -= q[k][k] * q[k][i] * q[k][j];
            q[i][j] /= q[i][i];
        }
    }

    std::array<mpz_class, 4> x;
    std::array<mpq_class, 4> u;
    std::uint64_t nodes = 0;
    std::function<void(int, mpq_class const &)> rec = [&](int i, mpq_class const & R) {
        mpq_class z = 0;
        for (int j = i + 1; j < 4; ++j)
            z += q[i][j] * u[j];
        mpq_class w = ctr[i] - z;
        double s = std::sqrt(mpq_class(R / q[i][i]).get_d());
        double wd = w.get_d();
        mpz_class lo(std::floor(wd - s) - 1), hi(std::ceil(wd + s) + 1);
        for (mpz_class xi = lo; xi <= hi; ++xi) {
            if (++nodes > cap)
                throw_resource("short-vector enumeration exceeded " + std::to_string(cap) +
                               " nodes");
            mpq_class t = mpq_class(xi) - w;
            mpq_class term = q[i][i] * t * t;
            if (term > R)
                continue;
            x[i] = xi;
            u[i] = mpq_class(xi) - ctr[i];
            if (i == 0) {
                Elem e{0, 0, 0, 0};
                for (int k = 0; k < 4; ++k)
                    e = e + mpq_class(x[k]) * b[k];
                visit(e);
            } else {
                rec(i - 1, R - term);
            }
        }
    };
    rec(3, bound);
}

std::vector<Elem> vectors_of_norm(QuatAlgebra const & alg, Lattice const & L,
                                  mpq_class const & norm, std::uint64_t cap)
{
    std::vector<Elem> out;
    for_each_close_vector(alg, L, Elem{0, 0, 0, 0}, norm, [&](Elem const & x) {
        if (alg.nrd(x) == norm)
            out.push_back(x);
    }, cap);
    return out;
}

} // namespace cmfiber::quat
