#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"
#include "cmfiber/orbits.hpp"
#include "cmfiber/quad_orders.hpp"
#include "cmfiber/quaternion.hpp"

namespace cmfiber::quat {

namespace {

mpq_class det4(std::array<std::array<mpq_class, 4>, 4> m)
{
    mpq_class det = 1;
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            return 0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (int r = col + 1; r < 4; ++r) {
            mpq_class f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j)
                m[r][j] -= f * m[col][j];
        }
    }
    return det;
}

std::int64_t to_int64(mpz_class const & z, char const * what)
{
    if (!z.fits_slong_p())
        throw_resource(std::string(what) + " does not fit in 64 bits");
    return z.get_si();
}

Elem standard(int k)
{
    Elem e{0, 0, 0, 0};
    e[k] = 1;
    return e;
}

// Closure of L under multiplication, or nullopt as soon as the lattice
// stops being integral.
std::optional<Lattice> ring_closure(QuatAlgebra const & alg, Lattice L)
{
    for (int round = 0; round < 64; ++round) {
        if (!is_integral(alg, L))
            return std::nullopt;
        std::vector<Elem> gens(L.basis().begin(), L.basis().end());
        for (auto const & x : L.basis())
            for (auto const & y : L.basis())
                gens.push_back(alg.mul(x, y));
        Lattice next = Lattice::span(gens);
        if (next == L)
            return L;
        L = std::move(next);
    }
    throw_internal("ring closure did not stabilise");
}

std::vector<Coords> sorted_coordinates(Lattice const & L, std::vector<Elem> & elems)
{
    std::vector<std::pair<Coords, Elem>> tagged;
    for (auto & e : elems)
        tagged.push_back({*L.coordinates(e), e});
    std::sort(tagged.begin(), tagged.end(),
              [](auto const & x, auto const & y) { return x.first < y.first; });
    std::vector<Coords> out;
    elems.clear();
    for (auto & [c, e] : tagged) {
        out.push_back(c);
        elems.push_back(e);
    }
    return out;
}

} // namespace

// ---- orders -----------------------------------------------------------

bool is_order(QuatAlgebra const & alg, Lattice const & L)
{
    if (!L.contains(scalar(1)) || !is_integral(alg, L))
        return false;
    for (auto const & x : L.basis())
        for (auto const & y : L.basis())
            if (!L.contains(alg.mul(x, y)))
                return false;
    return true;
}

QuatOrder make_order(QuatAlgebra const & alg, Lattice const & L)
{
    if (!is_order(alg, L))
        throw_invalid("lattice is not an order");
    mpq_class d = abs(det4(trace_gram(alg, L)));
    if (d.get_den() != 1)
        throw_internal("trace Gram determinant of an order is not integral");
    mpz_class r = sqrt(d.get_num());
    if (r * r != d.get_num())
        throw_internal("trace Gram determinant of an order is not a square");
    return {alg, L, to_int64(r, "reduced discriminant")};
}

QuatOrder maximalize(QuatAlgebra const & alg, unsigned max_rounds)
{
    QuatOrder O = make_order(alg, Lattice::span({standard(0), standard(1), standard(2),
                                                 standard(3)}));
    for (unsigned round = 0; O.red_disc != alg.ell; ++round) {
        if (round >= max_rounds)
            throw_resource("maximalize: no maximal order after " + std::to_string(max_rounds) +
                           " rounds (reduced discriminant " + std::to_string(O.red_disc) +
                           ")");
        if (O.red_disc % alg.ell != 0)
            throw_internal("reduced discriminant " + std::to_string(O.red_disc) +
                           " is prime to ell");
        bool grown = false;
        for (auto p : arith::factorize(O.red_disc / alg.ell).primes()) {
            auto const & e = O.lattice.basis();
            mpq_class const inv_p(1, p);
            // coset representatives of (1/p) O / O, lexicographic
            for (std::int64_t code = 1; code < p * p * p * p && !grown; ++code) {
                std::int64_t rest = code;
                Elem x{0, 0, 0, 0};
                for (int k = 3; k >= 0; --k) {
                    x = x + mpq_class(rest % p) * inv_p * e[k];
                    rest /= p;
                }
                if (alg.trd(x).get_den() != 1 || alg.nrd(x).get_den() != 1)
                    continue;
                std::vector<Elem> gens(e.begin(), e.end());
                gens.push_back(x);
                if (auto closed = ring_closure(alg, Lattice::span(gens))) {
                    O = make_order(alg, *closed);
                    grown = true;
                }
            }
            if (grown)
                break;
        }
        if (!grown)
            throw_internal("maximalize: no enlargement found at reduced discriminant " +
                           std::to_string(O.red_disc));
    }
    return O;
}

EichlerOrder eichler_order(QuatOrder const & max_order, std::int64_t N)
{
    auto const & alg = max_order.alg;
    if (N < 1 || std::gcd(N, alg.ell) != 1)
        throw_invalid("eichler_order: level " + std::to_string(N) + " must be positive and prime to " +
                      std::to_string(alg.ell));
    if (max_order.red_disc != alg.ell)
        throw_invalid("eichler_order: input order is not maximal");
    if (N == 1)
        return {max_order, max_order, max_order, scalar(1), 1};
    for (auto const & gamma : vectors_of_norm(alg, max_order.lattice, mpq_class(N))) {
        Elem inv = alg.inverse(gamma);
        std::vector<Elem> gens;
        for (auto const & e : max_order.lattice.basis())
            gens.push_back(alg.mul(alg.mul(gamma, e), inv));
        Lattice other = Lattice::span(gens);
        Lattice R = intersection(max_order.lattice, other);
        if (!is_order(alg, R))
            continue;
        QuatOrder ord = make_order(alg, R);
        if (ord.red_disc == alg.ell * N)
            return {ord, max_order, make_order(alg, other), gamma, N};
    }
    throw_resource("eichler_order: no element of norm " + std::to_string(N) +
                   " gives an Eichler order of level " + std::to_string(N));
}

std::vector<Elem> unit_group(QuatOrder const & ord)
{
    auto units = vectors_of_norm(ord.alg, ord.lattice, mpq_class(1));
    sorted_coordinates(ord.lattice, units);
    return units;
}

// ---- right ideal classes ---------------------------------------------

mpq_class eichler_mass(std::int64_t ell, std::int64_t N)
{
    mpq_class m(ell - 1, 24);
    m *= N;
    for (auto p : arith::factorize(N).primes())
        m *= mpq_class(p + 1, p);
    m.canonicalize();
    return m;
}

std::optional<Elem> ideal_isomorphism(QuatAlgebra const & alg, Lattice const & I,
                                      Lattice const & J)
{
    mpq_class nI = lattice_norm(alg, I), nJ = lattice_norm(alg, J);
    Lattice M = product(alg, J, conjugate(alg, I));
    for (auto const & beta : vectors_of_norm(alg, M, nI * nJ)) {
        Elem alpha = mpq_class(1 / nI) * beta;
        if (left_multiply(alg, alpha, I) == J)
            return alpha;
    }
    return std::nullopt;
}

namespace {

// The p + 1 right ideals J with pI < J < I of index p^2 in I.
std::vector<Lattice> p_neighbors(QuatAlgebra const & alg, Lattice const & R, Lattice const & I,
                                 std::int64_t p)
{
    mpq_class nI = lattice_norm(alg, I);
    auto const & e = I.basis();
    std::vector<Elem> pI;
    for (auto const & b : e)
        pI.push_back(mpq_class(p) * b);
    mpq_class const target_covolume = I.covolume() * p * p;
    std::vector<Lattice> out;
    for (std::int64_t code = 1; code < p * p * p * p; ++code) {
        std::int64_t rest = code;
        Elem x{0, 0, 0, 0};
        for (int k = 3; k >= 0; --k) {
            x = x + mpq_class(rest % p) * e[k];
            rest /= p;
        }
        mpq_class ratio = alg.nrd(x) / nI;
        if (ratio.get_den() != 1)
            throw_internal("ideal norm does not divide an element norm");
        if (ratio.get_num() % p != 0)
            continue;
        std::vector<Elem> gens = pI;
        for (auto const & r : R.basis())
            gens.push_back(alg.mul(x, r));
        Lattice J = Lattice::span(gens);
        if (J.covolume() != target_covolume)
            continue;
        if (std::find(out.begin(), out.end(), J) == out.end())
            out.push_back(std::move(J));
    }
    if (static_cast<std::int64_t>(out.size()) != p + 1)
        throw_internal("found " + std::to_string(out.size()) + " neighbours at p = " +
                       std::to_string(p) + ", expected " + std::to_string(p + 1));
    return out;
}

RightIdealClass describe(QuatOrder const & R, Lattice const & I)
{
    auto const & alg = R.alg;
    QuatOrder left = make_order(alg, left_order_of(alg, I));
    QuatOrder right = make_order(alg, right_order_of(alg, I));
    if (!(right.lattice == R.lattice))
        throw_internal("right order of a neighbour ideal differs from R");
    auto units = static_cast<std::int64_t>(unit_group(left).size());
    return {I, lattice_norm(alg, I), right, left, units};
}

} // namespace

IdealClassSet right_ideal_classes(QuatOrder const & R, std::int64_t level, unsigned max_classes)
{
    auto const & alg = R.alg;
    if (R.red_disc != alg.ell * level)
        throw_invalid("right_ideal_classes: reduced discriminant " + std::to_string(R.red_disc) +
                      " is not ell * level");
    IdealClassSet out;
    out.expected_mass = eichler_mass(alg.ell, level);
    std::int64_t p = 2;
    while (!arith::is_prime(p) || (alg.ell * level) % p == 0)
        ++p;
    out.neighbor_prime = p;

    auto add = [&](Lattice const & I) {
        out.classes.push_back(describe(R, I));
        out.mass += mpq_class(1, out.classes.back().unit_count);
    };
    add(R.lattice);
    for (std::size_t head = 0; out.mass < out.expected_mass; ++head) {
        if (head >= out.classes.size())
            throw_internal("neighbour graph exhausted with mass " + out.mass.get_str() +
                           " below " + out.expected_mass.get_str());
        Lattice I = out.classes[head].ideal;
        for (auto const & J : p_neighbors(alg, R.lattice, I, p)) {
            bool known = false;
            for (auto const & cls : out.classes)
                if (ideal_isomorphism(alg, cls.ideal, J)) {
                    known = true;
                    break;
                }
            if (known)
                continue;
            if (out.classes.size() >= max_classes)
                throw_resource("right_ideal_classes: more than " + std::to_string(max_classes) +
                               " classes");
            add(J);
            if (out.mass >= out.expected_mass)
                break;
        }
    }
    if (out.mass != out.expected_mass)
        throw_internal("mass " + out.mass.get_str() + " overshoots " +
                       out.expected_mass.get_str());
    return out;
}

// ---- embeddings -------------------------------------------------------

std::pair<std::int64_t, std::int64_t> generator_trace_norm(std::int64_t dK, std::int64_t c)
{
    if (dK >= 0 || !arith::is_fundamental_discriminant(dK))
        throw_invalid("dK = " + std::to_string(dK) + " is not a negative fundamental discriminant");
    if (c < 1)
        throw_invalid("conductor must be positive");
    using arith::checked_mul;
    std::int64_t c2 = checked_mul(c, c);
    if (arith::mod(dK, 4) == 1)
        return {checked_mul(c, dK), checked_mul(c2, checked_mul(dK, dK - 1) / 4)};
    return {0, checked_mul(c2, -dK / 4)};
}

EmbeddingSet optimal_embeddings(QuatOrder const & ord, std::int64_t dK, std::int64_t c,
                                std::uint64_t cap)
{
    auto const & alg = ord.alg;
    auto [t, n] = generator_trace_norm(dK, c);
    mpq_class const half_t(t, 2);
    auto const c_primes = arith::factorize(c).primes();

    EmbeddingSet out;
    std::vector<Elem> found;
    for_each_close_vector(alg, ord.lattice, scalar(half_t), mpq_class(n) - half_t * half_t,
                          [&](Elem const & x) {
        if (alg.trd(x) != t || alg.nrd(x) != n)
            return;
        for (auto p : c_primes)
            for (std::int64_t a = 0; a < p; ++a)
                if (ord.lattice.contains(mpq_class(1, p) * (x - scalar(a))))
                    return;
        found.push_back(x);
    }, cap);
    auto coords = sorted_coordinates(ord.lattice, found);
    out.elements = found;

    std::map<Coords, std::size_t> index;
    for (std::size_t i = 0; i < coords.size(); ++i)
        index[coords[i]] = i;
    auto index_of = [&](Elem const & y) {
        auto cy = ord.lattice.coordinates(y);
        if (!cy)
            throw_internal("conjugate of an embedding left the order");
        auto it = index.find(*cy);
        if (it == index.end())
            throw_internal("conjugate of an optimal embedding is not optimal");
        return it->second;
    };

    auto units = unit_group(ord);
    out.unit_count = static_cast<std::int64_t>(units.size());
    std::vector<std::size_t> parent(found.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < found.size(); ++i)
        for (auto const & u : units) {
            std::size_t j = index_of(alg.mul(alg.mul(u, found[i]), alg.conj(u)));
            std::size_t ri = find(i), rj = find(j);
            if (ri != rj)
                parent[std::max(ri, rj)] = std::min(ri, rj);
        }

    std::map<std::size_t, std::size_t> class_of_root;
    out.class_of.resize(found.size());
    for (std::size_t i = 0; i < found.size(); ++i) {
        std::size_t r = find(i);
        auto [it, fresh] = class_of_root.emplace(r, out.classes.size());
        if (fresh) {
            EmbeddingClass cls;
            cls.representative = found[i];
            cls.coords = coords[i];
            cls.trd = t;
            cls.nrd = n;
            out.classes.push_back(cls);
        }
        out.class_of[i] = it->second;
        out.classes[it->second].size += 1;
    }
    for (auto & cls : out.classes)
        cls.partner = out.class_of[index_of(scalar(mpq_class(t)) - cls.representative)];
    for (std::size_t k = 0; k < out.classes.size(); ++k) {
        if (out.classes[k].partner == k)
            ++out.self_paired;
        else if (out.classes[k].partner > k)
            ++out.pairs;
    }

    if (!found.empty() && arith::kronecker(dK, alg.ell) == -1 && c % alg.ell != 0) {
        ResidueField field(ord, alg.ell);
        for (auto const & x : found)
            out.element_sign.push_back(field.sign(x, found.front()));
        for (std::size_t i = 0; i < found.size(); ++i)
            if (out.classes[out.class_of[i]].representative == found[i])
                out.classes[out.class_of[i]].sign = out.element_sign[i];
    }
    return out;
}

// ---- residue field ----------------------------------------------------

namespace {

using Fq = std::pair<std::int64_t, std::int64_t>; // e0 + e1 u

Fq fq_mul(Fq x, Fq y, std::int64_t l, std::int64_t s, std::int64_t t)
{
    // u^2 = -s u - t
    std::int64_t e0 = x.first * y.first, e1 = x.first * y.second + x.second * y.first;
    std::int64_t e2 = x.second * y.second;
    return {arith::mod(e0 - t * e2, l), arith::mod(e1 - s * e2, l)};
}

// Roots of T^2 - tr T + nr in F_l[u]/(u^2 + s u + t), sorted.
std::vector<Fq> fq_roots(std::int64_t tr, std::int64_t nr, std::int64_t l, std::int64_t s,
                         std::int64_t t)
{
    std::vector<Fq> out;
    for (std::int64_t e0 = 0; e0 < l; ++e0)
        for (std::int64_t e1 = 0; e1 < l; ++e1) {
            Fq x{e0, e1};
            Fq sq = fq_mul(x, x, l, s, t);
            if (arith::mod(sq.first - tr * e0 + nr, l) == 0 &&
                arith::mod(sq.second - tr * e1, l) == 0)
                out.push_back(x);
        }
    return out;
}

std::int64_t int_of(mpq_class const & q)
{
    if (q.get_den() != 1)
        throw_internal("expected an integer");
    return to_int64(q.get_num(), "integer");
}

} // namespace

ResidueField::ResidueField(QuatOrder const & ord, std::int64_t ell)
    : ord_(ord), P_(ord.lattice), ell_(ell), s_(0), t_(0)
{
    if (!arith::is_prime(ell) || ord.red_disc % ell != 0 || (ord.red_disc / ell) % ell == 0)
        throw_invalid("ResidueField: " + std::to_string(ell) +
                      " is not the ramified prime of a level prime to it");
    auto T = trace_gram(ord.alg, ord.lattice);
    std::array<std::array<std::int64_t, 4>, 4> Tm;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            Tm[i][j] = arith::mod(int_of(T[i][j]), ell);
    auto const & e = ord.lattice.basis();
    std::vector<Elem> gens;
    for (auto const & b : e)
        gens.push_back(mpq_class(ell) * b);
    std::int64_t kernel = 0;
    for (std::int64_t code = 0; code < ell * ell * ell * ell; ++code) {
        std::array<std::int64_t, 4> v;
        std::int64_t rest = code;
        for (int k = 3; k >= 0; --k) {
            v[k] = rest % ell;
            rest /= ell;
        }
        bool in = true;
        for (int i = 0; i < 4 && in; ++i) {
            std::int64_t acc = 0;
            for (int j = 0; j < 4; ++j)
                acc += Tm[i][j] * v[j];
            in = acc % ell == 0;
        }
        if (!in)
            continue;
        ++kernel;
        Elem x{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k)
            x = x + mpq_class(v[k]) * e[k];
        gens.push_back(x);
    }
    if (kernel != ell * ell)
        throw_internal("radical of R/ell R has " + std::to_string(kernel) + " elements");
    P_ = Lattice::span(gens);
    for (auto const & b : P_.basis())
        if (ord.alg.nrd(b).get_num() % ell != 0)
            throw_internal("maximal ideal above ell contains a unit mod ell");

    for (std::int64_t s = 0; s < ell; ++s)
        for (std::int64_t t = 0; t < ell; ++t) {
            bool has_root = false;
            for (std::int64_t r = 0; r < ell && !has_root; ++r)
                has_root = arith::mod(r * r + s * r + t, ell) == 0;
            if (!has_root) {
                s_ = s;
                t_ = t;
                return;
            }
        }
    throw_internal("no irreducible quadratic mod ell");
}

int ResidueField::sign(Elem const & x, Elem const & reference) const
{
    auto const & alg = ord_.alg;
    std::int64_t const l = ell_;
    auto roots_of = [&](Elem const & y) {
        auto r = fq_roots(arith::mod(int_of(alg.trd(y)), l), arith::mod(int_of(alg.nrd(y)), l),
                          l, s_, t_);
        if (r.size() != 2 || r[0].second == 0 || r[1].second == 0)
            throw_invalid("residue_sign: element does not generate F_ell^2");
        return r;
    };
    auto ref_roots = roots_of(reference);
    auto x_roots = roots_of(x);
    if (!ord_.lattice.contains(x) || !ord_.lattice.contains(reference))
        throw_invalid("residue_sign: element not in the order");
    Fq const r = ref_roots[0];
    for (std::int64_t a = 0; a < l; ++a)
        for (std::int64_t b = 0; b < l; ++b) {
            Elem diff = x - scalar(a) - mpq_class(b) * reference;
            if (!P_.contains(diff))
                continue;
            Fq image{arith::mod(a + b * r.first, l), arith::mod(b * r.second, l)};
            if (image == x_roots[0])
                return 0;
            if (image == x_roots[1])
                return 1;
            throw_internal("image of x is not a root of its minimal polynomial");
        }
    throw_internal("x is not in F_ell + F_ell reference modulo P");
}

int residue_sign(QuatOrder const & ord, Elem const & x, std::int64_t ell, Elem const & reference)
{
    return ResidueField(ord, ell).sign(x, reference);
}

// ---- census -----------------------------------------------------------

Census embedding_census(std::int64_t ell, std::int64_t N, std::int64_t dK, std::int64_t c)
{
    if (!arith::is_prime(ell))
        throw_invalid("ell = " + std::to_string(ell) + " is not prime");
    if (N < 1 || c < 1 || std::gcd(c, ell * N) != 1 || std::gcd(N, ell) != 1)
        throw_invalid("census needs N, c >= 1 with gcd(c, ell N) = gcd(N, ell) = 1");
    auto ctx = orbits::make_context(dK, {}, N, {ell});
    if (quad::splitting_kind(dK, ell) == tree::Kind::split)
        throw error(errc::hypothesis, "H.3 violated: " + std::to_string(ell) + " splits in K");

    Census out;
    out.ell = ell;
    out.level = N;
    out.dK = dK;
    out.c = c;
    out.signs_defined = quad::splitting_kind(dK, ell) == tree::Kind::inert;

    QuatAlgebra alg = make_algebra(ell);
    EichlerOrder E = eichler_order(maximalize(alg), N);
    IdealClassSet ics = right_ideal_classes(E.order, N);
    out.ideal_classes = static_cast<std::int64_t>(ics.classes.size());

    bool sign_constant = true, sign_flipped = true;
    for (std::size_t s = 0; s < ics.classes.size(); ++s) {
        auto const & cls = ics.classes[s];
        EmbeddingSet emb = optimal_embeddings(cls.left_order, dK, c);
        CensusRow row;
        row.ideal_class = s;
        row.unit_count = cls.unit_count;
        row.elements = static_cast<std::int64_t>(emb.elements.size());
        row.classes = static_cast<std::int64_t>(emb.classes.size());
        row.pairs = emb.pairs;
        row.self_paired = emb.self_paired;
        if (!emb.element_sign.empty()) {
            for (std::size_t i = 0; i < emb.elements.size(); ++i)
                if (emb.element_sign[i] != emb.classes[emb.class_of[i]].sign)
                    sign_constant = false;
            for (auto const & ec : emb.classes) {
                (ec.sign == 0 ? row.sign0 : row.sign1) += 1;
                if (ec.sign == emb.classes[ec.partner].sign)
                    sign_flipped = false;
            }
        }
        out.totals.elements += row.elements;
        out.totals.classes += row.classes;
        out.totals.pairs += row.pairs;
        out.totals.self_paired += row.self_paired;
        out.totals.sign0 += row.sign0;
        out.totals.sign1 += row.sign1;
        out.totals.unit_count += row.unit_count;
        out.rows.push_back(row);
    }

    out.expected_total = orbits::orbit_count_BS(ctx, {c, c}) *
                         static_cast<std::uint64_t>(quad::class_number(dK, c));
    auto str = [](auto v) { return std::to_string(v); };
    out.checks.push_back({"eichler reduced discriminant", E.order.red_disc == ell * N,
                          str(ell * N), str(E.order.red_disc)});
    out.checks.push_back({"mass certificate", ics.mass == ics.expected_mass,
                          ics.expected_mass.get_str(), ics.mass.get_str()});
    out.checks.push_back({"census total",
                          static_cast<std::uint64_t>(out.totals.classes) == out.expected_total,
                          str(out.expected_total), str(out.totals.classes)});
    if (out.signs_defined) {
        out.checks.push_back({"sign halves",
                              out.totals.sign0 == out.totals.sign1 &&
                                  out.totals.sign0 + out.totals.sign1 == out.totals.classes,
                              str(out.totals.classes / 2) + "/" + str(out.totals.classes / 2),
                              str(out.totals.sign0) + "/" + str(out.totals.sign1)});
        out.checks.push_back({"sign constant on unit conjugacy classes", sign_constant, "true",
                              sign_constant ? "true" : "false"});
        out.checks.push_back({"conjugate pairing flips sign", sign_flipped, "true",
                              sign_flipped ? "true" : "false"});
        out.checks.push_back({"pairing fixed-point free", out.totals.self_paired == 0, "0",
                              str(out.totals.self_paired)});
    }
    return out;
}

} // namespace cmfiber::quat
