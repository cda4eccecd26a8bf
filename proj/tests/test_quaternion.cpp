#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "cmfiber/arith.hpp"
#include "cmfiber/error.hpp"
#include "cmfiber/quaternion.hpp"

using namespace cmfiber;
using namespace cmfiber::quat;

namespace {

Elem E(mpq_class a, mpq_class b, mpq_class c, mpq_class d)
{
    return {a, b, c, d};
}

std::set<std::int64_t> places_of(std::int64_t a, std::int64_t b)
{
    std::set<std::int64_t> out{infinity};
    for (auto p : arith::factorize(2 * std::llabs(a) * std::llabs(b)).primes())
        out.insert(p);
    return out;
}

// Elements of L with nrd = n found by scanning standard coordinates in the
// box implied by the diagonal form, on the grid (1/D) Z^4.
std::vector<Elem> box_vectors(QuatAlgebra const & alg, Lattice const & L, std::int64_t n)
{
    mpz_class D = 1;
    for (auto const & b : L.basis())
        for (auto const & x : b)
            D = lcm(D, x.get_den());
    std::int64_t d = D.get_si();
    double const w[4] = {1.0, double(-alg.a), double(-alg.b), double(alg.a * alg.b)};
    std::int64_t r[4];
    for (int k = 0; k < 4; ++k)
        r[k] = static_cast<std::int64_t>(std::floor(std::sqrt(n / w[k]) * d)) + 1;
    std::vector<Elem> out;
    for (std::int64_t x0 = -r[0]; x0 <= r[0]; ++x0)
        for (std::int64_t x1 = -r[1]; x1 <= r[1]; ++x1)
            for (std::int64_t x2 = -r[2]; x2 <= r[2]; ++x2)
                for (std::int64_t x3 = -r[3]; x3 <= r[3]; ++x3) {
                    Elem x = E(mpq_class(x0, d), mpq_class(x1, d), mpq_class(x2, d),
                               mpq_class(x3, d));
                    for (auto & c : x)
                        c.canonicalize();
                    if (alg.nrd(x) == n && L.contains(x))
                        out.push_back(x);
                }
    return out;
}

std::set<Elem> as_set(std::vector<Elem> const & v)
{
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("hilbert_symbol examples")
{
    CHECK(hilbert_symbol(-1, -1, 2) == -1);
    CHECK(hilbert_symbol(-1, -1, 3) == 1);
    CHECK(hilbert_symbol(-1, -1, infinity) == -1);
    for (std::int64_t p : {2, 3, 5, 7, 11})
        for (std::int64_t b : {-7, -3, 2, 5, 12})
            CHECK(hilbert_symbol(1, b, p) == 1);
    CHECK(hilbert_symbol(-1, -3, 3) == -1);
    CHECK(hilbert_symbol(-1, -3, 2) == 1);
    CHECK_THROWS_AS(hilbert_symbol(0, 1, 3), error);
}

TEST_CASE("hilbert_symbol satisfies the product formula and bimultiplicativity")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> d(-60, 60);
    for (int it = 0; it < 3000; ++it) {
        std::int64_t a = d(rng), b = d(rng), c = d(rng);
        if (a == 0 || b == 0 || c == 0)
            continue;
        int prod = 1;
        for (auto p : places_of(a, b))
            prod *= hilbert_symbol(a, b, p);
        CHECK(prod == 1);
        for (std::int64_t p : {2, 3, 5, 7}) {
            CHECK(hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p));
            CHECK(hilbert_symbol(a, b, p) * hilbert_symbol(a, c, p) ==
                  hilbert_symbol(a, b * c, p));
            CHECK(hilbert_symbol(a, -a, p) == 1);
            if (a != 1)
                CHECK(hilbert_symbol(a, 1 - a, p) == 1);
        }
    }
}

TEST_CASE("make_algebra ramifies exactly at ell and infinity")
{
    auto A2 = make_algebra(2);
    CHECK(A2.a == -1);
    CHECK(A2.b == -1);
    auto A3 = make_algebra(3);
    CHECK(A3.a == -1);
    CHECK(A3.b == -3);
    auto A11 = make_algebra(11);
    CHECK(A11.a == -1);
    CHECK(A11.b == -11);
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 73, 89, 97}) {
        auto A = make_algebra(ell);
        for (auto p : places_of(A.a, A.b))
            CHECK((hilbert_symbol(A.a, A.b, p) == -1) == (p == ell || p == infinity));
    }
    CHECK_THROWS_AS(make_algebra(15), error);
}

TEST_CASE("quaternion multiplication table")
{
    QuatAlgebra A{-2, -5, 5};
    Elem one = E(1, 0, 0, 0), i = E(0, 1, 0, 0), j = E(0, 0, 1, 0), k = E(0, 0, 0, 1);
    CHECK(A.mul(i, i) == E(-2, 0, 0, 0));
    CHECK(A.mul(j, j) == E(-5, 0, 0, 0));
    CHECK(A.mul(k, k) == E(-10, 0, 0, 0));
    CHECK(A.mul(i, j) == k);
    CHECK(A.mul(j, i) == E(0, 0, 0, -1));
    CHECK(A.mul(i, k) == E(0, 0, -2, 0));
    CHECK(A.mul(k, j) == E(0, -5, 0, 0));
    CHECK(A.mul(one, k) == k);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-5, 5);
    for (int it = 0; it < 200; ++it) {
        Elem x = E(d(rng), d(rng), d(rng), d(rng)), y = E(d(rng), d(rng), d(rng), d(rng)),
             z = E(d(rng), d(rng), d(rng), d(rng));
        CHECK(A.mul(A.mul(x, y), z) == A.mul(x, A.mul(y, z)));
        CHECK(A.nrd(A.mul(x, y)) == A.nrd(x) * A.nrd(y));
        CHECK(A.mul(x, A.conj(x)) == scalar(A.nrd(x)));
        if (A.nrd(x) != 0)
            CHECK(A.mul(x, A.inverse(x)) == scalar(1));
    }
}

TEST_CASE("lattice normal form, intersection and containment")
{
    Lattice Z = Lattice::span({E(1, 0, 0, 0), E(0, 1, 0, 0), E(0, 0, 1, 0), E(0, 0, 0, 1)});
    Lattice Z2 = Lattice::span({E(1, 1, 0, 0), E(0, 1, 0, 0), E(0, 0, 1, 0), E(0, 0, 1, 1),
                                E(3, 0, 0, 0)});
    CHECK(Z == Z2);
    Lattice H = Lattice::span({E(1, 0, 0, 0), E(0, 1, 0, 0), E(0, 0, 1, 0),
                               E(mpq_class(1, 2), mpq_class(1, 2), mpq_class(1, 2),
                                 mpq_class(1, 2))});
    CHECK(H.contains(Z));
    CHECK_FALSE(Z.contains(H));
    CHECK(H.covolume() == mpq_class(1, 2));
    CHECK(intersection(H, Z) == Z);
    CHECK(sum(H, Z) == H);
    Lattice evens = Lattice::span({E(2, 0, 0, 0), E(0, 1, 0, 0), E(0, 0, 1, 0), E(0, 0, 0, 1)});
    Lattice odd_mix = Lattice::span({E(1, 1, 0, 0), E(0, 2, 0, 0), E(0, 0, 1, 0), E(0, 0, 0, 1)});
    Lattice meet = intersection(evens, odd_mix);
    for (auto const & b : meet.basis()) {
        CHECK(evens.contains(b));
        CHECK(odd_mix.contains(b));
    }
    CHECK(meet.covolume() == 4);
    CHECK_THROWS_AS(Lattice::span({E(1, 0, 0, 0), E(0, 1, 0, 0), E(1, 1, 0, 0)}), error);
}

TEST_CASE("short-vector enumeration agrees with a box scan")
{
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13}) {
        auto O = maximalize(make_algebra(ell));
        for (std::int64_t n : {1, 2, 3, 4, 5, 6}) {
            INFO("ell=" << ell << " n=" << n);
            CHECK(as_set(vectors_of_norm(O.alg, O.lattice, mpq_class(n))) ==
                  as_set(box_vectors(O.alg, O.lattice, n)));
        }
    }
}

TEST_CASE("maximalize reaches reduced discriminant ell")
{
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 37}) {
        auto A = make_algebra(ell);
        auto O = maximalize(A);
        CHECK(O.red_disc == ell);
        CHECK(is_order(A, O.lattice));
        for (auto const & b : {E(1, 0, 0, 0), E(0, 1, 0, 0), E(0, 0, 1, 0), E(0, 0, 0, 1)})
            CHECK(O.lattice.contains(b));
    }
    auto H = maximalize(make_algebra(2));
    CHECK(H.lattice.contains(E(mpq_class(1, 2), mpq_class(1, 2), mpq_class(1, 2),
                               mpq_class(1, 2))));
    auto Z = make_order(make_algebra(2), Lattice::span({E(1, 0, 0, 0), E(0, 1, 0, 0),
                                                        E(0, 0, 1, 0), E(0, 0, 0, 1)}));
    CHECK(Z.red_disc == 4);
}

TEST_CASE("eichler_order certificates")
{
    auto O2 = maximalize(make_algebra(2));
    auto E1 = eichler_order(O2, 1);
    CHECK(E1.order.lattice == O2.lattice);
    auto E5 = eichler_order(O2, 5);
    CHECK(E5.order.red_disc == 10);
    CHECK(E5.r1.red_disc == 2);
    CHECK(E5.r2.red_disc == 2);
    CHECK(intersection(E5.r1.lattice, E5.r2.lattice) == E5.order.lattice);
    auto O3 = maximalize(make_algebra(3));
    CHECK(eichler_order(O3, 2).order.red_disc == 6);
    CHECK_THROWS_AS(eichler_order(O3, 3), error);
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13})
        for (std::int64_t N : {2, 3, 5, 6, 7}) {
            if (N % ell == 0)
                continue;
            CHECK(eichler_order(maximalize(make_algebra(ell)), N).order.red_disc == ell * N);
        }
}

TEST_CASE("unit groups")
{
    auto H = maximalize(make_algebra(2));
    auto U = unit_group(H);
    CHECK(U.size() == 24);
    CHECK(unit_group(maximalize(make_algebra(3))).size() == 12);
    // one class for ell = 13, so the mass 12/24 forces two units
    CHECK(unit_group(maximalize(make_algebra(13))).size() == 2);
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13}) {
        auto O = maximalize(make_algebra(ell));
        auto units = unit_group(O);
        auto S = as_set(units);
        CHECK(S.count(scalar(1)) == 1);
        CHECK(S.count(scalar(-1)) == 1);
        CHECK(units.size() % 2 == 0);
        for (auto const & u : units) {
            CHECK(S.count(O.alg.inverse(u)) == 1);
            for (auto const & v : units)
                CHECK(S.count(O.alg.mul(u, v)) == 1);
        }
    }
}

TEST_CASE("right ideal classes meet the mass")
{
    auto cls = [](std::int64_t ell, std::int64_t N) {
        auto E = eichler_order(maximalize(make_algebra(ell)), N);
        return right_ideal_classes(E.order, N);
    };
    CHECK(cls(2, 1).classes.size() == 1);
    CHECK(cls(3, 1).classes.size() == 1);
    auto c11 = cls(11, 1);
    CHECK(c11.classes.size() == 2);
    CHECK(c11.mass == mpq_class(5, 12)); // 10/24
    std::multiset<std::int64_t> units;
    for (auto const & c : c11.classes)
        units.insert(c.unit_count);
    CHECK(units == std::multiset<std::int64_t>{4, 6});
    CHECK(eichler_mass(2, 1) == mpq_class(1, 24));
    CHECK(eichler_mass(3, 2) == mpq_class(1, 4));
    for (std::int64_t ell : {2, 3, 5, 7, 11, 13})
        for (std::int64_t N : {1, 2, 3, 5}) {
            if (N % ell == 0)
                continue;
            auto s = cls(ell, N);
            INFO("ell=" << ell << " N=" << N);
            CHECK(s.mass == eichler_mass(ell, N));
            auto const & alg = s.classes.front().left_order.alg;
            for (std::size_t x = 0; x < s.classes.size(); ++x) {
                CHECK(s.classes[x].left_order.red_disc == ell * N);
                CHECK(s.classes[x].unit_count % 2 == 0);
                for (std::size_t y = x + 1; y < s.classes.size(); ++y)
                    CHECK_FALSE(ideal_isomorphism(alg, s.classes[x].ideal, s.classes[y].ideal));
            }
        }
}

TEST_CASE("ideal isomorphism is witnessed by an explicit element")
{
    auto O = maximalize(make_algebra(11));
    auto const & alg = O.alg;
    Elem alpha = E(1, 2, 0, 1);
    Lattice I = O.lattice;
    Lattice J = left_multiply(alg, alpha, I);
    auto w = ideal_isomorphism(alg, I, J);
    REQUIRE(w);
    CHECK(left_multiply(alg, *w, I) == J);
}

TEST_CASE("generator trace and norm")
{
    CHECK(generator_trace_norm(-3, 1) == std::pair<std::int64_t, std::int64_t>{-3, 3});
    CHECK(generator_trace_norm(-4, 1) == std::pair<std::int64_t, std::int64_t>{0, 1});
    CHECK(generator_trace_norm(-4, 5) == std::pair<std::int64_t, std::int64_t>{0, 25});
    CHECK(generator_trace_norm(-7, 2) == std::pair<std::int64_t, std::int64_t>{-14, 56});
}

TEST_CASE("optimal embeddings into the Hurwitz order")
{
    auto H = maximalize(make_algebra(2));
    auto emb = optimal_embeddings(H, -3, 1);
    CHECK(emb.elements.size() == 8);
    CHECK(emb.classes.size() == 2);
    CHECK(emb.pairs == 1);
    CHECK(emb.self_paired == 0);
    for (auto const & x : emb.elements) {
        CHECK(H.alg.trd(x) == -3);
        CHECK(H.alg.nrd(x) == 3);
    }
    std::set<int> bits;
    for (auto const & c : emb.classes)
        bits.insert(c.sign);
    CHECK(bits == std::set<int>{0, 1});
    // 2 splits in Q(sqrt -7): the raw count is empty
    CHECK(optimal_embeddings(H, -7, 1).classes.empty());
    auto O3 = maximalize(make_algebra(3));
    auto e3 = optimal_embeddings(O3, -4, 1);
    CHECK(e3.classes.size() == 2);
    CHECK(e3.pairs == 1);
}

TEST_CASE("optimality filter drops elements of larger orders")
{
    // every element realizing Z[2i] in the ell = 3 order comes from Z[i]
    // or is optimal, and 2x of an optimal Z[i] element is never optimal
    auto O3 = maximalize(make_algebra(3));
    auto e1 = optimal_embeddings(O3, -4, 1);
    auto e2 = optimal_embeddings(O3, -4, 2);
    auto S2 = as_set(e2.elements);
    for (auto const & x : e1.elements)
        CHECK(S2.count(mpq_class(2) * x) == 0);
    for (auto const & x : e2.elements)
        CHECK_FALSE(O3.lattice.contains(mpq_class(1, 2) * x));
}

TEST_CASE("unit orbits are exactly the reported classes")
{
    for (auto [ell, dK, c] : std::vector<std::array<std::int64_t, 3>>{
             {2, -3, 1}, {3, -4, 1}, {3, -4, 5}, {11, -3, 1}, {7, -4, 1}, {5, -3, 1}}) {
        auto O = maximalize(make_algebra(ell));
        auto emb = optimal_embeddings(O, dK, c);
        auto units = unit_group(O);
        for (std::size_t i = 0; i < emb.elements.size(); ++i) {
            std::set<Elem> orbit;
            for (auto const & u : units)
                orbit.insert(O.alg.mul(O.alg.mul(u, emb.elements[i]), O.alg.conj(u)));
            std::size_t same = 0;
            for (std::size_t j = 0; j < emb.elements.size(); ++j)
                if (emb.class_of[j] == emb.class_of[i]) {
                    ++same;
                    CHECK(orbit.count(emb.elements[j]) == 1);
                }
            CHECK(same == orbit.size());
        }
    }
}

TEST_CASE("residue sign properties")
{
    for (auto [ell, dK] : std::vector<std::array<std::int64_t, 2>>{
             {2, -3}, {3, -4}, {11, -3}, {5, -3}, {7, -4}, {11, -4}, {13, -7}}) {
        INFO("ell=" << ell << " dK=" << dK);
        REQUIRE(arith::kronecker(dK, ell) == -1);
        auto O = maximalize(make_algebra(ell));
        auto emb = optimal_embeddings(O, dK, 1);
        if (emb.elements.empty())
            continue;
        ResidueField F(O, ell);
        CHECK(F.prime().covolume() == O.lattice.covolume() * ell * ell);
        auto const & ref = emb.elements.front();
        CHECK(F.sign(ref, ref) == 0);
        auto units = unit_group(O);
        auto [t, n] = generator_trace_norm(dK, 1);
        for (auto const & x : emb.elements) {
            int s = F.sign(x, ref);
            CHECK(F.sign(scalar(mpq_class(t)) - x, ref) == 1 - s);
            for (auto const & u : units)
                CHECK(F.sign(O.alg.mul(O.alg.mul(u, x), O.alg.conj(u)), ref) == s);
        }
        CHECK(residue_sign(O, ref, ell, ref) == 0);
    }
    // not generating F_{ell^2}: 3 ramifies in Q(sqrt -3)
    auto O3 = maximalize(make_algebra(3));
    auto emb = optimal_embeddings(O3, -3, 1);
    REQUIRE_FALSE(emb.elements.empty());
    CHECK(emb.element_sign.empty());
    CHECK_THROWS_AS(residue_sign(O3, emb.elements.front(), 3, emb.elements.front()), error);
}

TEST_CASE("embedding census examples")
{
    auto total = [](std::int64_t ell, std::int64_t N, std::int64_t dK, std::int64_t c) {
        auto cen = embedding_census(ell, N, dK, c);
        CHECK(cen.ok());
        CHECK(static_cast<std::uint64_t>(cen.totals.classes) == cen.expected_total);
        return cen.totals.classes;
    };
    CHECK(total(2, 1, -3, 1) == 2);
    CHECK(total(3, 1, -4, 1) == 2);
    CHECK(total(3, 1, -4, 5) == 4);
    CHECK(total(11, 1, -3, 1) == 2);
    CHECK(total(2, 5, -3, 1) == 0);
    auto c11 = embedding_census(11, 1, -3, 1);
    CHECK(c11.ideal_classes == 2);
    auto c2 = embedding_census(2, 1, -3, 1);
    CHECK(c2.totals.pairs == 1);
    CHECK(c2.totals.sign0 == 1);
    CHECK(c2.totals.sign1 == 1);
    CHECK_THROWS_AS(embedding_census(2, 1, -7, 1), error);
    CHECK_THROWS_AS(embedding_census(3, 1, -4, 3), error);
}

TEST_CASE("census identity across levels and discriminants")
{
    for (std::int64_t ell : {2, 3, 5, 7})
        for (std::int64_t N : {1, 2, 3, 5, 7})
            for (std::int64_t dK : {-3, -4, -7, -8, -11, -15, -20})
                for (std::int64_t c : {1, 2, 3}) {
                    if (std::gcd(N, ell) != 1 || std::gcd(c, ell * N) != 1 ||
                        arith::kronecker(dK, ell) == 1)
                        continue;
                    INFO("ell=" << ell << " N=" << N << " dK=" << dK << " c=" << c);
                    auto cen = embedding_census(ell, N, dK, c);
                    for (auto const & ch : cen.checks) {
                        INFO(ch.name << ": expected " << ch.expected << " got " << ch.actual);
                        CHECK(ch.pass);
                    }
                }
}
