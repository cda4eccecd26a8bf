#pragma once

#include <cstdint>
#include <vector>

#include "cmfiber/local_tree.hpp"

namespace cmfiber::quad {

// The order O_c = Z + c O_K in K = Q(sqrt(dK)), dK < 0 fundamental.
class QuadOrder {
    std::int64_t dK_;
    std::int64_t c_;

public:
    // Validates dK (negative fundamental discriminant) and c >= 1.
    QuadOrder(std::int64_t dK, std::int64_t c);

    std::int64_t dK() const { return dK_; }
    std::int64_t conductor() const { return c_; }
    std::int64_t discriminant() const; // c^2 dK
};

// Primitive positive definite form a x^2 + b xy + c y^2, reduced:
// |b| <= a <= c, and b >= 0 whenever |b| = a or a = c.
struct ReducedForm {
    std::int64_t a, b, c;
    friend bool operator==(ReducedForm const &, ReducedForm const &) = default;
    friend auto operator<=>(ReducedForm const &, ReducedForm const &) = default;
};

// All primitive reduced forms of discriminant disc < 0, sorted by (a, b).
std::vector<ReducedForm> reduced_forms(std::int64_t disc);

// |Pic(O_c)| = [K[c] : K], counted as primitive reduced forms.
std::int64_t class_number(QuadOrder const & ord);
inline std::int64_t class_number(std::int64_t dK, std::int64_t c)
{
    return class_number(QuadOrder(dK, c));
}

// [K[c] : K[cS]] for cS | c.
std::int64_t ring_class_degree(QuadOrder const & ord, std::int64_t cS);

// How p behaves in Q(sqrt(dK)), read off the Kronecker symbol (dK|p).
tree::Kind splitting_kind(std::int64_t dK, std::int64_t p);

// [O_K^x : O_c^x]: 3 for (dK, c) = (-3, >1), 2 for (-4, >1), else 1.
std::int64_t unit_index(QuadOrder const & ord);

} // namespace cmfiber::quad
