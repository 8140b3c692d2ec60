#include "doctest.h"
#include "fcr/error.hpp"
#include "fcr/lattice.hpp"
#include "support.hpp"

using namespace fcr;
using fcr::test::random_matrix;

namespace {

Lattice random_lattice(RingHandle R, int d, std::mt19937_64& rng) {
    PMatrix B = random_matrix(R, d, d, rng);
    for (int j = 0; j < d; ++j) B(j, j) = mul_p(Zq(R, 1), static_cast<int>(rng() % 3)) + mul_p(B(j, j), 3);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) B(i, j) = mul_p(B(i, j), 1);
    return make_lattice(B, static_cast<int>(rng() % 3) - 1);
}

bool subset(const Lattice& a, const Lattice& b) {
    for (int j = 0; j < a.dim(); ++j)
        if (!lattice_contains(b, a.basis.column(j), a.scale)) return false;
    return true;
}

}  // namespace

TEST_CASE("canonical form does not depend on the generating set") {
    std::mt19937_64 rng(1);
    RingHandle R = make_ring(2, 2, 16);
    Lattice L = random_lattice(R, 3, rng);
    PMatrix U = PMatrix::identity(R, 3);
    U(2, 0) = test::random_zq(R, rng);
    CHECK(make_lattice(L.basis * U, L.scale) == L);
    CHECK(make_lattice(mul_p(L.basis, 2), L.scale + 2) == L);
}

TEST_CASE("sum and intersection are the lattice join and meet") {
    std::mt19937_64 rng(2);
    for (auto [p, n] : {std::pair{2ul, 1}, {3ul, 2}}) {
        RingHandle R = make_ring(p, n, 20);
        for (int it = 0; it < 10; ++it) {
            Lattice a = random_lattice(R, 3, rng), b = random_lattice(R, 3, rng);
            Lattice s = lattice_sum(a, b), m = lattice_intersect(a, b);
            CHECK(subset(a, s));
            CHECK(subset(b, s));
            CHECK(subset(m, a));
            CHECK(subset(m, b));
            CHECK(lattice_intersect(a, a) == a);
            CHECK(lattice_sum(a, b) == lattice_sum(b, a));
            CHECK(lattice_intersect(a, b) == lattice_intersect(b, a));
            // modular law sizes: [s:a] = [b:m], via containment in a common sublattice
            CHECK(lattice_intersect(s, a) == a);
            CHECK(lattice_sum(m, a) == a);
        }
    }
}

TEST_CASE("image and preimage under a semilinear operator") {
    std::mt19937_64 rng(4);
    RingHandle R = make_ring(2, 2, 24);
    for (int it = 0; it < 10; ++it) {
        PMatrix T = random_matrix(R, 2, 2, rng);
        T(0, 0) = Zq(R, 1) + mul_p(T(0, 0), 1);
        T(1, 1) = mul_p(Zq(R, 1), 2) + mul_p(T(1, 1), 3);
        T(1, 0) = mul_p(T(1, 0), 3);
        Lattice L = random_lattice(R, 2, rng);
        Lattice pre = lattice_preimage(T, 1, 1, L);
        Lattice img = lattice_image(T, 1, 1, pre);
        CHECK(img == L);
        CHECK(lattice_preimage(T, 1, 1, lattice_image(T, 1, 1, L)) == L);
    }
}

TEST_CASE("containment exponent") {
    RingHandle R = make_ring(3, 1, 12);
    Lattice std2 = standard_lattice(R, 2);
    PMatrix B = PMatrix::from_ints(R, {{9, 1}, {0, 3}});
    Lattice L = make_lattice(B);
    CHECK(containment_exponent(L, std2) == 0);
    // W^2 / L has exponent 27
    CHECK(containment_exponent(std2, L) == 3);
    Lattice Ls = make_lattice(B, 2);
    CHECK(containment_exponent(std2, Ls) == 1);
    CHECK(containment_exponent(Ls, std2) == 2);
}
