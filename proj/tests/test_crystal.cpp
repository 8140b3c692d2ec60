#include "doctest.h"
#include "fcr/crystal.hpp"
#include "support.hpp"

using namespace fcr;

namespace {

Crystal upper(unsigned long p, int l1, int l2, long u, int N = 24) {
    RingHandle R = make_ring(p, 1, N);
    PMatrix A(R, 2, 2);
    A(0, 0) = mul_p(Zq(R, 1), l1);
    A(0, 1) = Zq(R, u);
    A(1, 1) = mul_p(Zq(R, 1), l2);
    return make_crystal(A);
}

Crystal diag(unsigned long p, int n, std::vector<int> e, int N = 24) {
    RingHandle R = make_ring(p, n, N);
    PMatrix A(R, static_cast<int>(e.size()), static_cast<int>(e.size()));
    for (size_t i = 0; i < e.size(); ++i) A(static_cast<int>(i), static_cast<int>(i)) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(A);
}

Crystal random_crystal(RingHandle R, int r, int emax, std::mt19937_64& rng) {
    PMatrix U = test::random_matrix(R, r, r, rng), V = test::random_matrix(R, r, r, rng);
    for (int i = 0; i < r; ++i) {
        U(i, i) = Zq(R, 1) + mul_p(U(i, i), 1);
        V(i, i) = Zq(R, 1) + mul_p(V(i, i), 1);
        for (int j = 0; j < i; ++j) {
            U(i, j) = mul_p(U(i, j), 1);
            V(i, j) = mul_p(V(i, j), 1);
        }
    }
    PMatrix D(R, r, r);
    for (int i = 0; i < r; ++i) D(i, i) = mul_p(Zq(R, 1), static_cast<int>(rng() % (emax + 1)));
    return make_crystal(U * D * V);
}

std::vector<Rational> hodge_polygon(const HodgeData& h) {
    std::vector<Rational> v;
    for (int x : h.e) v.push_back(Rational(x));
    return v;
}

}  // namespace

TEST_CASE("Hodge slopes and blocks") {
    CHECK(hodge_slopes(diag(3, 1, {0, 3})).e == std::vector<int>{0, 3});
    for (auto [l1, l2] : {std::pair{1, 2}, {2, 3}}) CHECK(hodge_slopes(upper(2, l1, l2, 1)).e == std::vector<int>{0, l1 + l2});
    HodgeData h = hodge_slopes(permutation_crystal(2, 1, 8, {2, 0, 2, 1}, {1, 2, 3, 0}));
    CHECK(h.e == std::vector<int>{0, 1, 2, 2});
    CHECK(h.f == std::vector<int>{0, 1, 2});
    CHECK(h.h == std::vector<int>{1, 1, 2});
    CHECK(h.I == std::vector<std::vector<int>>{{0}, {1}, {2, 3}});
}

TEST_CASE("Newton slopes") {
    auto s = newton_slopes(upper(2, 1, 2, 1));
    CHECK(expand_slopes(s) == std::vector<Rational>{Rational(1), Rational(2)});
    RingHandle R = make_ring(3, 1, 10);
    Crystal C = make_crystal(PMatrix::from_ints(R, {{0, 3}, {1, 0}}));
    CHECK(expand_slopes(newton_slopes(C)) == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    CHECK(expand_slopes(newton_slopes(diag(5, 2, {2, 2}))) == std::vector<Rational>{Rational(2), Rational(2)});
    // one cycle of length 3 with exponents summing to 2
    Crystal P = permutation_crystal(2, 2, 12, {0, 1, 1, 3}, {1, 2, 0, 3});
    CHECK(expand_slopes(newton_slopes(P)) ==
          std::vector<Rational>{Rational(2, 3), Rational(2, 3), Rational(2, 3), Rational(3)});
}

TEST_CASE("ordinariness") {
    CHECK(is_ordinary(diag(2, 1, {0, 3})));
    CHECK_FALSE(is_ordinary(upper(2, 1, 2, 1)));
    CHECK_FALSE(is_ordinary(permutation_crystal(3, 1, 8, {0, 1}, {1, 0})));
    CHECK(is_ordinary(permutation_crystal(3, 1, 8, {1, 1}, {1, 0})));
    CHECK(is_isoclinic(permutation_crystal(3, 1, 8, {0, 1}, {1, 0})));
}

TEST_CASE("permutation crystal matrix") {
    Crystal P = permutation_crystal(2, 1, 6, {0, 3}, {1, 0});
    RingHandle R = P.ring();
    CHECK(P.A == PMatrix::from_ints(R, {{0, 8}, {1, 0}}));
    CHECK(permutation_crystal(2, 1, 6, {0, 0}, {0, 1}).A == PMatrix::identity(R, 2));
}

TEST_CASE("F-basis postcondition and Newton above Hodge") {
    std::mt19937_64 rng(4);
    for (auto [p, n] : {std::pair{2ul, 1}, {3ul, 1}, {2ul, 2}}) {
        RingHandle R = make_ring(p, n, 30);
        for (int it = 0; it < 10; ++it) {
            Crystal M = random_crystal(R, 3, 2, rng);
            PMatrix B = f_basis(M);
            CHECK(determinant(B).is_unit());
            HodgeData h = hodge_slopes(M);
            std::vector<Rational> ns = expand_slopes(newton_slopes(M)), hs = hodge_polygon(h);
            Rational sn(0), sh(0);
            for (size_t i = 0; i < ns.size(); ++i) {
                sn += ns[i];
                sh += hs[i];
                CHECK(sn >= sh);  // Newton polygon on or above Hodge polygon
            }
            CHECK(sn == sh);
            // twisting by a unit keeps the Hodge slopes
            PMatrix g = test::random_matrix(R, 3, 3, rng);
            for (int i = 0; i < 3; ++i) g(i, i) = Zq(R, 1) + mul_p(g(i, i), 1);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < i; ++j) g(i, j) = mul_p(g(i, j), 1);
            CHECK(hodge_slopes(twist(M, g)).e == h.e);
        }
    }
}

TEST_CASE("constructors") {
    Crystal a = diag(2, 1, {1}), b = diag(2, 1, {3});
    Crystal H = hom_crystal(a, b);
    CHECK(H.scale == 1);
    CHECK(H.A == PMatrix::from_ints(H.ring(), {{8}}));
    CHECK(hodge_slopes(direct_sum(diag(2, 1, {0, 2}), diag(2, 1, {1}))).e == std::vector<int>{0, 1, 2});
    Crystal D = dual(diag(2, 1, {0, 3}));
    CHECK(D.scale == 3);
    CHECK(expand_slopes(newton_slopes(D)) == std::vector<Rational>{Rational(-3), Rational(0)});
    RingHandle R = a.ring();
    PMatrix g = PMatrix::from_ints(R, {{1, 1}, {0, 1}});
    Crystal M = upper(2, 1, 2, 1);
    PMatrix gi = PMatrix::from_ints(M.ring(), {{1, -1}, {0, 1}});
    CHECK(twist(twist(M, change_ring(g, M.ring())), gi).A == M.A);
    CHECK_THROWS_AS(twist(M, PMatrix::from_ints(M.ring(), {{2, 0}, {0, 1}})), ArgumentError);
}

TEST_CASE("base extension") {
    std::mt19937_64 rng(6);
    for (auto [p, n] : {std::pair{2ul, 1}, {2ul, 2}, {3ul, 1}}) {
        RingHandle R = make_ring(p, n, 20);
        Crystal M = random_crystal(R, 2, 3, rng);
        for (int m : {2, 3}) {
            Crystal E = base_extend(M, m);
            CHECK(E.n() == n * m);
            CHECK(hodge_slopes(E).e == hodge_slopes(M).e);
            CHECK(newton_slopes(E) == newton_slopes(M));
            // the embedding is a ring map commuting with Frobenius
            for (int it = 0; it < 10; ++it) {
                Zq x = test::random_zq(R, rng), y = test::random_zq(R, rng);
                RingHandle B = E.ring();
                CHECK(embed(x * y, B) == embed(x, B) * embed(y, B));
                CHECK(embed(x + y, B) == embed(x, B) + embed(y, B));
                CHECK(embed(frobenius(x), B) == frobenius(embed(x, B)));
            }
        }
        CHECK(base_extend(M, 1).A == M.A);
    }
}
