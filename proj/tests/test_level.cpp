#include "doctest.h"
#include "fcr/level.hpp"
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
    int r = static_cast<int>(e.size());
    PMatrix A(R, r, r);
    for (int i = 0; i < r; ++i) A(i, i) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(A);
}

}  // namespace

TEST_CASE("rank-1 pairs") {
    Crystal a = diag(2, 1, {2});
    LevelModule L = level_module(a, a);
    CHECK(L.zero.dim() == 1);
    CHECK(L.ell == 0);
    CHECK(level_torsion(diag(3, 1, {1}), diag(3, 1, {4})) == 0);
}

TEST_CASE("non-isoclinic rank-2 family has level torsion 2 lambda_1") {
    for (unsigned long p : {2ul, 3ul})
        for (auto [l1, l2] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
            Crystal M = upper(p, l1, l2, 1);
            LevelModule L = level_module(M, M);
            CHECK(L.plus.dim() == 1);
            CHECK(L.zero.dim() == 2);
            CHECK(L.minus.dim() == 1);
            CHECK(L.zero_sides_agree);
            CHECK(L.ell == 2 * l1);
        }
}

TEST_CASE("ordinary split and isoclinic permutation crystals") {
    CHECK(level_torsion(diag(2, 1, {0, 3}), diag(2, 1, {0, 3})) == 0);
    for (int e = 1; e <= 3; ++e) {
        Crystal P = permutation_crystal(2, 1, 16, {0, e}, {1, 0});
        CHECK(level_torsion(P, P) == e);
    }
}

TEST_CASE("solve phi - 1 on the level module") {
    std::mt19937_64 rng(3);
    Crystal M = upper(2, 1, 2, 1);
    LevelModule L = level_module(M, M);
    RingHandle Rx = make_ring(2, 1, 16);
    PMatrix zero(Rx, 4, 1);
    CHECK(solve_phi_minus_id(L, zero).is_zero());
    int c = L.hom.scale;
    for (int it = 0; it < 20; ++it) {
        // x = phi12(Y) - Y with Y on the phi-stable parts
        int k = L.plus.dim() + L.zero.dim();
        RingHandle RL = L.hom.ring();
        PMatrix Y = L.O_basis.columns(0, k) * test::random_matrix(RL, k, 1, rng);
        PMatrix x = change_ring(div_p(phi12_scaled(L, Y), c) - Y, Rx);
        PMatrix X = solve_phi_minus_id(L, x);
        CHECK(phi12_scaled(L, X) - mul_p(X, c) == mul_p(x, c));
        CHECK(in_level_module(L, X));
    }
    int unsolvable = 0;
    for (int it = 0; it < 20; ++it) {
        PMatrix x = change_ring(L.O_basis, Rx) * test::random_matrix(Rx, 4, 1, rng);
        try {
            PMatrix X = solve_phi_minus_id(L, x);
            CHECK(phi12_scaled(L, X) - mul_p(X, c) == mul_p(x, c));
        } catch (const BaseFieldTooSmall&) {
            ++unsolvable;
        }
    }
    // the identity endomorphism makes phi - 1 singular mod p on the slope-0 part
    CHECK(unsolvable > 0);
    // x in p^s O gives X in p^s O
    PMatrix gen = L.O_basis.column(0);
    PMatrix X = solve_phi_minus_id(L, change_ring(mul_p(div_p(phi12_scaled(L, gen), c) - gen, 3), Rx));
    PMatrix scaled = div_p(X, 3);
    CHECK(in_level_module(L, scaled));
}
