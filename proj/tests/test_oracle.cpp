#include "doctest.h"
#include "fcr/oracle.hpp"
#include "support.hpp"

using namespace fcr;

namespace {

Crystal diag(unsigned long p, std::vector<int> e, int N = 12) {
    RingHandle R = make_ring(p, 1, N);
    int r = static_cast<int>(e.size());
    PMatrix A(R, r, r);
    for (int i = 0; i < r; ++i) A(i, i) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(A);
}

Crystal upper(unsigned long p, int l1, int l2, long u, int N = 12) {
    RingHandle R = make_ring(p, 1, N);
    PMatrix A(R, 2, 2);
    A(0, 0) = mul_p(Zq(R, 1), l1);
    A(0, 1) = Zq(R, u);
    A(1, 1) = mul_p(Zq(R, 1), l2);
    return make_crystal(A);
}

// 1 + p^k G over the crystal's ring for every G with entries in {0, 1}.
std::vector<PMatrix> unipotent_family(RingHandle R, int k) {
    std::vector<PMatrix> out;
    for (int mask = 0; mask < 16; ++mask) {
        PMatrix g = PMatrix::identity(R, 2);
        for (int b = 0; b < 4; ++b)
            if (mask >> b & 1) g(b / 2, b % 2) += mul_p(Zq(R, 1), k);
        out.push_back(g);
    }
    return out;
}

}  // namespace

TEST_CASE("rank-1 phi = 2 sigma: all of Z/2 passes") {
    Crystal M = diag(2, {1});
    BruteHomResult r = brute_hom_s(M, M, 1);
    CHECK(r.solutions.size() == 2);
    CHECK(r.stats.nominal == 4);
}

TEST_CASE("ordinary diag(1, 2) at s = 1: diagonal matrices only") {
    Crystal M = diag(2, {0, 1});
    BruteHomResult r = brute_hom_s(M, M, 1);
    CHECK(r.stats.nominal == 256);
    REQUIRE(r.solutions.size() == 4);
    for (const auto& X : r.solutions) {
        CHECK(X(0, 1).is_zero());
        CHECK(X(1, 0).is_zero());
    }
}

TEST_CASE("serial and parallel enumeration agree exactly") {
    std::mt19937_64 rng(2);
    RingHandle R = make_ring(2, 1, 10);
    for (int it = 0; it < 5; ++it) {
        Crystal M = test::random_crystal(R, {0, 2}, rng);
        BruteHomResult a = brute_hom_s(M, M, 2, {}, Exec::serial);
        BruteHomResult b = brute_hom_s(M, M, 2, {}, Exec::parallel);
        CHECK(a.solutions == b.solutions);
        CHECK(a.stats.evaluated == b.stats.evaluated);
        SearchStats sa, sb;
        PMatrix g = PMatrix::identity(R, 2) + mul_p(test::random_matrix(R, 2, 2, rng), 1);
        bool x = is_isomorphic_truncation(M, PMatrix::identity(R, 2), g, 2, {}, Exec::serial, &sa);
        bool y = is_isomorphic_truncation(M, PMatrix::identity(R, 2), g, 2, {}, Exec::parallel, &sb);
        CHECK(x == y);
        CHECK(sa.evaluated == sb.evaluated);
    }
}

TEST_CASE("budgets are enforced") {
    Crystal M = upper(2, 1, 2, 1);
    SearchBudget tiny;
    tiny.max_candidates = 1000;
    CHECK_THROWS_AS(brute_hom_s(M, M, 2, tiny), BudgetExceeded);
    RingHandle R = M.ring();
    CHECK_THROWS_AS(is_isomorphic_truncation(M, PMatrix::identity(R, 2), PMatrix::identity(R, 2), 3, tiny),
                    BudgetExceeded);
}

TEST_CASE("truncation isomorphism basics") {
    Crystal M = upper(2, 1, 2, 1);
    RingHandle R = M.ring();
    PMatrix one = PMatrix::identity(R, 2);
    CHECK(is_isomorphic_truncation(M, one, one, 2));
    std::mt19937_64 rng(9);
    // g = 1 mod p^s is isomorphic at level s through h = 1
    for (int s = 1; s <= 2; ++s) {
        PMatrix g = one + mul_p(test::random_matrix(R, 2, 2, rng), s);
        CHECK(is_isomorphic_truncation(M, g, one, s));
    }
}

TEST_CASE("isomorphism classes of unipotent twists") {
    Crystal M = upper(2, 1, 2, 1);
    RingHandle R = M.ring();
    // level 2 separates some g = 1 mod p from M, and no g = 1 mod p^2
    std::vector<PMatrix> fam1 = unipotent_family(R, 1);
    fam1.insert(fam1.begin(), PMatrix::identity(R, 2));
    IsomClasses c1 = brute_isom_classes(M, 2, fam1);
    CHECK(c1.classes.size() > 1);
    std::vector<PMatrix> fam2 = unipotent_family(R, 2);
    IsomClasses c2 = brute_isom_classes(M, 2, fam2);
    CHECK(c2.classes.size() == 1);
    // ordinary diag(1, p): every g = 1 mod p collapses at s = 1
    Crystal O = diag(2, {0, 1});
    IsomClasses c3 = brute_isom_classes(O, 1, unipotent_family(O.ring(), 1));
    CHECK(c3.classes.size() == 1);
}
