#include <set>

#include "doctest.h"
#include "fcr/invariants.hpp"
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

Crystal diag(unsigned long p, std::vector<int> e, int N = 24) {
    RingHandle R = make_ring(p, 1, N);
    int r = static_cast<int>(e.size());
    PMatrix A(R, r, r);
    for (int i = 0; i < r; ++i) A(i, i) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(A);
}

// e constant on every cycle of pi, checked cycle by cycle.
bool cycle_constant(const std::vector<int>& e, const std::vector<int>& pi) {
    std::vector<char> done(e.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) {
        if (done[i]) continue;
        size_t j = i;
        do {
            done[j] = 1;
            if (e[j] != e[i]) return false;
            j = static_cast<size_t>(pi[j]);
        } while (j != i);
    }
    return true;
}

}  // namespace

TEST_CASE("gamma(1) on hand examples") {
    CHECK(gamma1_permutation({0, 2, 1}, {0, 1, 2}).gamma1 == 0);
    CHECK(gamma1_permutation({1, 1, 1}, {1, 2, 0}).gamma1 == 0);
    Gamma1Data g = gamma1_permutation({0, 3}, {1, 0});
    CHECK(g.gamma1 == 1);
    CHECK(g.orbit_dim == 3);
    REQUIRE(g.minus.size() == 1);
    CHECK(g.minus[0] == IndexPair{1, 0});
    CHECK(g.nu[0] == 1);
    CHECK(g.plus == std::vector<IndexPair>{{0, 1}});
}

TEST_CASE("gamma(1) data invariants") {
    for (int r = 1; r <= 4; ++r)
        for (const auto& in : permutation_instances(r, {0, 1, 2})) {
            Gamma1Data g = gamma1_permutation(in.e, in.pi);
            std::set<IndexPair> all;
            for (const auto& v : {g.plus, g.zero, g.minus}) all.insert(v.begin(), v.end());
            CHECK(static_cast<int>(all.size()) == r * r);
            CHECK(g.plus.size() + g.zero.size() + g.minus.size() == static_cast<size_t>(r * r));
            // each pair of minus_pi lands in plus at its return time, and the return time is minimal
            for (size_t k = 0; k < g.minus.size(); ++k) {
                auto [i, j] = g.minus[k];
                int a = i, b = j;
                for (int t = 1; t < g.nu[k]; ++t) {
                    a = in.pi[a];
                    b = in.pi[b];
                    CHECK(in.e[a] == in.e[b]);
                }
                a = in.pi[a];
                b = in.pi[b];
                bool lands_plus = in.e[b] > in.e[a];
                bool listed = std::find(g.minus_pi.begin(), g.minus_pi.end(), g.minus[k]) != g.minus_pi.end();
                CHECK(lands_plus == listed);
            }
        }
}

TEST_CASE("gamma(1) vanishes exactly on cycle-constant exponents") {
    for (int r = 1; r <= 4; ++r) {
        auto inst = permutation_instances(r, {0, 1, 2});
        std::vector<int> par = gamma1_sweep(inst, Exec::parallel);
        std::vector<int> ser = gamma1_sweep(inst, Exec::serial);
        CHECK(par == ser);
        for (size_t k = 0; k < inst.size(); ++k) CHECK((par[k] == 0) == cycle_constant(inst[k].e, inst[k].pi));
    }
}

TEST_CASE("gamma(1) agrees with ordinariness from the slope pipeline") {
    std::mt19937_64 rng(4);
    auto inst = permutation_instances(3, {0, 1, 2});
    for (int it = 0; it < 30; ++it) {
        const auto& in = inst[rng() % inst.size()];
        Crystal P = permutation_crystal(2, 1, 16, in.e, in.pi);
        CHECK((gamma1_permutation(in.e, in.pi).gamma1 == 0) == is_ordinary(P));
    }
}

TEST_CASE("isomorphism numbers of rank-2 families") {
    for (auto [l1, l2] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        Crystal M = upper(2, l1, l2, 1);
        IsomNumber n = isom_number(M);
        CHECK(n.n == 2 * l1);
        CHECK(n.provenance == "main-theorem");
        CHECK(rank2_closed_form(M) == 2 * l1);
    }
    for (int e = 1; e <= 3; ++e) {
        Crystal P = permutation_crystal(3, 1, 16, {0, e}, {1, 0});
        CHECK(isom_number(P).n == e);
        CHECK(rank2_closed_form(P) == e);
        Crystal D = diag(3, {0, e});
        IsomNumber n = isom_number(D);
        CHECK(n.n == 1);
        CHECK(n.provenance == "ordinary-split");
        CHECK(rank2_closed_form(D) == 1);
    }
    IsomNumber iso = isom_number(diag(2, {1, 1}));
    CHECK(iso.n == 0);
    CHECK(iso.provenance == "ordinary-isoclinic");
    CHECK_THROWS_AS(rank2_closed_form(diag(2, {0, 1, 2})), ArgumentError);
}

TEST_CASE("closed form is insensitive to a global p-power") {
    RingHandle R = make_ring(2, 1, 24);
    PMatrix A(R, 2, 2);
    A(0, 0) = mul_p(Zq(R, 1), 3);
    A(0, 1) = mul_p(Zq(R, 1), 2);
    A(1, 1) = mul_p(Zq(R, 1), 4);
    CHECK(rank2_closed_form(make_crystal(A)) == 2);
    CHECK(isom_number(make_crystal(A)).n == 2);
}

TEST_CASE("reports") {
    ReportOptions opt;
    opt.oracle = true;
    InvariantReport a = report(upper(2, 1, 2, 1), opt);
    CHECK(a.errors.empty());
    CHECK(a.all_pass());
    REQUIRE(a.e_hat);
    CHECK(a.e_hat->e_hat == 2);
    CHECK(*a.closed_form == 2);
    CHECK(a.checks.size() >= 3);

    InvariantReport b = report(diag(2, {0, 2}), opt);
    CHECK(b.all_pass());
    CHECK(*b.ell == 0);
    CHECK(b.n->n == 1);

    ReportOptions popt;
    popt.tower_sweep = false;
    popt.permutation = PermInstance{{0, 1, 2}, {1, 2, 0}};
    InvariantReport c = report(permutation_crystal(2, 1, 16, {0, 1, 2}, {1, 2, 0}), popt);
    CHECK(c.all_pass());
    CHECK_FALSE(*c.ordinary);
    CHECK(c.gamma1->gamma1 > 0);
}
