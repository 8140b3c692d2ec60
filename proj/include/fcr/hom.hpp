#pragma once

#include <string>
#include <vector>

#include "fcr/crystal.hpp"
#include "fcr/lattice.hpp"

namespace fcr {

// Hom_s(M1, M2) as a subgroup of (Z/p^s)^D, D = r1 r2 n. Coordinate (i * r1 + j) * n + a
// is the x^a coefficient of entry (i, j).
struct HomGroup {
    int s = 0;
    int r1 = 0, r2 = 0;
    RingHandle R = nullptr;          // W_s(F_{p^n})
    RingHandle lift_ring = nullptr;  // W_{s + e_r}(F_{p^n})
    std::vector<PMatrix> generators; // r2 x r1 over R
    std::vector<PMatrix> lifts;      // certified lifts over lift_ring
    Lattice lattice;                 // span of the generators plus p^s Z_p^D
    int order_exponent = 0;          // log_p of the group order

    int dim() const { return r1 * r2 * R->n; }
    bool contains(const PMatrix& h) const;
    friend bool operator==(const HomGroup& a, const HomGroup& b) { return a.s == b.s && a.lattice == b.lattice; }
};

// Integer coordinates of an r2 x r1 matrix, in the order above.
std::vector<Int> flatten_matrix(const PMatrix& X);
PMatrix unflatten_matrix(RingHandle R, int r2, int r1, const std::vector<Int>& v);
// span(gens) + p^s Z_p^dim as a lattice.
Lattice subgroup_lattice(unsigned long p, int s, int dim, const std::vector<std::vector<Int>>& gens);
int subgroup_order_exponent(const Lattice& L, int s);

// Largest Hodge exponent of M (unshifted SNF valuation), certified.
int top_hodge_exponent(const Crystal& M);

HomGroup hom_s(const Crystal& M1, const Crystal& M2, int s);
// Does X satisfy the per-vector congruences for Hom_s? X must carry s + e_r digits.
bool satisfies_hom_congruence(const Crystal& M1, const Crystal& M2, const PMatrix& X, int s);
// h over W_{s + e_r} is checked directly; h over W_s is checked against Hom_s.
bool is_automorphism_mod(const Crystal& M, const PMatrix& h, int s);

HomGroup reduce_hom(const HomGroup& H, int s);
HomGroup image_of_reduction(const Crystal& M1, const Crystal& M2, int t, int s);

struct TowerRow {
    int degree = 1;
    std::vector<int> image_orders;  // log_p |Im(pi_{1+e,1})| for e = 0..cap
    int onset = -1;                 // first e after which the image is constant, -1 if not seen
};

struct EndoNumberHat {
    std::vector<TowerRow> rows;
    bool conclusive = false;
    int e_hat = -1;
    std::string caveat;
};

EndoNumberHat endo_number_hat(const Crystal& M1, const Crystal& M2, int cap, const std::vector<int>& tower);

struct ExactSequenceReport {
    int s = 0;
    int order_s = 0, order_s1 = 0, order_1 = 0;  // log_p of |H_s|, |H_{s+1}|, |H_1|
    int kernel_order = 0;                        // log_p |ker(pi_{s+1,1})|
    int image_order = 0;                         // log_p |pi_{s+1,1}(H_{s+1})|
    bool injective = false;
    bool exact_middle = false;
    bool ok() const { return injective && exact_middle && order_s1 == kernel_order + image_order; }
};

ExactSequenceReport exact_sequence_check(const Crystal& M1, const Crystal& M2, int s);

// Block factorization N = prod Y_{lm} * X0 * prod Z_{lm} over hodge blocks f_1 < ... < f_t.
// Y_{lm} (l > m) is 1 + Y at block (l, m); Z_{lm} (l < m) is 1 + p^{f_m - f_l} Z at block (l, m).
struct BlockLDU {
    std::vector<int> f, h;
    int s = 0;
    std::vector<std::vector<PMatrix>> Y;  // Y[l][m], l > m, mod p^s
    std::vector<PMatrix> X;               // diagonal blocks, mod p^s
    std::vector<std::vector<PMatrix>> Z;  // Z[l][m], l < m, mod p^s
};

// N is read at precision s + f_t - f_1 with block (l, m), l < m, divisible by p^{f_m - f_l}.
BlockLDU block_ldu(const PMatrix& N, const std::vector<int>& f, const std::vector<int>& h, int s);
// Product of the factors over precision s + f_t - f_1 (factor entries taken as their least residues).
PMatrix block_ldu_multiply(const BlockLDU& F, RingHandle R);
// The divided block coordinates N_{lm} of a member of S, reduced mod p^s.
PMatrix block_coordinates(const PMatrix& N, const std::vector<int>& f, const std::vector<int>& h, int s);

}  // namespace fcr
