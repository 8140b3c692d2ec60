#pragma once

#include <vector>

#include "fcr/error.hpp"
#include "fcr/linalg.hpp"

namespace fcr {

// phi(x) = p^{-scale} A sigma(x) in column coordinates. scale = 0 is an F-crystal.
struct Crystal {
    PMatrix A;
    int scale = 0;

    RingHandle ring() const { return A.R; }
    int rank() const { return A.rows; }
    unsigned long p() const { return A.R->p; }
    int n() const { return A.R->n; }
    int precision() const { return A.R->N; }
};

// Validates shape and that det(A) does not vanish at the working precision.
Crystal make_crystal(const PMatrix& A, int scale = 0);
// Same integer entries read at another precision.
Crystal with_precision(const Crystal& M, int N);

// Largest precision the automatic raise will try.
inline int& max_auto_precision() {
    static int value = 4096;
    return value;
}

// Runs fn on M, doubling the precision on PrecisionExhausted up to max_auto_precision().
template <class Fn>
auto with_auto_precision(const Crystal& M, Fn&& fn) -> decltype(fn(M)) {
    Crystal cur = M;
    for (;;) {
        try {
            return fn(cur);
        } catch (const PrecisionExhausted&) {
            if (cur.precision() * 2 > max_auto_precision()) throw;
            cur = with_precision(cur, cur.precision() * 2);
        }
    }
}

struct HodgeData {
    std::vector<int> e;               // ascending, relative to the scale
    std::vector<int> f;               // distinct values of e
    std::vector<int> h;               // multiplicities of f
    std::vector<std::vector<int>> I;  // index blocks (0-based)
};

HodgeData hodge_slopes(const Crystal& M);
// Columns v_i with p^{-e_i} phi(v_i) again a basis; e_i as in hodge_slopes (integral part).
PMatrix f_basis(const Crystal& M);
// A sigma(A) ... sigma^{n-1}(A): the matrix of phi^n up to the factor p^{-n scale}.
PMatrix linearized(const Crystal& M);
std::vector<Slope> newton_slopes(const Crystal& M);
bool is_ordinary(const Crystal& M);
bool is_isoclinic(const Crystal& M);

Crystal twist(const Crystal& M, const PMatrix& g);
Crystal direct_sum(const Crystal& M1, const Crystal& M2);
Crystal dual(const Crystal& M);
// phi12(X) = phi2 X phi1^{-1} on r2 x r1 matrices, X(i, j) at index i * r1 + j.
Crystal hom_crystal(const Crystal& M1, const Crystal& M2);
Crystal base_extend(const Crystal& M, int m);
// Image of an element of W(F_{p^n}) in W(F_{p^{n m}}) under the fixed embedding.
Zq embed(const Zq& a, RingHandle big);
// v_i -> p^{e_i} v_{pi(i)}, pi 0-based.
Crystal permutation_crystal(unsigned long p, int n, int N, const std::vector<int>& e, const std::vector<int>& pi);

}  // namespace fcr
