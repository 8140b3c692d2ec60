#include "fcr/lattice.hpp"

#include <algorithm>

#include "fcr/error.hpp"

namespace fcr {

Lattice make_lattice(const PMatrix& B, int scale) {
    if (B.rows != B.cols && B.cols < B.rows) throw ArgumentError("lattice basis must have full rank");
    RingHandle R = B.R;
    const int N = R->N;
    PMatrix H = column_hermite(B);
    int vmax = 0;
    for (int i = 0; i < H.rows; ++i) vmax = std::max(vmax, valuation(H(i, i)));
    if (vmax >= N - 1)
        throw PrecisionExhausted("lattice pivot valuation " + std::to_string(vmax) +
                                 " exhausts precision N = " + std::to_string(N));
    int m = min_valuation(H);
    Lattice L;
    L.basis = m > 0 ? div_p(H, m) : H;
    L.scale = scale - m;
    L.precision_floor = N - vmax;
    return L;
}

Lattice standard_lattice(RingHandle R, int d) {
    Lattice L;
    L.basis = PMatrix::identity(R, d);
    L.scale = 0;
    L.precision_floor = R->N;
    return L;
}

Lattice change_ring(const Lattice& L, RingHandle R) { return make_lattice(change_ring(L.basis, R), L.scale); }

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
    int c = std::max(a.scale, b.scale);
    PMatrix A = mul_p(a.basis, c - a.scale);
    PMatrix B = mul_p(b.basis, c - b.scale);
    return make_lattice(column_hermite(hstack(A, B)), c);
}

Lattice lattice_intersect(const Lattice& a, const Lattice& b) {
    RingHandle R = a.basis.R;
    int d = a.dim();
    int c = std::max(a.scale, b.scale);
    PMatrix B1 = mul_p(a.basis, c - a.scale);
    PMatrix B2 = mul_p(b.basis, c - b.scale);
    ScaledInverse inv = scaled_inverse(B2);
    // y with B1 y in span(B2): J B1 y = 0 mod p^e
    SNF s = smith_normal_form(inv.J * B1);
    PMatrix diag(R, d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = mul_p(Zq(R, 1), std::max(0, inv.e - s.e[i]));
    return make_lattice(B1 * s.Qinv * diag, c);
}

Lattice lattice_image(const PMatrix& T, int c, long k, const Lattice& L) {
    return make_lattice(T * frobenius(L.basis, k), L.scale + c);
}

Lattice lattice_preimage(const PMatrix& T, int c, long k, const Lattice& L) {
    ScaledInverse inv = scaled_inverse(T);
    PMatrix B = inv.J * L.basis;
    return make_lattice(frobenius(B, -k), L.scale + inv.e - c);
}

bool lattice_contains(const Lattice& L, const PMatrix& v, int v_scale) {
    ScaledInverse inv = scaled_inverse(L.basis);
    PMatrix w = inv.J * v;
    if (w.is_zero()) return true;
    return min_valuation(w) >= inv.e + v_scale - L.scale;
}

int containment_exponent(const Lattice& L1, const Lattice& L2) {
    ScaledInverse inv = scaled_inverse(L2.basis);
    PMatrix W = inv.J * L1.basis;
    int mv = min_valuation(W);
    if (mv >= W.R->N) throw PrecisionExhausted("containment exponent is not certified");
    int mu = mv - inv.e;
    return std::max(0, L1.scale - L2.scale - mu);
}

PMatrix integral_basis(const Lattice& L) {
    if (L.scale > 0) {
        if (min_valuation(L.basis) < L.scale) throw ArgumentError("lattice is not integral");
        return div_p(L.basis, L.scale);
    }
    return mul_p(L.basis, -L.scale);
}

}  // namespace fcr
