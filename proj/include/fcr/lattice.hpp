#pragma once

#include "fcr/linalg.hpp"

namespace fcr {

// Full-rank W-lattice p^{-scale} * (column span of basis), kept in canonical form.
struct Lattice {
    PMatrix basis;
    int scale = 0;
    int precision_floor = 0;  // digits of the basis that are trusted

    int dim() const { return basis.rows; }
    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.scale == b.scale && a.basis == b.basis;
    }
    friend bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }
};

Lattice make_lattice(const PMatrix& B, int scale = 0);
Lattice standard_lattice(RingHandle R, int d);
Lattice change_ring(const Lattice& L, RingHandle R);

Lattice lattice_sum(const Lattice& a, const Lattice& b);
Lattice lattice_intersect(const Lattice& a, const Lattice& b);
// The operator is x -> p^{-c} T sigma^k(x).
Lattice lattice_image(const PMatrix& T, int c, long k, const Lattice& L);
Lattice lattice_preimage(const PMatrix& T, int c, long k, const Lattice& L);
// Is p^{-v_scale} v in L?
bool lattice_contains(const Lattice& L, const PMatrix& v, int v_scale = 0);
// Smallest l >= 0 with p^l L1 inside L2.
int containment_exponent(const Lattice& L1, const Lattice& L2);
// Basis with the scale folded in; requires the lattice to be integral.
PMatrix integral_basis(const Lattice& L);

}  // namespace fcr
