#pragma once

#include <random>

#include "fcr/crystal.hpp"

namespace fcr::test {

inline Zq random_zq(RingHandle R, std::mt19937_64& rng) {
    Zq x(R);
    for (int i = 0; i < R->n; ++i) {
        Int v = 0;
        for (int k = 0; k < R->N; ++k) v = v * static_cast<long>(R->p) + static_cast<long>(rng() % R->p);
        x.c[i] = v;
    }
    return x;
}

inline PMatrix random_matrix(RingHandle R, int r, int c, std::mt19937_64& rng) {
    PMatrix m(R, r, c);
    for (auto& x : m.a) x = random_zq(R, rng);
    return m;
}

inline Int ipow(unsigned long p, int e) {
    Int r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<long>(p);
    return r;
}

// Random matrix with unit determinant.
inline PMatrix random_unimodular(RingHandle R, int r, std::mt19937_64& rng) {
    for (;;) {
        PMatrix m = random_matrix(R, r, r, rng);
        if (determinant(m).is_unit()) return m;
    }
}

// U diag(p^{e_i}) V with random unimodular U, V.
inline Crystal random_crystal(RingHandle R, const std::vector<int>& e, std::mt19937_64& rng) {
    int r = static_cast<int>(e.size());
    PMatrix D(R, r, r);
    for (int i = 0; i < r; ++i) D(i, i) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(random_unimodular(R, r, rng) * D * random_unimodular(R, r, rng));
}

}  // namespace fcr::test
