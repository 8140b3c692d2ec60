#pragma once

#include <vector>

#include "fcr/padic.hpp"

namespace fcr {

struct PMatrix {
    RingHandle R = nullptr;
    int rows = 0;
    int cols = 0;
    std::vector<Zq> a;

    PMatrix() = default;
    PMatrix(RingHandle ring, int r, int c);

    Zq& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Zq& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static PMatrix identity(RingHandle ring, int d);
    static PMatrix from_ints(RingHandle ring, const std::vector<std::vector<long>>& v);

    PMatrix column(int j) const;
    PMatrix columns(int from, int to) const;  // [from, to)
    PMatrix rows_range(int from, int to) const;
    bool is_zero() const;

    friend bool operator==(const PMatrix& x, const PMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
    friend bool operator!=(const PMatrix& x, const PMatrix& y) { return !(x == y); }
};

PMatrix operator*(const PMatrix& x, const PMatrix& y);
PMatrix operator+(const PMatrix& x, const PMatrix& y);
PMatrix operator-(const PMatrix& x, const PMatrix& y);
PMatrix operator*(const Zq& s, const PMatrix& x);

PMatrix frobenius(const PMatrix& x, long k = 1);
PMatrix transpose(const PMatrix& x);
PMatrix hstack(const PMatrix& x, const PMatrix& y);
PMatrix block_diag(const PMatrix& x, const PMatrix& y);
PMatrix change_ring(const PMatrix& x, RingHandle R);
PMatrix mul_p(const PMatrix& x, int v);
PMatrix div_p(const PMatrix& x, int v);
PMatrix coeff_mod(const PMatrix& x, int v);
// minimum entry valuation; R->N when the matrix vanishes
int min_valuation(const PMatrix& x);

}  // namespace fcr
