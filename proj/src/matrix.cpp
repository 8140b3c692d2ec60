#include "fcr/matrix.hpp"

#include "fcr/error.hpp"

namespace fcr {

PMatrix::PMatrix(RingHandle ring, int r, int c) : R(ring), rows(r), cols(c) {
    a.assign(static_cast<size_t>(r) * c, Zq(ring));
}

PMatrix PMatrix::identity(RingHandle ring, int d) {
    PMatrix m(ring, d, d);
    for (int i = 0; i < d; ++i) m(i, i) = Zq(ring, 1);
    return m;
}

PMatrix PMatrix::from_ints(RingHandle ring, const std::vector<std::vector<long>>& v) {
    int r = static_cast<int>(v.size());
    int c = r ? static_cast<int>(v[0].size()) : 0;
    PMatrix m(ring, r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(v[i].size()) != c) throw ArgumentError("ragged matrix");
        for (int j = 0; j < c; ++j) m(i, j) = Zq(ring, v[i][j]);
    }
    return m;
}

PMatrix PMatrix::column(int j) const { return columns(j, j + 1); }

PMatrix PMatrix::columns(int from, int to) const {
    PMatrix m(R, rows, to - from);
    for (int i = 0; i < rows; ++i)
        for (int j = from; j < to; ++j) m(i, j - from) = (*this)(i, j);
    return m;
}

PMatrix PMatrix::rows_range(int from, int to) const {
    PMatrix m(R, to - from, cols);
    for (int i = from; i < to; ++i)
        for (int j = 0; j < cols; ++j) m(i - from, j) = (*this)(i, j);
    return m;
}

bool PMatrix::is_zero() const {
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

PMatrix operator*(const PMatrix& x, const PMatrix& y) {
    if (x.cols != y.rows) throw ArgumentError("matrix product shape mismatch");
    PMatrix m(x.R, x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Zq& t = x(i, k);
            if (t.is_zero()) continue;
            for (int j = 0; j < y.cols; ++j)
                if (!y(k, j).is_zero()) m(i, j) += t * y(k, j);
        }
    return m;
}

PMatrix operator+(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw ArgumentError("matrix sum shape mismatch");
    PMatrix m = x;
    for (size_t i = 0; i < m.a.size(); ++i) m.a[i] += y.a[i];
    return m;
}

PMatrix operator-(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw ArgumentError("matrix difference shape mismatch");
    PMatrix m = x;
    for (size_t i = 0; i < m.a.size(); ++i) m.a[i] -= y.a[i];
    return m;
}

PMatrix operator*(const Zq& s, const PMatrix& x) {
    PMatrix m = x;
    for (auto& e : m.a) e = s * e;
    return m;
}

PMatrix frobenius(const PMatrix& x, long k) {
    PMatrix m = x;
    if (x.R->n == 1) return m;
    for (auto& e : m.a) e = frobenius_pow(e, k);
    return m;
}

PMatrix transpose(const PMatrix& x) {
    PMatrix m(x.R, x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) m(j, i) = x(i, j);
    return m;
}

PMatrix hstack(const PMatrix& x, const PMatrix& y) {
    if (x.rows != y.rows) throw ArgumentError("hstack row mismatch");
    PMatrix m(x.R, x.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) m(i, j) = x(i, j);
        for (int j = 0; j < y.cols; ++j) m(i, x.cols + j) = y(i, j);
    }
    return m;
}

PMatrix block_diag(const PMatrix& x, const PMatrix& y) {
    PMatrix m(x.R, x.rows + y.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) m(i, j) = x(i, j);
    for (int i = 0; i < y.rows; ++i)
        for (int j = 0; j < y.cols; ++j) m(x.rows + i, x.cols + j) = y(i, j);
    return m;
}

PMatrix change_ring(const PMatrix& x, RingHandle R) {
    PMatrix m(R, x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) m.a[i] = change_ring(x.a[i], R);
    return m;
}

PMatrix mul_p(const PMatrix& x, int v) {
    PMatrix m = x;
    for (auto& e : m.a) e = mul_p(e, v);
    return m;
}

PMatrix div_p(const PMatrix& x, int v) {
    PMatrix m = x;
    for (auto& e : m.a) e = div_p(e, v);
    return m;
}

PMatrix coeff_mod(const PMatrix& x, int v) {
    PMatrix m = x;
    for (auto& e : m.a) e = coeff_mod(e, v);
    return m;
}

int min_valuation(const PMatrix& x) {
    int best = x.R->N;
    for (const auto& e : x.a) best = std::min(best, valuation(e));
    return best;
}

}  // namespace fcr
