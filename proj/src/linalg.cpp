#include "fcr/linalg.hpp"

#include <algorithm>

#include "fcr/error.hpp"

namespace fcr {

std::string rational_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::vector<Rational> expand_slopes(const std::vector<Slope>& s) {
    std::vector<Rational> out;
    for (const auto& x : s)
        for (int i = 0; i < x.mult; ++i) out.push_back(x.value);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void swap_rows(PMatrix& m, int i, int j) {
    if (i == j) return;
    for (int c = 0; c < m.cols; ++c) std::swap(m(i, c), m(j, c));
}

void swap_cols(PMatrix& m, int i, int j) {
    if (i == j) return;
    for (int r = 0; r < m.rows; ++r) std::swap(m(r, i), m(r, j));
}

// row_i += f * row_k
void add_row(PMatrix& m, int i, int k, const Zq& f) {
    for (int c = 0; c < m.cols; ++c)
        if (!m(k, c).is_zero()) m(i, c) += f * m(k, c);
}

void add_col(PMatrix& m, int j, int k, const Zq& f) {
    for (int r = 0; r < m.rows; ++r)
        if (!m(r, k).is_zero()) m(r, j) += f * m(r, k);
}

}  // namespace

SNF smith_normal_form(const PMatrix& A, int slack) {
    RingHandle R = A.R;
    const int N = R->N;
    int r = A.rows, c = A.cols;
    SNF s;
    PMatrix B = A;
    s.P = PMatrix::identity(R, r);
    s.Pinv = PMatrix::identity(R, r);
    s.Q = PMatrix::identity(R, c);
    s.Qinv = PMatrix::identity(R, c);
    int len = std::min(r, c);
    s.e.assign(len, N);
    for (int k = 0; k < len; ++k) {
        int bi = -1, bj = -1, bv = N;
        for (int i = k; i < r; ++i)
            for (int j = k; j < c; ++j) {
                int v = valuation(B(i, j));
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) break;
        if (slack > 0 && bv >= N - slack)
            throw PrecisionExhausted("SNF pivot of valuation " + std::to_string(bv) +
                                     " is within the precision slack of N = " + std::to_string(N));
        swap_rows(B, k, bi);
        swap_cols(s.P, k, bi);
        swap_rows(s.Pinv, k, bi);
        swap_cols(B, k, bj);
        swap_rows(s.Q, k, bj);
        swap_cols(s.Qinv, k, bj);
        Zq u = unit_part(B(k, k));
        Zq uinv = inverse(u);
        for (int j = 0; j < c; ++j) B(k, j) = B(k, j) * uinv;
        for (int i = 0; i < r; ++i) s.P(i, k) = s.P(i, k) * u;
        for (int j = 0; j < r; ++j) s.Pinv(k, j) = s.Pinv(k, j) * uinv;
        for (int i = k + 1; i < r; ++i) {
            if (B(i, k).is_zero()) continue;
            Zq f = div_p(B(i, k), bv);
            add_row(B, i, k, -f);
            add_col(s.P, k, i, f);
            add_row(s.Pinv, i, k, -f);
        }
        for (int j = k + 1; j < c; ++j) {
            if (B(k, j).is_zero()) continue;
            Zq f = div_p(B(k, j), bv);
            add_col(B, j, k, -f);
            add_row(s.Q, k, j, f);
            add_col(s.Qinv, j, k, -f);
        }
        s.e[k] = bv;
    }
    s.D = B;
    return s;
}

ScaledInverse scaled_inverse(const PMatrix& A) {
    if (A.rows != A.cols) throw ArgumentError("inverse of a non-square matrix");
    SNF s = smith_normal_form(A);
    int d = A.rows;
    int emax = 0;
    for (int v : s.e) {
        if (v >= A.R->N) throw PrecisionExhausted("matrix is singular at precision N");
        emax = std::max(emax, v);
    }
    PMatrix Dinv(A.R, d, d);
    for (int i = 0; i < d; ++i) Dinv(i, i) = mul_p(Zq(A.R, 1), emax - s.e[i]);
    return {s.Qinv * Dinv * s.Pinv, emax};
}

PMatrix column_hermite(const PMatrix& B) {
    RingHandle R = B.R;
    const int N = R->N;
    int d = B.rows, m = B.cols;
    PMatrix H = B;
    std::vector<char> used(m, 0);
    std::vector<int> piv(d, -1), pv(d, 0);
    for (int i = d - 1; i >= 0; --i) {
        int bj = -1, bv = N;
        for (int j = 0; j < m; ++j) {
            if (used[j]) continue;
            int v = valuation(H(i, j));
            if (v < bv) {
                bv = v;
                bj = j;
            }
        }
        if (bj < 0) throw PrecisionExhausted("Hermite form: basis is rank deficient at precision N");
        used[bj] = 1;
        piv[i] = bj;
        pv[i] = bv;
        Zq uinv = inverse(unit_part(H(i, bj)));
        for (int r = 0; r < d; ++r) H(r, bj) = H(r, bj) * uinv;
        for (int j = 0; j < m; ++j) {
            if (used[j] || H(i, j).is_zero()) continue;
            Zq f = div_p(H(i, j), bv);
            add_col(H, j, bj, -f);
        }
    }
    PMatrix out(R, d, d);
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < d; ++r) out(r, i) = H(r, piv[i]);
    for (int i = 0; i < d; ++i)
        for (int k = i - 1; k >= 0; --k) {
            Zq q = coeff_floor_div(out(k, i), pv[k]);
            if (q.is_zero()) continue;
            for (int r = 0; r <= k; ++r) out(r, i) -= q * out(r, k);
        }
    return out;
}

PMatrix module_kernel(const PMatrix& A) {
    SNF s = smith_normal_form(A);
    RingHandle R = A.R;
    std::vector<PMatrix> gens;
    int c = A.cols;
    for (int i = 0; i < c; ++i) {
        int ei = i < static_cast<int>(s.e.size()) ? s.e[i] : R->N;
        int shift = R->N - ei;
        if (shift >= R->N) continue;
        gens.push_back(mul_p(s.Qinv.column(i), shift));
    }
    PMatrix K(R, c, static_cast<int>(gens.size()));
    for (size_t g = 0; g < gens.size(); ++g)
        for (int r = 0; r < c; ++r) K(r, static_cast<int>(g)) = gens[g](r, 0);
    return K;
}

int span_order_exponent(const PMatrix& G) {
    if (G.cols == 0) return 0;
    SNF s = smith_normal_form(G);
    int total = 0;
    for (int v : s.e)
        if (v < G.R->N) total += (G.R->N - v) * G.R->n;
    return total;
}

bool span_contains(const PMatrix& G, const PMatrix& v) {
    if (G.cols == 0) return v.is_zero();
    SNF s = smith_normal_form(G);
    PMatrix w = s.Pinv * v;
    for (int i = 0; i < G.rows; ++i) {
        int ei = i < static_cast<int>(s.e.size()) ? s.e[i] : G.R->N;
        if (valuation(w(i, 0)) < ei) return false;
    }
    return true;
}

Poly char_poly(const PMatrix& A) {
    if (A.rows != A.cols) throw ArgumentError("char_poly of a non-square matrix");
    RingHandle R = A.R;
    int d = A.rows;
    // Berkowitz: coefficient vectors stored highest degree first
    std::vector<Zq> C = {Zq(R, 1)};
    for (int r = 0; r < d; ++r) {
        std::vector<Zq> q(r + 2, Zq(R));
        q[0] = Zq(R, 1);
        q[1] = -A(r, r);
        // powers A_r^k S applied to the column above the diagonal
        std::vector<Zq> v(r);
        for (int i = 0; i < r; ++i) v[i] = A(i, r);
        for (int k = 0; k < r; ++k) {
            Zq dot(R);
            for (int i = 0; i < r; ++i) dot += A(r, i) * v[i];
            q[k + 2] = -dot;
            std::vector<Zq> nv(r, Zq(R));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) nv[i] += A(i, j) * v[j];
            v = nv;
        }
        std::vector<Zq> next(r + 2, Zq(R));
        for (int i = 0; i < r + 2; ++i)
            for (int j = 0; j <= std::min(i, r); ++j) next[i] += q[i - j] * C[j];
        C = next;
    }
    Poly f(C.rbegin(), C.rend());
    return f;
}

Zq determinant(const PMatrix& A) {
    Poly f = char_poly(A);
    return A.rows % 2 == 0 ? f[0] : -f[0];
}

PMatrix adjugate(const PMatrix& A) {
    int d = A.rows;
    PMatrix adj(A.R, d, d);
    if (d == 1) {
        adj(0, 0) = Zq(A.R, 1);
        return adj;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            PMatrix minor(A.R, d - 1, d - 1);
            for (int r = 0, rr = 0; r < d; ++r) {
                if (r == i) continue;
                for (int c = 0, cc = 0; c < d; ++c) {
                    if (c == j) continue;
                    minor(rr, cc++) = A(r, c);
                }
                ++rr;
            }
            Zq m = determinant(minor);
            adj(j, i) = (i + j) % 2 == 0 ? m : -m;
        }
    return adj;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    RingHandle R = a[0].R;
    Poly r(a.size() + b.size() - 1, Zq(R));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

Poly poly_divmod(const Poly& a, const Poly& monic, Poly& rem) {
    RingHandle R = a[0].R;
    int dm = static_cast<int>(monic.size()) - 1;
    rem = a;
    int da = static_cast<int>(a.size()) - 1;
    if (da < dm) return {Zq(R)};
    Poly q(da - dm + 1, Zq(R));
    for (int i = da; i >= dm; --i) {
        Zq t = rem[i];
        q[i - dm] = t;
        if (t.is_zero()) continue;
        for (int j = 0; j <= dm; ++j) rem[i - dm + j] -= t * monic[j];
    }
    rem.resize(dm > 0 ? dm : 1, Zq(R));
    if (dm == 0) rem[0] = Zq(R);
    return q;
}

PMatrix poly_eval(const Poly& f, const PMatrix& A) {
    int d = A.rows;
    PMatrix I = PMatrix::identity(A.R, d);
    PMatrix M(A.R, d, d);
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) M = M * A + f[i] * I;
    return M;
}

std::vector<Slope> newton_polygon(const Poly& f) {
    if (f.empty()) throw ArgumentError("empty polynomial");
    RingHandle R = f[0].R;
    const int N = R->N;
    int d = static_cast<int>(f.size()) - 1;
    if (!f[d].is_unit()) throw ArgumentError("leading coefficient is not a unit");
    if (d == 0) return {};
    std::vector<long> xs, ys;
    for (int i = 0; i <= d; ++i) {
        int v = valuation(f[i]);
        if (v >= N) {
            if (i == 0)
                throw PrecisionExhausted("constant coefficient vanishes at precision N = " +
                                         std::to_string(N));
            continue;
        }
        xs.push_back(i);
        ys.push_back(v);
    }
    // lower hull, dropping collinear points
    std::vector<size_t> hull;
    for (size_t k = 0; k < xs.size(); ++k) {
        while (hull.size() >= 2) {
            size_t a = hull[hull.size() - 2], b = hull.back();
            long cross = (xs[b] - xs[a]) * (ys[k] - ys[a]) - (ys[b] - ys[a]) * (xs[k] - xs[a]);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    // uncertain coefficients must lie on or above the hull
    for (int i = 1; i < d; ++i) {
        if (valuation(f[i]) < N) continue;
        for (size_t h = 0; h + 1 < hull.size(); ++h) {
            long x0 = xs[hull[h]], x1 = xs[hull[h + 1]];
            if (i <= x0 || i >= x1) continue;
            Rational height = Rational(ys[hull[h]]) +
                              Rational(ys[hull[h + 1]] - ys[hull[h]], x1 - x0) * Rational(i - x0);
            if (Rational(N) < height)
                throw PrecisionExhausted("coefficient of T^" + std::to_string(i) +
                                         " is not certified and could change the Newton polygon");
        }
    }
    std::vector<Slope> out;
    for (size_t h = 0; h + 1 < hull.size(); ++h) {
        long x0 = xs[hull[h]], x1 = xs[hull[h + 1]];
        Rational s(ys[hull[h]] - ys[hull[h + 1]], x1 - x0);
        out.push_back({s, static_cast<int>(x1 - x0)});
    }
    std::sort(out.begin(), out.end(), [](const Slope& a, const Slope& b) { return a.value < b.value; });
    return out;
}

namespace {

Poly residue_poly(const Poly& f) {
    Poly r = f;
    for (auto& x : r) x = residue(x);
    return r;
}

// F = G * H with G monic carrying the roots of positive valuation.
void split_positive(const Poly& F, Poly& G, Poly& H) {
    RingHandle R = F[0].R;
    const int N = R->N;
    int d = static_cast<int>(F.size()) - 1;
    int mu = N, k = -1;
    for (int i = 0; i <= d; ++i) {
        int v = valuation(F[i]);
        if (v < mu) {
            mu = v;
            k = i;
        }
    }
    if (k < 0) throw PrecisionExhausted("polynomial vanishes at working precision");
    int Nw = N - mu;
    Poly Fp(d + 1, Zq(R));
    for (int i = 0; i <= d; ++i) Fp[i] = div_p(F[i], mu);
    if (k == 0) {
        G = {Zq(R, 1)};
        H = Fp;
        return;
    }
    G.assign(k + 1, Zq(R));
    G[k] = Zq(R, 1);
    H.assign(d - k + 1, Zq(R));
    for (int i = k; i <= d; ++i) H[i - k] = Fp[i];
    Poly hbar = residue_poly(H);
    // tbar = hbar^{-1} mod S^k over the residue field
    Poly tbar(k, Zq(R));
    Zq h0inv = inverse(hbar[0]);
    for (int i = 0; i < k; ++i) {
        Zq acc = i == 0 ? Zq(R, 1) : Zq(R);
        for (int j = 1; j <= i && j < static_cast<int>(hbar.size()); ++j) acc -= hbar[j] * tbar[i - j];
        tbar[i] = residue(acc * h0inv);
    }
    for (int j = 1; j < Nw; ++j) {
        Poly GH = poly_mul(G, H);
        Poly E(d + 1, Zq(R));
        for (int i = 0; i <= d; ++i) E[i] = Fp[i] - (i < static_cast<int>(GH.size()) ? GH[i] : Zq(R));
        for (size_t i = d + 1; i < GH.size(); ++i)
            if (valuation(GH[i]) < j) throw SplitFailed("Hensel lift degree overflow");
        Poly Eb(d + 1, Zq(R));
        for (int i = 0; i <= d; ++i) {
            if (valuation(E[i]) < j) throw SplitFailed("Hensel lift lost the congruence at step " +
                                                       std::to_string(j));
            Eb[i] = residue(div_p(E[i], j));
        }
        Poly abar = poly_mul(Eb, tbar);
        abar.resize(k, Zq(R));
        abar = residue_poly(abar);
        Poly ah = poly_mul(abar, hbar);
        Poly diff(std::max(Eb.size(), ah.size()), Zq(R));
        for (size_t i = 0; i < diff.size(); ++i) {
            if (i < Eb.size()) diff[i] += Eb[i];
            if (i < ah.size()) diff[i] -= ah[i];
            diff[i] = residue(diff[i]);
        }
        for (int i = 0; i < k; ++i)
            if (!diff[i].is_zero()) throw SplitFailed("Hensel step is inconsistent");
        for (int i = 0; i < k; ++i) G[i] += mul_p(abar[i], j);
        for (size_t i = k; i < diff.size(); ++i) {
            size_t t = i - k;
            if (t >= H.size()) {
                if (!diff[i].is_zero()) throw SplitFailed("Hensel cofactor degree overflow");
                continue;
            }
            H[t] += mul_p(diff[i], j);
        }
    }
}

Poly substitute_scaled(const Poly& f, int t) {
    Poly g = f;
    for (size_t i = 0; i < g.size(); ++i) g[i] = mul_p(g[i], static_cast<int>(t * i));
    return g;
}

Poly exact_quotient(const Poly& a, const Poly& monic) {
    Poly rem;
    Poly q = poly_divmod(a, monic, rem);
    int N = a[0].R->N;
    for (const auto& x : rem)
        if (valuation(x) < N / 2)
            throw SplitFailed("slope factor does not divide the characteristic polynomial");
    return q;
}

PMatrix kernel_of(const PMatrix& M, int k, PMatrix& coords) {
    int d = M.rows;
    RingHandle R = M.R;
    const int N = R->N;
    SNF s = smith_normal_form(M);
    if (k < d && k > 0) {
        int lo = s.e[d - k - 1], hi = s.e[d - k];
        if (lo >= N / 2 || hi < N / 2)
            throw SplitFailed("slope kernel is not separated at precision N = " + std::to_string(N));
    } else if (k == 0) {
        if (s.e[d - 1] >= N / 2) throw SplitFailed("unexpected kernel at precision N");
    }
    coords = s.Q.rows_range(d - k, d);
    return s.Qinv.columns(d - k, d);
}

}  // namespace

SlopeFactors slope_factors(const Poly& f, int t) {
    RingHandle R = f[0].R;
    const int N = R->N;
    int d = static_cast<int>(f.size()) - 1;
    SlopeFactors out;
    Poly G1, H1;
    split_positive(substitute_scaled(f, t), G1, H1);
    int k1 = static_cast<int>(G1.size()) - 1;
    out.gt.assign(k1 + 1, Zq(R));
    for (int j = 0; j <= k1; ++j) out.gt[j] = mul_p(G1[j], t * (k1 - j));
    Poly le = exact_quotient(f, out.gt);
    int m = d - k1;
    if (m == 0) {
        out.eq = {Zq(R, 1)};
        out.lt = {Zq(R, 1)};
        return out;
    }
    Poly F2 = substitute_scaled(le, t);
    if (valuation(F2[m]) >= N)
        throw PrecisionExhausted("precision N = " + std::to_string(N) + " too small for slope threshold " +
                                 std::to_string(t));
    Poly rev(F2.rbegin(), F2.rend());
    Poly G2, H2;
    split_positive(rev, G2, H2);
    int k2 = static_cast<int>(G2.size()) - 1;
    int j = m - k2;
    if (j == 0) {
        out.eq = {Zq(R, 1)};
        out.lt = le;
        return out;
    }
    if (static_cast<int>(H2.size()) <= j || !H2[j].is_unit() || !H2[0].is_unit())
        throw SplitFailed("slope-zero cofactor is not unit-normalized");
    for (size_t i = j + 1; i < H2.size(); ++i)
        if (valuation(H2[i]) < N / 2) throw SplitFailed("slope-zero cofactor has excess degree");
    Zq inv0 = inverse(H2[0]);
    // monic with roots 1/gamma, then rescale to roots p^t/gamma
    out.eq.assign(j + 1, Zq(R));
    for (int i = 0; i <= j; ++i) out.eq[i] = mul_p(H2[j - i] * inv0, t * (j - i));
    out.lt = exact_quotient(le, out.eq);
    return out;
}

SlopeSplit slope_split(const PMatrix& psi, int t) {
    if (psi.rows != psi.cols) throw ArgumentError("slope_split needs a square operator");
    int d = psi.rows;
    RingHandle R = psi.R;
    const int N = R->N;
    Poly f = char_poly(psi);
    std::vector<Slope> poly_slopes = newton_polygon(f);
    SlopeFactors fac = slope_factors(f, t);
    SlopeSplit out;
    SlopePart* parts[3] = {&out.plus, &out.zero, &out.minus};
    const Poly* factors[3] = {&fac.gt, &fac.eq, &fac.lt};
    for (const auto& s : poly_slopes) {
        if (s.value > Rational(t))
            out.plus.slopes.push_back(s);
        else if (s.value == Rational(t))
            out.zero.slopes.push_back(s);
        else
            out.minus.slopes.push_back(s);
    }
    int total = 0;
    for (int i = 0; i < 3; ++i) {
        int k = static_cast<int>(factors[i]->size()) - 1;
        int expect = 0;
        for (const auto& s : parts[i]->slopes) expect += s.mult;
        if (k != expect) throw SplitFailed("slope factor degree disagrees with the Newton polygon");
        total += k;
        if (k == 0) {
            parts[i]->basis = PMatrix(R, d, 0);
            parts[i]->coords = PMatrix(R, 0, d);
            continue;
        }
        PMatrix M = poly_eval(*factors[i], psi);
        parts[i]->basis = kernel_of(M, k, parts[i]->coords);
        // invariance: psi * basis stays in the span
        PMatrix img = psi * parts[i]->basis;
        PMatrix back = parts[i]->basis * (parts[i]->coords * img);
        if (min_valuation(img - back) < N / 2)
            throw SplitFailed("slope part is not invariant at precision N = " + std::to_string(N));
    }
    if (total != d) throw SplitFailed("slope parts do not fill the space");
    return out;
}

}  // namespace fcr
