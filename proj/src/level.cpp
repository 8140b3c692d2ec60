#include "fcr/level.hpp"

#include <algorithm>

namespace fcr {

namespace {

int ceil_abs(const Rational& r) {
    long num = std::abs(r.numerator()), den = r.denominator();
    return static_cast<int>((num + den - 1) / den);
}

void fill_part(LevelPart& part, const SlopePart& s, const PMatrix& psi, int n, int c) {
    part.basis = s.basis;
    part.coords = s.coords;
    for (const auto& sl : s.slopes) part.slopes.push_back({sl.value / n - c, sl.mult});
    if (s.dim() == 0) {
        part.op = PMatrix(psi.R, 0, 0);
        return;
    }
    PMatrix img = psi * frobenius(s.basis, 1);
    part.op = s.coords * img;
    if (min_valuation(img - s.basis * part.op) < psi.R->N / 2)
        throw SplitFailed("slope part is not phi-stable at precision N = " + std::to_string(psi.R->N));
}

enum class Chain { preimage, image, both };

Lattice run_chain(const LevelPart& part, int c, Chain mode, int cap, int& iterations) {
    RingHandle R = part.op.R;
    Lattice cur = standard_lattice(R, part.dim());
    for (iterations = 0; iterations < cap; ++iterations) {
        Lattice next = cur;
        if (mode != Chain::image) next = lattice_intersect(next, lattice_preimage(part.op, c, 1, cur));
        if (mode != Chain::preimage) next = lattice_intersect(next, lattice_image(part.op, c, 1, cur));
        if (next == cur) return cur;
        cur = next;
    }
    throw NonConvergence("level-module chain did not stabilize within " + std::to_string(cap) +
                         " steps (part dimension " + std::to_string(part.dim()) + ")");
}

// span(G) + p^k R^d as a full-rank lattice over W / p^{2k}; canonical whatever the working precision.
Lattice truncated_span(const PMatrix& G, int k) {
    RingHandle T = make_ring(G.R->p, G.R->n, 2 * k);
    PMatrix B = hstack(change_ring(G, T), mul_p(PMatrix::identity(T, G.rows), k));
    return make_lattice(B, 0);
}

// Runs at different precisions agree when every invariant matches and the lattices of the
// three parts coincide in H coordinates below half the smaller precision. Part coordinates
// are not compared: the split bases themselves move with the precision.
bool same_result(const LevelModule& a, const LevelModule& b) {
    if (a.ell != b.ell || a.plus.dim() != b.plus.dim() || a.zero.dim() != b.zero.dim() ||
        a.minus.dim() != b.minus.dim() || a.plus.iterations != b.plus.iterations ||
        a.zero.iterations != b.zero.iterations || a.minus.iterations != b.minus.iterations ||
        a.zero_sides_agree != b.zero_sides_agree || a.O.scale != b.O.scale)
        return false;
    const int k = std::min(a.precision, b.precision) / 2;
    int from = 0;
    for (int dim : {a.plus.dim(), a.zero.dim(), a.minus.dim()}) {
        if (truncated_span(a.O_basis.columns(from, from + dim), k) !=
            truncated_span(b.O_basis.columns(from, from + dim), k))
            return false;
        from += dim;
    }
    return true;
}

long long powmod(long long a, long long e, long long p) {
    long long r = 1 % p;
    a %= p;
    if (a < 0) a += p;
    while (e > 0) {
        if (e & 1) r = static_cast<long long>((__int128)r * a % p);
        a = static_cast<long long>((__int128)a * a % p);
        e >>= 1;
    }
    return r;
}

// Square F_p-linear system with the least solution in lexicographic order.
class FpSystem {
public:
    FpSystem(std::vector<std::vector<long long>> T, long long p) : p_(p), m_(static_cast<int>(T.size())) {
        U_.assign(m_, std::vector<long long>(m_, 0));
        for (int i = 0; i < m_; ++i) U_[i][i] = 1;
        int row = 0;
        for (int col = 0; col < m_ && row < m_; ++col) {
            int piv = -1;
            for (int r = row; r < m_; ++r)
                if (T[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            std::swap(T[row], T[piv]);
            std::swap(U_[row], U_[piv]);
            long long inv = powmod(T[row][col], p_ - 2, p_);
            scale_row(T[row], inv);
            scale_row(U_[row], inv);
            for (int r = 0; r < m_; ++r) {
                if (r == row || T[r][col] == 0) continue;
                long long f = T[r][col];
                axpy(T[r], T[row], f);
                axpy(U_[r], U_[row], f);
            }
            pivcol_.push_back(col);
            ++row;
        }
        rref_ = T;
        std::vector<char> is_piv(m_, 0);
        for (int c : pivcol_) is_piv[c] = 1;
        std::vector<std::vector<long long>> ker;
        for (int f = 0; f < m_; ++f) {
            if (is_piv[f]) continue;
            std::vector<long long> v(m_, 0);
            v[f] = 1;
            for (size_t r = 0; r < pivcol_.size(); ++r) v[pivcol_[r]] = (p_ - rref_[r][f]) % p_;
            ker.push_back(v);
        }
        // reduced echelon form of the kernel by coordinate order
        int krow = 0;
        for (int col = 0; col < m_ && krow < static_cast<int>(ker.size()); ++col) {
            int piv = -1;
            for (int r = krow; r < static_cast<int>(ker.size()); ++r)
                if (ker[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            std::swap(ker[krow], ker[piv]);
            scale_row(ker[krow], powmod(ker[krow][col], p_ - 2, p_));
            for (int r = 0; r < static_cast<int>(ker.size()); ++r)
                if (r != krow && ker[r][col] != 0) axpy(ker[r], ker[krow], ker[r][col]);
            kpiv_.push_back(col);
            ++krow;
        }
        kernel_ = ker;
    }

    int kernel_dim() const { return static_cast<int>(kernel_.size()); }

    bool solve(const std::vector<long long>& b, std::vector<long long>& w) const {
        std::vector<long long> cvec(m_, 0);
        for (int i = 0; i < m_; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < m_; ++j) acc += (__int128)U_[i][j] * b[j];
            cvec[i] = static_cast<long long>(acc % p_);
        }
        for (int r = static_cast<int>(pivcol_.size()); r < m_; ++r)
            if (cvec[r] != 0) return false;
        w.assign(m_, 0);
        for (size_t r = 0; r < pivcol_.size(); ++r) w[pivcol_[r]] = cvec[r];
        for (size_t k = 0; k < kernel_.size(); ++k) {
            long long f = w[kpiv_[k]];
            if (f != 0) axpy(w, kernel_[k], f);
        }
        return true;
    }

private:
    void scale_row(std::vector<long long>& v, long long f) const {
        for (auto& x : v) x = static_cast<long long>((__int128)x * f % p_);
    }
    // v -= f * u
    void axpy(std::vector<long long>& v, const std::vector<long long>& u, long long f) const {
        for (size_t i = 0; i < v.size(); ++i) {
            if (u[i] == 0) continue;
            v[i] = static_cast<long long>(((__int128)v[i] - (__int128)f * u[i]) % p_);
            if (v[i] < 0) v[i] += p_;
        }
    }

    long long p_;
    int m_;
    std::vector<std::vector<long long>> U_, rref_, kernel_;
    std::vector<int> pivcol_, kpiv_;
};

std::vector<long long> flatten_residue(const PMatrix& v) {
    std::vector<long long> out;
    for (int i = 0; i < v.rows; ++i)
        for (const auto& c : v(i, 0).c) out.push_back(static_cast<long long>(Int(c % Int(v.R->p)).get_si()));
    return out;
}

// Least y with G sigma(y) - y = z, digit by digit.
PMatrix solve_unit_root(const PMatrix& G, const PMatrix& z, int digits) {
    RingHandle R = G.R;
    const int n = R->n, k = G.rows, m = n * k;
    const long long p = static_cast<long long>(R->p);
    std::vector<std::vector<long long>> T(m, std::vector<long long>(m, 0));
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < n; ++a) {
            PMatrix w(R, k, 1);
            std::vector<Int> coeff(n, 0);
            coeff[a] = 1;
            w(i, 0) = Zq(R, coeff);
            PMatrix img = G * frobenius(w, 1) - w;
            std::vector<long long> col = flatten_residue(img);
            for (int r = 0; r < m; ++r) T[r][i * n + a] = col[r];
        }
    FpSystem sys(T, p);
    PMatrix y(R, k, 1);
    for (int j = 0; j < std::min(digits, R->N); ++j) {
        PMatrix res = z - (G * frobenius(y, 1) - y);
        if (res.is_zero()) break;
        if (min_valuation(res) < j) throw Error("unit-root solver lost the congruence");
        std::vector<long long> b = flatten_residue(div_p(res, j));
        std::vector<long long> w;
        if (!sys.solve(b, w))
            throw BaseFieldTooSmall("the unit-root equation has no solution over F_" + std::to_string(R->p) +
                                        "^" + std::to_string(n) + "; extend the base field",
                                    n * static_cast<int>(R->p));
        PMatrix step(R, k, 1);
        for (int i = 0; i < k; ++i) {
            std::vector<Int> coeff(n);
            for (int a = 0; a < n; ++a) coeff[a] = static_cast<long>(w[i * n + a]);
            step(i, 0) = mul_p(Zq(R, coeff), j);
        }
        y = y + step;
    }
    return y;
}

}  // namespace

LevelModule level_module_at(const Crystal& M1, const Crystal& M2, int N) {
    if (M1.p() != M2.p() || M1.n() != M2.n()) throw ArgumentError("crystals live over different rings");
    Crystal H = hom_crystal(with_precision(M1, N), with_precision(M2, N));
    RingHandle R = H.ring();
    const int d = H.rank(), n = H.n(), c = H.scale;
    LevelModule L;
    L.hom = H;
    L.precision = N;
    SlopeSplit sp = slope_split(linearized(H), n * c);
    fill_part(L.plus, sp.plus, H.A, n, c);
    fill_part(L.zero, sp.zero, H.A, n, c);
    fill_part(L.minus, sp.minus, H.A, n, c);
    int smax = 0;
    for (const LevelPart* part : {&L.plus, &L.zero, &L.minus})
        for (const auto& s : part->slopes) smax = std::max(smax, ceil_abs(s.value));
    L.iteration_cap = 8 * d * (c + n * smax + 1);
    if (L.plus.dim() > 0) L.plus.O = run_chain(L.plus, c, Chain::preimage, L.iteration_cap, L.plus.iterations);
    if (L.minus.dim() > 0) L.minus.O = run_chain(L.minus, c, Chain::image, L.iteration_cap, L.minus.iterations);
    if (L.zero.dim() > 0) {
        Lattice fwd = run_chain(L.zero, c, Chain::preimage, L.iteration_cap, L.zero_forward_iterations);
        Lattice bwd = run_chain(L.zero, c, Chain::image, L.iteration_cap, L.zero_backward_iterations);
        L.zero.O = run_chain(L.zero, c, Chain::both, L.iteration_cap, L.zero.iterations);
        L.zero_sides_agree = fwd == bwd && fwd == L.zero.O;
    }
    PMatrix OB(R, d, 0);
    for (const LevelPart* part : {&L.plus, &L.zero, &L.minus})
        if (part->dim() > 0) OB = hstack(OB, part->basis * integral_basis(part->O));
    L.O_basis = OB;
    L.O = make_lattice(OB, 0);
    L.ell = containment_exponent(standard_lattice(R, d), L.O);
    return L;
}

LevelModule level_module(const Crystal& M1, const Crystal& M2, const LevelOptions& opt) {
    if (M1.p() != M2.p() || M1.n() != M2.n()) throw ArgumentError("crystals live over different rings");
    Crystal H = hom_crystal(M1, M2);
    int t = H.n() * H.scale;
    int N = opt.initial_precision > 0 ? opt.initial_precision : std::max(32, 2 * t * H.rank() + 16);
    std::vector<LevelModule> streak;
    std::string last_error = "no attempt";
    for (; N <= opt.max_precision; N *= 2) {
        try {
            LevelModule L = level_module_at(M1, M2, N);
            if (!streak.empty() && !same_result(streak.back(), L)) streak.clear();
            streak.push_back(std::move(L));
            if (static_cast<int>(streak.size()) >= opt.stable_runs) return streak.back();
        } catch (const PrecisionExhausted& e) {
            streak.clear();
            last_error = e.what();
        }
    }
    throw PrecisionExhausted("level module not stable below max precision " + std::to_string(opt.max_precision) +
                             " (last error: " + last_error + ")");
}

int level_torsion(const Crystal& M1, const Crystal& M2, const LevelOptions& opt) {
    return level_module(M1, M2, opt).ell;
}

PMatrix phi12_scaled(const LevelModule& L, const PMatrix& X) {
    PMatrix psi = change_ring(L.hom.A, X.R);
    return psi * frobenius(X, 1);
}

bool in_level_module(const LevelModule& L, const PMatrix& x) {
    return lattice_contains(L.O, change_ring(x, L.hom.ring()));
}

PMatrix solve_phi_minus_id(const LevelModule& L, const PMatrix& x) {
    RingHandle R = L.hom.ring();
    RingHandle Rx = x.R;
    const int d = L.hom.rank(), c = L.hom.scale;
    if (x.rows != d || x.cols != 1) throw ArgumentError("x must be a column vector in H12");
    if (Rx->N > R->N) throw ArgumentError("x has more precision than the level module");
    PMatrix xl = change_ring(x, R);
    if (!lattice_contains(L.O, xl)) throw ArgumentError("x is not in the level module O");
    ScaledInverse inv = scaled_inverse(L.O_basis);
    PMatrix z = div_p(inv.J * xl, inv.e);
    PMatrix X(R, d, 1);
    int offset = 0;
    const int series_cap = 8 * (R->N + 2) * std::max(1, d) * R->n;
    for (int which = 0; which < 3; ++which) {
        const LevelPart& part = which == 0 ? L.plus : which == 1 ? L.zero : L.minus;
        int k = part.dim();
        if (k == 0) continue;
        PMatrix zp = z.rows_range(offset, offset + k);
        offset += k;
        PMatrix B = integral_basis(part.O);
        ScaledInverse bi = scaled_inverse(B);
        PMatrix Graw = bi.J * part.op * frobenius(B, 1);
        int sh = bi.e + c;
        PMatrix y(R, k, 1);
        if (which != 2) {
            if (!Graw.is_zero() && min_valuation(Graw) < sh) throw Error("level-module part is not phi-stable");
        }
        if (which == 0) {
            PMatrix G = div_p(Graw, sh);
            PMatrix term = zp;
            int it = 0;
            for (; !term.is_zero(); ++it) {
                if (it > series_cap) throw NonConvergence("positive-slope series did not converge");
                y = y - term;
                term = G * frobenius(term, 1);
            }
        } else if (which == 2) {
            // phi^{-1} = sigma^{-1} Ginv is integral on the negative part
            ScaledInverse gi = scaled_inverse(Graw);
            int shift = sh - gi.e;
            if (shift < 0 && min_valuation(gi.J) < -shift) throw Error("inverse on the negative part is not integral");
            PMatrix Ginv = shift >= 0 ? mul_p(gi.J, shift) : div_p(gi.J, -shift);
            PMatrix term = frobenius(Ginv * zp, -1);
            int it = 0;
            for (; !term.is_zero(); ++it) {
                if (it > series_cap) throw NonConvergence("negative-slope series did not converge");
                y = y + term;
                term = frobenius(Ginv * term, -1);
            }
        } else {
            y = solve_unit_root(div_p(Graw, sh), zp, std::max(0, Rx->N - inv.e));
        }
        X = X + part.basis * (B * y);
    }
    PMatrix Xs = change_ring(X, Rx);
    PMatrix lhs = phi12_scaled(L, Xs) - mul_p(Xs, c);
    if (lhs != mul_p(x, c)) throw PrecisionExhausted("solution of phi12(X) - X = x not certified at this precision");
    return Xs;
}

}  // namespace fcr
