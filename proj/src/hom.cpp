#include "fcr/hom.hpp"

#include <algorithm>
#include <exception>

namespace fcr {

namespace {

RingHandle group_ring(unsigned long p, int s) { return make_ring(p, 1, s + 3); }

void check_pair(const Crystal& M1, const Crystal& M2) {
    if (M1.p() != M2.p() || M1.n() != M2.n()) throw ArgumentError("crystals live over different rings");
    if (M1.scale != M2.scale) throw ArgumentError("Hom_s needs crystals with the same scale");
}

// Everything needed to evaluate the per-vector congruences mod p^{s + e_r}.
struct HomContext {
    int s = 0, er = 0, m = 0, r1 = 0, r2 = 0;
    std::vector<int> e;
    RingHandle Rm = nullptr;
    PMatrix P, Qinv, A2;
};

HomContext make_context(const Crystal& M1, const Crystal& M2, int s) {
    check_pair(M1, M2);
    if (s < 1) throw ArgumentError("truncation level s must be at least 1");
    HomContext ctx;
    ctx.s = s;
    ctx.r1 = M1.rank();
    ctx.r2 = M2.rank();
    int er = top_hodge_exponent(M1);
    int Nc = std::max(M1.precision(), s + er + 1);
    SNF snf = with_auto_precision(with_precision(M1, Nc), [](const Crystal& C) {
        SNF x = smith_normal_form(C.A);
        for (int v : x.e)
            if (v >= C.precision()) throw PrecisionExhausted("Hodge exponent not certified");
        return x;
    });
    ctx.e = snf.e;
    ctx.er = snf.e.back();
    ctx.m = s + ctx.er;
    ctx.Rm = make_ring(M1.p(), M1.n(), ctx.m);
    ctx.P = change_ring(snf.P, ctx.Rm);
    ctx.Qinv = change_ring(snf.Qinv, ctx.Rm);
    ctx.A2 = change_ring(M2.A, ctx.Rm);
    return ctx;
}

// Column i: p^{e_r - e_i} (X phi1(b_i) - phi2(X b_i)), which must vanish mod p^{s + e_r}.
PMatrix residual(const HomContext& ctx, const PMatrix& X) {
    PMatrix L = mul_p(X * ctx.P, ctx.er);
    PMatrix Rr = ctx.A2 * frobenius(X, 1) * ctx.Qinv;
    for (int i = 0; i < ctx.r1; ++i)
        for (int k = 0; k < ctx.r2; ++k) L(k, i) -= mul_p(Rr(k, i), ctx.er - ctx.e[i]);
    return L;
}

PMatrix unit_entry(RingHandle R, int r2, int r1, int i, int j, int a) {
    PMatrix X(R, r2, r1);
    std::vector<Int> c(R->n, 0);
    c[a] = 1;
    X(i, j) = Zq(R, c);
    return X;
}

}  // namespace

std::vector<Int> flatten_matrix(const PMatrix& X) {
    std::vector<Int> v;
    v.reserve(static_cast<size_t>(X.rows) * X.cols * X.R->n);
    for (const auto& z : X.a)
        for (const auto& c : z.c) v.push_back(c);
    return v;
}

PMatrix unflatten_matrix(RingHandle R, int r2, int r1, const std::vector<Int>& v) {
    const int n = R->n;
    if (static_cast<int>(v.size()) != r1 * r2 * n) throw ArgumentError("coordinate vector has the wrong length");
    PMatrix X(R, r2, r1);
    for (int u = 0; u < r1 * r2; ++u) {
        std::vector<Int> c(v.begin() + u * n, v.begin() + (u + 1) * n);
        for (auto& x : c) {
            x %= R->modulus();
            if (x < 0) x += R->modulus();
        }
        X.a[u] = Zq(R, c);
    }
    return X;
}

Lattice subgroup_lattice(unsigned long p, int s, int dim, const std::vector<std::vector<Int>>& gens) {
    RingHandle LR = group_ring(p, s);
    const int g = static_cast<int>(gens.size());
    PMatrix G(LR, dim, g + dim);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < dim; ++i) G(i, j) = Zq(LR, gens[j][i] % LR->pw[s]);
    for (int i = 0; i < dim; ++i) G(i, g + i) = Zq(LR, LR->pw[s]);
    return make_lattice(G, 0);
}

int subgroup_order_exponent(const Lattice& L, int s) {
    int d = L.dim();
    int index = -L.scale * d;
    for (int i = 0; i < d; ++i) index += valuation(L.basis(i, i));
    return s * d - index;
}

bool HomGroup::contains(const PMatrix& h) const {
    if (h.rows != r2 || h.cols != r1) return false;
    std::vector<Int> v = flatten_matrix(change_ring(h, R));
    RingHandle LR = lattice.basis.R;
    PMatrix col(LR, dim(), 1);
    for (int i = 0; i < dim(); ++i) col(i, 0) = Zq(LR, v[i]);
    return lattice_contains(lattice, col);
}

int top_hodge_exponent(const Crystal& M) { return hodge_slopes(M).e.back() + M.scale; }

HomGroup hom_s(const Crystal& M1, const Crystal& M2, int s) {
    HomContext ctx = make_context(M1, M2, s);
    const int n = M1.n(), r1 = ctx.r1, r2 = ctx.r2, D = r1 * r2 * n;
    RingHandle Z = make_ring(M1.p(), 1, ctx.m);
    PMatrix T(Z, r1 * r2 * n, D);
    for (int i = 0; i < r2; ++i)
        for (int j = 0; j < r1; ++j)
            for (int a = 0; a < n; ++a) {
                int u = (i * r1 + j) * n + a;
                PMatrix res = residual(ctx, unit_entry(ctx.Rm, r2, r1, i, j, a));
                for (int col = 0; col < r1; ++col)
                    for (int k = 0; k < r2; ++k)
                        for (int b = 0; b < n; ++b) T((col * r2 + k) * n + b, u) = Zq(Z, res(k, col).c[b]);
            }
    PMatrix K = module_kernel(T);
    HomGroup H;
    H.s = s;
    H.r1 = r1;
    H.r2 = r2;
    H.R = make_ring(M1.p(), n, s);
    H.lift_ring = ctx.Rm;
    std::vector<std::vector<Int>> gens;
    for (int g = 0; g < K.cols; ++g) {
        std::vector<Int> v(D);
        for (int u = 0; u < D; ++u) v[u] = K(u, g).c[0];
        PMatrix lift = unflatten_matrix(ctx.Rm, r2, r1, v);
        if (!residual(ctx, lift).is_zero()) throw Error("Hom_s kernel element fails the congruence");
        PMatrix gen = change_ring(lift, H.R);
        if (gen.is_zero()) continue;
        H.generators.push_back(gen);
        H.lifts.push_back(lift);
        gens.push_back(flatten_matrix(gen));
    }
    H.lattice = subgroup_lattice(M1.p(), s, D, gens);
    H.order_exponent = subgroup_order_exponent(H.lattice, s);
    return H;
}

bool satisfies_hom_congruence(const Crystal& M1, const Crystal& M2, const PMatrix& X, int s) {
    HomContext ctx = make_context(M1, M2, s);
    if (X.rows != ctx.r2 || X.cols != ctx.r1) throw ArgumentError("homomorphism matrix has the wrong shape");
    if (X.R->N < ctx.m) throw ArgumentError("lift must carry s + e_r digits");
    return residual(ctx, change_ring(X, ctx.Rm)).is_zero();
}

bool is_automorphism_mod(const Crystal& M, const PMatrix& h, int s) {
    if (h.rows != M.rank() || h.cols != M.rank()) throw ArgumentError("automorphism matrix has the wrong shape");
    if (!determinant(change_ring(h, make_ring(M.p(), M.n(), 1))).is_unit()) return false;
    int m = s + top_hodge_exponent(M);
    if (h.R->N >= m) return satisfies_hom_congruence(M, M, h, s);
    if (h.R->N < s) throw ArgumentError("automorphism matrix carries fewer than s digits");
    return hom_s(M, M, s).contains(h);
}

HomGroup reduce_hom(const HomGroup& H, int s) {
    if (s < 1 || s > H.s) throw ArgumentError("reduction target must satisfy 1 <= s <= t");
    if (s == H.s) return H;
    HomGroup out;
    out.s = s;
    out.r1 = H.r1;
    out.r2 = H.r2;
    out.R = with_precision(H.R, s);
    out.lift_ring = with_precision(H.lift_ring, H.lift_ring->N - H.s + s);
    std::vector<std::vector<Int>> gens;
    for (size_t g = 0; g < H.generators.size(); ++g) {
        PMatrix gen = change_ring(H.generators[g], out.R);
        if (gen.is_zero()) continue;
        out.generators.push_back(gen);
        out.lifts.push_back(change_ring(H.lifts[g], out.lift_ring));
        gens.push_back(flatten_matrix(gen));
    }
    out.lattice = subgroup_lattice(H.R->p, s, H.dim(), gens);
    out.order_exponent = subgroup_order_exponent(out.lattice, s);
    return out;
}

HomGroup image_of_reduction(const Crystal& M1, const Crystal& M2, int t, int s) {
    if (t < s) throw ArgumentError("image of reduction needs t >= s");
    return reduce_hom(hom_s(M1, M2, t), s);
}

EndoNumberHat endo_number_hat(const Crystal& M1, const Crystal& M2, int cap, const std::vector<int>& tower) {
    if (cap < 1) throw ArgumentError("cap must be at least 1");
    if (tower.empty()) throw ArgumentError("tower must list at least one degree");
    std::vector<int> degrees = tower;
    std::sort(degrees.begin(), degrees.end());
    EndoNumberHat out;
    out.rows.resize(degrees.size());
    std::vector<std::exception_ptr> errors(degrees.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < static_cast<int>(degrees.size()); ++k) {
        try {
            TowerRow row;
            row.degree = degrees[k];
            Crystal E1 = base_extend(M1, degrees[k]);
            Crystal E2 = base_extend(M2, degrees[k]);
            std::vector<Lattice> images;
            for (int e = 0; e <= cap; ++e) {
                HomGroup I = image_of_reduction(E1, E2, 1 + e, 1);
                images.push_back(I.lattice);
                row.image_orders.push_back(I.order_exponent);
            }
            int onset = cap;
            while (onset > 0 && images[onset - 1] == images[cap]) --onset;
            row.onset = onset < cap ? onset : -1;
            out.rows[k] = row;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    out.caveat =
        "images are computed on points over finite fields; the value is a proxy for the invariant over an "
        "algebraically closed field and is exact once it no longer changes along the tower";
    if (out.rows.size() >= 2) {
        const TowerRow& a = out.rows[out.rows.size() - 2];
        const TowerRow& b = out.rows.back();
        out.conclusive = a.onset >= 0 && a.onset == b.onset;
    } else {
        out.conclusive = out.rows[0].onset >= 0;
    }
    if (out.conclusive) out.e_hat = out.rows.back().onset;
    return out;
}

ExactSequenceReport exact_sequence_check(const Crystal& M1, const Crystal& M2, int s) {
    if (s < 1) throw ArgumentError("s must be at least 1");
    ExactSequenceReport rep;
    rep.s = s;
    HomGroup Hs = hom_s(M1, M2, s);
    HomGroup Hs1 = hom_s(M1, M2, s + 1);
    HomGroup H1 = hom_s(M1, M2, 1);
    rep.order_s = Hs.order_exponent;
    rep.order_s1 = Hs1.order_exponent;
    rep.order_1 = H1.order_exponent;
    const int D = Hs.dim();
    RingHandle LR = group_ring(M1.p(), s + 1);
    // p * H_s inside (Z/p^{s+1})^D
    Lattice pHs = change_ring(Hs.lattice, LR);
    pHs.scale -= 1;
    rep.injective = subgroup_order_exponent(pHs, s + 1) == rep.order_s;
    Lattice L1 = change_ring(Hs1.lattice, LR);
    Lattice pZ = standard_lattice(LR, D);
    pZ.scale = -1;
    Lattice ker = lattice_intersect(L1, pZ);
    rep.kernel_order = subgroup_order_exponent(ker, s + 1);
    HomGroup img = reduce_hom(Hs1, 1);
    rep.image_order = img.order_exponent;
    bool image_inside = true;
    for (const auto& g : img.generators) image_inside = image_inside && H1.contains(g);
    rep.exact_middle = ker == pHs && image_inside;
    return rep;
}

namespace {

int block_start(const std::vector<int>& h, int l) {
    int o = 0;
    for (int i = 0; i < l; ++i) o += h[i];
    return o;
}

PMatrix sub(const PMatrix& M, int r0, int r1, int c0, int c1) {
    PMatrix out(M.R, r1 - r0, c1 - c0);
    for (int i = r0; i < r1; ++i)
        for (int j = c0; j < c1; ++j) out(i - r0, j - c0) = M(i, j);
    return out;
}

void put(PMatrix& M, const PMatrix& B, int r0, int c0) {
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) M(r0 + i, c0 + j) = B(i, j);
}

void check_blocks(const std::vector<int>& f, const std::vector<int>& h, int r) {
    if (f.empty() || f.size() != h.size()) throw ArgumentError("block data f and h must have equal nonzero length");
    int total = 0;
    for (size_t i = 0; i < f.size(); ++i) {
        if (h[i] < 1) throw ArgumentError("block sizes must be positive");
        if (i > 0 && f[i] <= f[i - 1]) throw ArgumentError("block exponents must be strictly increasing");
        total += h[i];
    }
    if (total != r) throw ArgumentError("block sizes do not add up to the matrix size");
}

// Leading t blocks of M, already at the working precision.
void ldu_rec(const PMatrix& M, int t, const std::vector<int>& f, const std::vector<int>& h, BlockLDU& out,
             RingHandle Rs) {
    if (t == 1) {
        out.X[0] = change_ring(M, Rs);
        return;
    }
    int off = block_start(h, t - 1), end = off + h[t - 1];
    PMatrix A = sub(M, 0, off, 0, off), B = sub(M, 0, off, off, end);
    PMatrix C = sub(M, off, end, 0, off), Dm = sub(M, off, end, off, end);
    ScaledInverse ai = scaled_inverse(A);
    if (ai.e != 0) throw ArgumentError("leading block of the first " + std::to_string(t - 1) + " blocks is not invertible");
    PMatrix Yt = C * ai.J;
    PMatrix Zt = ai.J * B;
    out.X[t - 1] = change_ring(Dm - C * Zt, Rs);
    for (int m = 0; m < t - 1; ++m) {
        int c0 = block_start(h, m);
        out.Y[t - 1][m] = change_ring(sub(Yt, 0, h[t - 1], c0, c0 + h[m]), Rs);
    }
    for (int l = 0; l < t - 1; ++l) {
        int r0 = block_start(h, l);
        PMatrix blk = sub(Zt, r0, r0 + h[l], 0, h[t - 1]);
        int sh = f[t - 1] - f[l];
        if (!blk.is_zero() && min_valuation(blk) < sh)
            throw Error("block (" + std::to_string(l + 1) + "," + std::to_string(t) + ") of the Z factor is not divisible");
        out.Z[l][t - 1] = change_ring(div_p(blk, sh), Rs);
    }
    ldu_rec(A, t - 1, f, h, out, Rs);
}

}  // namespace

PMatrix block_coordinates(const PMatrix& N, const std::vector<int>& f, const std::vector<int>& h, int s) {
    check_blocks(f, h, N.rows);
    RingHandle Rs = make_ring(N.R->p, N.R->n, s);
    PMatrix out(Rs, N.rows, N.cols);
    const int t = static_cast<int>(f.size());
    for (int l = 0; l < t; ++l)
        for (int m = 0; m < t; ++m) {
            int r0 = block_start(h, l), c0 = block_start(h, m);
            PMatrix blk = sub(N, r0, r0 + h[l], c0, c0 + h[m]);
            int sh = std::max(0, f[m] - f[l]);
            if (sh > 0) {
                if (!blk.is_zero() && min_valuation(blk) < sh)
                    throw ArgumentError("block (" + std::to_string(l + 1) + "," + std::to_string(m + 1) +
                                        ") is not divisible by p^" + std::to_string(sh));
                blk = div_p(blk, sh);
            }
            put(out, change_ring(blk, Rs), r0, c0);
        }
    return out;
}

BlockLDU block_ldu(const PMatrix& N, const std::vector<int>& f, const std::vector<int>& h, int s) {
    if (N.rows != N.cols) throw ArgumentError("block_ldu needs a square matrix");
    if (s < 1) throw ArgumentError("s must be at least 1");
    check_blocks(f, h, N.rows);
    const int t = static_cast<int>(f.size());
    RingHandle W = make_ring(N.R->p, N.R->n, s + f.back() - f.front());
    PMatrix M = change_ring(N, W);
    block_coordinates(M, f, h, s);  // membership in S
    if (!determinant(M).is_unit()) throw ArgumentError("determinant is not a unit");
    for (int l = 0; l < t; ++l) {
        int r0 = block_start(h, l);
        if (!determinant(sub(M, r0, r0 + h[l], r0, r0 + h[l])).is_unit())
            throw Error("diagonal block " + std::to_string(l + 1) + " is not invertible");
    }
    BlockLDU out;
    out.f = f;
    out.h = h;
    out.s = s;
    out.X.resize(t);
    out.Y.assign(t, std::vector<PMatrix>(t));
    out.Z.assign(t, std::vector<PMatrix>(t));
    ldu_rec(M, t, f, h, out, make_ring(N.R->p, N.R->n, s));
    return out;
}

PMatrix block_ldu_multiply(const BlockLDU& F, RingHandle R) {
    const int t = static_cast<int>(F.f.size());
    int r = 0;
    for (int x : F.h) r += x;
    PMatrix X0(R, r, r);
    for (int l = 0; l < t; ++l) {
        int o = block_start(F.h, l);
        put(X0, change_ring(F.X[l], R), o, o);
    }
    // rows t, t-1, ..., 2 of Y on the left; columns 2, ..., t of Z on the right
    PMatrix Ytot = PMatrix::identity(R, r);
    for (int l = t - 1; l >= 1; --l) {
        PMatrix Yl = PMatrix::identity(R, r);
        for (int m = 0; m < l; ++m) put(Yl, change_ring(F.Y[l][m], R), block_start(F.h, l), block_start(F.h, m));
        Ytot = Ytot * Yl;
    }
    PMatrix Ztot = PMatrix::identity(R, r);
    for (int m = 1; m < t; ++m) {
        PMatrix Zm = PMatrix::identity(R, r);
        for (int l = 0; l < m; ++l)
            put(Zm, mul_p(change_ring(F.Z[l][m], R), F.f[m] - F.f[l]), block_start(F.h, l), block_start(F.h, m));
        Ztot = Ztot * Zm;
    }
    return Ytot * X0 * Ztot;
}

}  // namespace fcr
