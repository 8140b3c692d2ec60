#include "fcr/crystal.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace fcr {

Crystal make_crystal(const PMatrix& A, int scale) {
    if (A.rows != A.cols) throw ArgumentError("crystal matrix must be square");
    if (A.rows < 1) throw ArgumentError("crystal rank must be positive");
    if (scale < 0) throw ArgumentError("crystal scale must be nonnegative");
    SNF s = smith_normal_form(A);
    for (int v : s.e)
        if (v >= A.R->N) throw PrecisionExhausted("det(phi) vanishes at precision N = " + std::to_string(A.R->N));
    return Crystal{A, scale};
}

Crystal with_precision(const Crystal& M, int N) {
    RingHandle R = with_precision(M.ring(), N);
    return Crystal{change_ring(M.A, R), M.scale};
}

namespace {

HodgeData blocks_from(std::vector<int> e) {
    HodgeData h;
    std::sort(e.begin(), e.end());
    h.e = e;
    for (size_t i = 0; i < e.size(); ++i) {
        if (h.f.empty() || h.f.back() != e[i]) {
            h.f.push_back(e[i]);
            h.h.push_back(0);
            h.I.emplace_back();
        }
        h.h.back()++;
        h.I.back().push_back(static_cast<int>(i));
    }
    return h;
}

SNF certified_snf(const Crystal& M) {
    SNF s = smith_normal_form(M.A);
    for (int v : s.e)
        if (v >= M.precision()) throw PrecisionExhausted("Hodge slope not certified at precision N");
    return s;
}

}  // namespace

HodgeData hodge_slopes(const Crystal& M) {
    return with_auto_precision(M, [](const Crystal& C) {
        SNF s = certified_snf(C);
        std::vector<int> e = s.e;
        for (auto& v : e) v -= C.scale;
        return blocks_from(e);
    });
}

PMatrix f_basis(const Crystal& M) {
    SNF s = certified_snf(M);
    PMatrix B = frobenius(s.Qinv, -1);
    // postcondition: p^{-e_i} A sigma(b_i) is a basis
    PMatrix img = M.A * frobenius(B, 1);
    for (int j = 0; j < img.cols; ++j)
        for (int i = 0; i < img.rows; ++i) img(i, j) = div_p(img(i, j), s.e[j]);
    if (!determinant(img).is_unit()) throw Error("F-basis postcondition failed");
    return B;
}

PMatrix linearized(const Crystal& M) {
    PMatrix psi = M.A;
    for (int k = 1; k < M.n(); ++k) psi = psi * frobenius(M.A, k);
    return psi;
}

std::vector<Slope> newton_slopes(const Crystal& M) {
    return with_auto_precision(M, [](const Crystal& C) {
        std::vector<Slope> s = newton_polygon(char_poly(linearized(C)));
        for (auto& x : s) x.value = x.value / C.n() - C.scale;
        // slopes equal after division merge
        std::vector<Slope> out;
        for (const auto& x : s) {
            if (!out.empty() && out.back().value == x.value)
                out.back().mult += x.mult;
            else
                out.push_back(x);
        }
        return out;
    });
}

bool is_ordinary(const Crystal& M) {
    HodgeData h = hodge_slopes(M);
    std::vector<Rational> hodge;
    for (int v : h.e) hodge.push_back(Rational(v));
    return expand_slopes(newton_slopes(M)) == hodge;
}

bool is_isoclinic(const Crystal& M) { return newton_slopes(M).size() == 1; }

Crystal twist(const Crystal& M, const PMatrix& g) {
    if (g.rows != M.rank() || g.cols != M.rank()) throw ArgumentError("twist matrix has the wrong shape");
    if (g.R != M.ring()) throw ArgumentError("twist matrix lives over another ring");
    if (!determinant(g).is_unit()) throw ArgumentError("twist matrix is not invertible");
    return Crystal{g * M.A, M.scale};
}

Crystal direct_sum(const Crystal& M1, const Crystal& M2) {
    if (M1.ring() != M2.ring()) throw ArgumentError("direct sum over different rings");
    int c = std::max(M1.scale, M2.scale);
    return Crystal{block_diag(mul_p(M1.A, c - M1.scale), mul_p(M2.A, c - M2.scale)), c};
}

Crystal dual(const Crystal& M) {
    ScaledInverse inv = scaled_inverse(M.A);
    int c = inv.e - M.scale;
    PMatrix A = transpose(inv.J);
    if (c < 0) {
        A = mul_p(A, -c);
        c = 0;
    }
    return Crystal{A, c};
}

Crystal hom_crystal(const Crystal& M1, const Crystal& M2) {
    if (M1.ring() != M2.ring()) throw ArgumentError("Hom crystal over different rings");
    RingHandle R = M1.ring();
    ScaledInverse inv = scaled_inverse(M1.A);
    int r1 = M1.rank(), r2 = M2.rank();
    int d = r1 * r2;
    PMatrix psi(R, d, d);
    for (int a = 0; a < r2; ++a)
        for (int b = 0; b < r1; ++b)
            for (int i = 0; i < r2; ++i) {
                if (M2.A(i, a).is_zero()) continue;
                for (int j = 0; j < r1; ++j) psi(i * r1 + j, a * r1 + b) = M2.A(i, a) * inv.J(b, j);
            }
    int c = inv.e + M2.scale - M1.scale;
    if (c < 0) {
        psi = mul_p(psi, -c);
        c = 0;
    }
    return Crystal{psi, c};
}

namespace {

std::mutex embed_mutex;
std::map<std::tuple<unsigned long, int, int, int>, Zq> embed_roots;

Zq eval_minpoly(const std::vector<long>& mp, const Zq& t, bool deriv) {
    RingHandle R = t.R;
    int n = static_cast<int>(mp.size());
    Zq acc(R);
    if (!deriv) {
        acc = Zq(R, 1);
        for (int j = n - 1; j >= 0; --j) acc = acc * t + Zq(R, mp[j]);
    } else {
        acc = Zq(R, static_cast<long>(n));
        for (int j = n - 1; j >= 1; --j) acc = acc * t + Zq(R, mp[j] * j);
    }
    return acc;
}

// Root in W(F_{p^{nm}}) / p^N of the small ring's minimal polynomial.
Zq embedding_root(RingHandle small, RingHandle big) {
    auto key = std::make_tuple(small->p, small->n, big->n, big->N);
    {
        std::lock_guard<std::mutex> lock(embed_mutex);
        auto it = embed_roots.find(key);
        if (it != embed_roots.end()) return it->second;
    }
    RingHandle F = make_ring(big->p, big->n, 1);
    Int q = F->field_size();
    if (q > Int(1) << 24) throw ResourceError("residue field too large for the embedding search");
    Zq root(F);
    bool found = false;
    for (Int idx = 0; idx < q; ++idx) {
        Zq r = residue_from_index(F, idx);
        if (eval_minpoly(small->minpoly, r, false).is_zero()) {
            root = r;
            found = true;
            break;
        }
    }
    if (!found) throw Error("no root of the minimal polynomial in the extension");
    Zq rho(big, root.c);
    for (int it = 0; it < 2 * big->N + 4; ++it) {
        Zq f = eval_minpoly(small->minpoly, rho, false);
        if (f.is_zero()) break;
        rho -= f * inverse(eval_minpoly(small->minpoly, rho, true));
    }
    if (!eval_minpoly(small->minpoly, rho, false).is_zero()) throw Error("embedding root did not converge");
    std::lock_guard<std::mutex> lock(embed_mutex);
    embed_roots.emplace(key, rho);
    return rho;
}

}  // namespace

Zq embed(const Zq& a, RingHandle big) {
    RingHandle small = a.R;
    if (big->p != small->p || big->N != small->N || big->n % small->n != 0)
        throw ArgumentError("target ring is not an extension of the source ring");
    if (small->n == 1) return Zq(big, a.c[0]);
    Zq rho = embedding_root(small, big);
    Zq acc(big);
    for (int j = small->n - 1; j >= 0; --j) acc = acc * rho + Zq(big, a.c[j]);
    return acc;
}

Crystal base_extend(const Crystal& M, int m) {
    if (m < 1) throw ArgumentError("extension degree must be at least 1");
    if (m == 1) return M;
    RingHandle big = make_ring(M.p(), M.n() * m, M.precision());
    PMatrix A(big, M.rank(), M.rank());
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] = embed(M.A.a[i], big);
    return Crystal{A, M.scale};
}

Crystal permutation_crystal(unsigned long p, int n, int N, const std::vector<int>& e, const std::vector<int>& pi) {
    int r = static_cast<int>(e.size());
    if (static_cast<int>(pi.size()) != r) throw ArgumentError("permutation and exponent lengths differ");
    std::vector<char> seen(r, 0);
    for (int x : pi) {
        if (x < 0 || x >= r || seen[x]) throw ArgumentError("pi is not a permutation");
        seen[x] = 1;
    }
    for (int v : e)
        if (v < 0) throw ArgumentError("Hodge exponents must be nonnegative");
    RingHandle R = make_ring(p, n, N);
    PMatrix A(R, r, r);
    for (int i = 0; i < r; ++i) A(pi[i], i) = mul_p(Zq(R, 1), e[i]);
    return make_crystal(A);
}

}  // namespace fcr
