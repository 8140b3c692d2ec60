#include "fcr/witt.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "fcr/error.hpp"

namespace fcr {

MPoly MPoly::constant(int nvars, const Int& c) {
    MPoly f;
    f.nvars = nvars;
    if (c != 0) f.terms[std::vector<int>(nvars, 0)] = c;
    return f;
}

MPoly MPoly::variable(int nvars, int v) {
    MPoly f;
    f.nvars = nvars;
    std::vector<int> m(nvars, 0);
    m[v] = 1;
    f.terms[m] = 1;
    return f;
}

namespace {

void accumulate(MPoly& f, const std::vector<int>& m, const Int& c) {
    auto [it, fresh] = f.terms.try_emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) f.terms.erase(it);
    } else if (c == 0) {
        f.terms.erase(it);
    }
}

}  // namespace

MPoly operator+(const MPoly& a, const MPoly& b) {
    MPoly r = a;
    for (const auto& [m, c] : b.terms) accumulate(r, m, c);
    return r;
}

MPoly operator-(const MPoly& a, const MPoly& b) {
    MPoly r = a;
    for (const auto& [m, c] : b.terms) accumulate(r, m, -c);
    return r;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly r;
    r.nvars = a.nvars;
    std::vector<int> m(a.nvars);
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            for (int i = 0; i < a.nvars; ++i) m[i] = ma[i] + mb[i];
            accumulate(r, m, ca * cb);
        }
    return r;
}

MPoly scale(const MPoly& a, const Int& c) {
    MPoly r;
    r.nvars = a.nvars;
    if (c == 0) return r;
    for (const auto& [m, v] : a.terms) r.terms[m] = v * c;
    return r;
}

MPoly divexact(const MPoly& a, const Int& d) {
    MPoly r = a;
    for (auto& [m, v] : r.terms) {
        if (!mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t()))
            throw Error("Witt table construction: ghost inversion is not exact");
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t());
    }
    return r;
}

namespace {

MPoly power(const MPoly& f, unsigned long e, size_t guard) {
    MPoly r = MPoly::constant(f.nvars, 1);
    for (unsigned long i = 0; i < e; ++i) {
        r = r * f;
        if (r.size() > guard) throw ResourceError("Witt table exceeds the term guard");
    }
    return r;
}

// w_q in the variables starting at offset.
MPoly ghost_poly(int nvars, int offset, int q, unsigned long p) {
    MPoly w;
    w.nvars = nvars;
    Int pi = 1;
    for (int i = 0; i <= q; ++i) {
        unsigned long e = 1;
        for (int k = 0; k < q - i; ++k) e *= p;
        std::vector<int> m(nvars, 0);
        m[offset + i] = static_cast<int>(e);
        accumulate(w, m, pi);
        pi *= static_cast<long>(p);
    }
    return w;
}

WittPolyTable build_table(unsigned long p, int s, size_t guard) {
    WittPolyTable t;
    t.p = p;
    t.s = s;
    int nv = 2 * s;
    std::vector<MPoly> Spow, Mpow;  // S_i^{p^{q-i}} for the current q
    Int pq = 1;
    for (int q = 0; q < s; ++q) {
        MPoly wa = ghost_poly(nv, 0, q, p), wb = ghost_poly(nv, s, q, p);
        for (auto& f : Spow) f = power(f, p, guard);
        for (auto& f : Mpow) f = power(f, p, guard);
        MPoly sumS = wa + wb, sumM = wa * wb;
        Int pi = 1;
        for (int i = 0; i < q; ++i) {
            sumS = sumS - scale(Spow[i], pi);
            sumM = sumM - scale(Mpow[i], pi);
            pi *= static_cast<long>(p);
        }
        t.S.push_back(divexact(sumS, pq));
        t.M.push_back(divexact(sumM, pq));
        if (t.S.back().size() > guard || t.M.back().size() > guard)
            throw ResourceError("Witt table exceeds the term guard");
        Spow.push_back(t.S.back());
        Mpow.push_back(t.M.back());
        pq *= static_cast<long>(p);
    }
    return t;
}

std::mutex table_mutex;
std::map<std::pair<unsigned long, int>, std::unique_ptr<WittPolyTable>> tables;

int total_degree(const std::vector<int>& m) { return std::accumulate(m.begin(), m.end(), 0); }

std::string var_name(int v, int s) { return (v < s ? "a" : "b") + std::to_string(v < s ? v : v - s); }

}  // namespace

const WittPolyTable& witt_poly_table(unsigned long p, int s, size_t term_guard) {
    if (!is_prime(p)) throw ArgumentError("p must be prime");
    if (s < 1) throw ArgumentError("Witt length must be at least 1");
    Int bound = 1;
    for (int i = 0; i < s; ++i) bound *= static_cast<long>(p);
    if (bound > 256) throw ResourceError("Witt tables are limited to p^s <= 256");
    std::lock_guard<std::mutex> lock(table_mutex);
    auto key = std::make_pair(p, s);
    auto it = tables.find(key);
    if (it != tables.end()) return *it->second;
    auto t = std::make_unique<WittPolyTable>(build_table(p, s, term_guard));
    const WittPolyTable& ref = *t;
    tables.emplace(key, std::move(t));
    return ref;
}

std::string table_text(const WittPolyTable& t) {
    std::string out;
    auto emit = [&](const char* name, int q, const MPoly& f) {
        std::vector<std::pair<std::vector<int>, Int>> terms(f.terms.begin(), f.terms.end());
        std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
            int dx = total_degree(x.first), dy = total_degree(y.first);
            if (dx != dy) return dx < dy;
            return x.first > y.first;
        });
        out += std::string(name) + std::to_string(q) + " =";
        bool first = true;
        for (const auto& [m, c] : terms) {
            Int mag = abs(c);
            out += first ? (c < 0 ? " -" : " ") : (c < 0 ? " - " : " + ");
            first = false;
            std::string mono;
            for (int v = 0; v < f.nvars; ++v) {
                if (m[v] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += var_name(v, t.s);
                if (m[v] > 1) mono += "^" + std::to_string(m[v]);
            }
            if (mono.empty())
                out += mag.get_str();
            else if (mag == 1)
                out += mono;
            else
                out += mag.get_str() + "*" + mono;
        }
        if (first) out += " 0";
        out += "\n";
    };
    for (int q = 0; q < t.s; ++q) emit("S", q, t.S[q]);
    for (int q = 0; q < t.s; ++q) emit("M", q, t.M[q]);
    return out;
}

Int eval_int(const MPoly& f, const std::vector<Int>& vars) {
    Int total = 0;
    for (const auto& [m, c] : f.terms) {
        Int term = c;
        for (int v = 0; v < f.nvars; ++v) {
            if (m[v] == 0) continue;
            Int pw;
            mpz_pow_ui(pw.get_mpz_t(), vars[v].get_mpz_t(), m[v]);
            term *= pw;
        }
        total += term;
    }
    return total;
}

std::vector<Int> ghost(const std::vector<Int>& x, unsigned long p) {
    int s = static_cast<int>(x.size());
    std::vector<Int> w(s);
    for (int q = 0; q < s; ++q) {
        Int acc = 0, pi = 1;
        for (int i = 0; i <= q; ++i) {
            unsigned long e = 1;
            for (int k = 0; k < q - i; ++k) e *= p;
            Int t;
            mpz_pow_ui(t.get_mpz_t(), x[i].get_mpz_t(), e);
            acc += pi * t;
            pi *= static_cast<long>(p);
        }
        w[q] = acc;
    }
    return w;
}

namespace {

void check_field(RingHandle F) {
    if (F == nullptr || F->N != 1) throw ArgumentError("Witt coordinates must live in a residue field ring");
}

void check_shapes(const WittVec& x, const WittVec& y) {
    check_field(x.F);
    if (x.F != y.F || x.length() != y.length())
        throw ArgumentError("Witt vectors of different shape");
    if (x.length() < 1) throw ArgumentError("empty Witt vector");
}

bool use_table(unsigned long p, int s) {
    Int bound = 1;
    for (int i = 0; i < s; ++i) bound *= static_cast<long>(p);
    return bound <= 256 && s <= 4;
}

Zq eval_field(const MPoly& f, const std::vector<Zq>& vars, RingHandle F) {
    Zq total(F);
    const long p = static_cast<long>(F->p);
    for (const auto& [m, c] : f.terms) {
        Int cm = c % Int(p);
        if (cm == 0) continue;
        Zq term(F, cm);
        for (int v = 0; v < f.nvars && !term.is_zero(); ++v)
            if (m[v] > 0) term = term * pow(vars[v], Int(m[v]));
        total += term;
    }
    return total;
}

WittVec via_table(const WittVec& x, const WittVec& y, bool product) {
    const WittPolyTable& t = witt_poly_table(x.F->p, x.length());
    std::vector<Zq> vars = x.x;
    vars.insert(vars.end(), y.x.begin(), y.x.end());
    WittVec r{x.F, {}};
    for (int q = 0; q < x.length(); ++q) r.x.push_back(eval_field(product ? t.M[q] : t.S[q], vars, x.F));
    return r;
}

RingHandle witt_ring(const WittVec& x) { return make_ring(x.F->p, x.F->n, x.length()); }

}  // namespace

WittVec witt_zero(RingHandle F, int s) {
    check_field(F);
    return WittVec{F, std::vector<Zq>(s, Zq(F))};
}

WittVec witt_one(RingHandle F, int s) {
    WittVec r = witt_zero(F, s);
    r.x[0] = Zq(F, 1);
    return r;
}

WittVec witt_add(const WittVec& x, const WittVec& y) {
    check_shapes(x, y);
    if (use_table(x.F->p, x.length())) return via_table(x, y, false);
    RingHandle R = witt_ring(x);
    return zq_to_witt(witt_to_zq(R, x) + witt_to_zq(R, y));
}

WittVec witt_mul(const WittVec& x, const WittVec& y) {
    check_shapes(x, y);
    if (use_table(x.F->p, x.length())) return via_table(x, y, true);
    RingHandle R = witt_ring(x);
    return zq_to_witt(witt_to_zq(R, x) * witt_to_zq(R, y));
}

WittVec frobenius_w(const WittVec& x) {
    WittVec r = x;
    for (auto& c : r.x) c = frobenius(c);
    return r;
}

WittVec verschiebung_w(const WittVec& x) {
    WittVec r = x;
    for (int i = x.length() - 1; i >= 1; --i) r.x[i] = x.x[i - 1];
    if (!r.x.empty()) r.x[0] = Zq(x.F);
    return r;
}

Zq witt_product_coord(int q, const std::vector<WittVec>& vectors) {
    if (vectors.empty()) throw ArgumentError("product of no Witt vectors");
    RingHandle F = vectors[0].F;
    check_field(F);
    for (const auto& v : vectors)
        if (v.F != F || v.length() <= q) throw ArgumentError("Witt vector too short for coordinate q");
    if (q < 0) throw ArgumentError("negative coordinate index");
    RingHandle W = make_ring(F->p, F->n, q + 1);
    const unsigned long p = F->p;
    // ghost components of the product in W, then invert the ghost map numerically
    std::vector<Zq> w(q + 1, Zq(W, 1));
    for (const auto& v : vectors) {
        std::vector<Zq> lift;
        for (int i = 0; i <= q; ++i) lift.push_back(Zq(W, v.x[i].c));
        for (int k = 0; k <= q; ++k) {
            Zq acc(W);
            Int e = 1;
            for (int j = 0; j < k; ++j) e *= static_cast<long>(p);
            for (int i = 0; i <= k; ++i) {
                acc += mul_p(pow(lift[i], e), i);
                e /= static_cast<long>(p);
            }
            w[k] = w[k] * acc;
        }
    }
    std::vector<Zq> y;
    for (int k = 0; k <= q; ++k) {
        Zq acc = w[k];
        Int e = 1;
        for (int j = 0; j < k; ++j) e *= static_cast<long>(p);
        for (int i = 0; i < k; ++i) {
            acc -= mul_p(pow(y[i], e), i);
            e /= static_cast<long>(p);
        }
        y.push_back(div_p(acc, k));
    }
    return Zq(F, y[q].c);
}

Zq witt_to_zq(RingHandle R, const WittVec& x) {
    check_field(x.F);
    if (R->p != x.F->p || R->n != x.F->n || R->N != x.length())
        throw ArgumentError("ring does not match the Witt vector shape");
    Zq total(R);
    for (int i = 0; i < x.length(); ++i) {
        Zq root = frobenius_pow(x.x[i], -i);
        total += mul_p(teichmuller(R, Zq(R, root.c)), i);
    }
    return total;
}

WittVec zq_to_witt(const Zq& a) {
    RingHandle R = a.R;
    RingHandle F = make_ring(R->p, R->n, 1);
    WittVec r{F, {}};
    Zq cur = a;
    for (int i = 0; i < R->N; ++i) {
        Zq res = residue(cur);
        Zq c(F, res.c);
        for (int k = 0; k < i; ++k) c = frobenius(c);
        r.x.push_back(c);
        if (i + 1 < R->N) cur = div_p(cur - teichmuller(R, res), 1);
    }
    return r;
}

}  // namespace fcr
