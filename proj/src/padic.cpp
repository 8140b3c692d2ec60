#include "fcr/padic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fcr/error.hpp"

namespace fcr {

namespace {

using FpPoly = std::vector<long long>;  // low degree first

void trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

long long mulmod(long long a, long long b, long long p) {
    return static_cast<long long>(static_cast<__int128>(a) * b % p);
}

long long powmod(long long a, long long e, long long p) {
    long long r = 1 % p;
    a %= p;
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

FpPoly poly_mod(FpPoly a, const FpPoly& m, long long p) {
    trim(a);
    long long inv = powmod(m.back(), p - 2, p);
    while (a.size() >= m.size()) {
        long long q = mulmod(a.back(), inv, p);
        size_t shift = a.size() - m.size();
        for (size_t i = 0; i < m.size(); ++i)
            a[shift + i] = ((a[shift + i] - mulmod(q, m[i], p)) % p + p) % p;
        trim(a);
    }
    return a;
}

FpPoly poly_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, long long p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    return poly_mod(r, m, p);
}

FpPoly poly_gcd(FpPoly a, FpPoly b, long long p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        FpPoly r = poly_mod(a, b, p);
        a = b;
        b = r;
    }
    return a;
}

// x^(p^k) mod m
FpPoly frob_power(const FpPoly& m, long long p, int k) {
    FpPoly x = poly_mod({0, 1}, m, p);
    for (int i = 0; i < k; ++i) {
        FpPoly r = {1};
        FpPoly base = x;
        long long e = p;
        while (e > 0) {
            if (e & 1) r = poly_mulmod(r, base, m, p);
            base = poly_mulmod(base, base, m, p);
            e >>= 1;
        }
        x = r;
    }
    return x;
}

bool irreducible(const FpPoly& f, long long p) {
    int n = static_cast<int>(f.size()) - 1;
    if (n == 1) return true;
    FpPoly x = {0, 1};
    FpPoly xq = frob_power(f, p, n);
    FpPoly d = xq;
    d.resize(std::max<size_t>(d.size(), 2), 0);
    d[1] = (d[1] - 1 + p) % p;
    trim(d);
    if (!d.empty()) return false;
    for (int q = 2; q <= n; ++q) {
        if (n % q != 0) continue;
        bool prime = true;
        for (int t = 2; t * t <= q; ++t)
            if (q % t == 0) prime = false;
        if (!prime) continue;
        FpPoly y = frob_power(f, p, n / q);
        y.resize(std::max<size_t>(y.size(), 2), 0);
        y[1] = (y[1] - 1 + p) % p;
        trim(y);
        FpPoly g = poly_gcd(f, y, p);
        if (g.size() > 1) return false;
    }
    return true;
}

std::vector<long> smallest_irreducible(unsigned long p, int n) {
    std::vector<long> c(n, 0);
    // c_0 most significant: increment from the last coefficient
    while (true) {
        FpPoly f(c.begin(), c.end());
        f.push_back(1);
        if (irreducible(f, static_cast<long long>(p))) return c;
        int i = n - 1;
        while (i >= 0 && c[i] == static_cast<long>(p) - 1) {
            c[i] = 0;
            --i;
        }
        if (i < 0) throw Error("no irreducible polynomial found");
        ++c[i];
    }
}

void reduce_coeff(Int& v, const Int& m) {
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
}

std::vector<Int> apply_cols(const std::vector<std::vector<Int>>& cols, const std::vector<Int>& a,
                            const Int& m) {
    size_t n = a.size();
    std::vector<Int> r(n, 0);
    for (size_t j = 0; j < n; ++j) {
        if (a[j] == 0) continue;
        for (size_t i = 0; i < n; ++i) r[i] += a[j] * cols[j][i];
    }
    for (auto& v : r) reduce_coeff(v, m);
    return r;
}

std::mutex cache_mutex;
std::map<std::tuple<unsigned long, int, int>, std::unique_ptr<Ring>> cache;

std::unique_ptr<Ring> build_ring(unsigned long p, int n, int N) {
    auto R = std::make_unique<Ring>();
    R->p = p;
    R->n = n;
    R->N = N;
    R->pw.resize(N + 1);
    R->pw[0] = 1;
    for (int i = 1; i <= N; ++i) R->pw[i] = R->pw[i - 1] * p;
    R->minpoly = smallest_irreducible(p, n);
    const Int& m = R->pw[N];
    // x^n = -sum c_j x^j; higher powers by shifting
    std::vector<Int> cur(n);
    for (int j = 0; j < n; ++j) {
        cur[j] = -R->minpoly[j];
        reduce_coeff(cur[j], m);
    }
    for (int k = 0; k + 2 <= n; ++k) {
        R->xpow.push_back(cur);
        std::vector<Int> nxt(n, 0);
        for (int j = 0; j + 1 < n; ++j) nxt[j + 1] = cur[j];
        Int top = cur[n - 1];
        for (int j = 0; j < n; ++j) {
            nxt[j] -= top * R->minpoly[j];
            reduce_coeff(nxt[j], m);
        }
        cur = nxt;
    }
    R->frob_cols.assign(n, std::vector<Int>(n, 0));
    R->frob_inv_cols.assign(n, std::vector<Int>(n, 0));
    if (n == 1) {
        R->frob_image = {Int(0)};
        R->frob_cols[0][0] = 1;
        R->frob_inv_cols[0][0] = 1;
        return R;
    }
    const Ring* raw = R.get();
    // Newton iteration for the root of minpoly congruent to x^p
    Zq x = Zq::generator(raw);
    Zq y = pow(x, Int(p));
    auto eval = [&](const Zq& t, bool deriv) {
        Zq acc(raw);
        if (!deriv) {
            acc = Zq(raw, 1);
            for (int j = n - 1; j >= 0; --j) acc = acc * t + Zq(raw, R->minpoly[j]);
        } else {
            acc = Zq(raw, static_cast<long>(n));
            for (int j = n - 1; j >= 1; --j) acc = acc * t + Zq(raw, R->minpoly[j] * j);
        }
        return acc;
    };
    for (int it = 0; it < 2 * N + 8; ++it) {
        Zq fy = eval(y, false);
        if (fy.is_zero()) break;
        y -= fy * inverse(eval(y, true));
    }
    if (!eval(y, false).is_zero()) throw Error("Frobenius lift did not converge");
    R->frob_image = y.c;
    Zq powy(raw, 1);
    for (int j = 0; j < n; ++j) {
        R->frob_cols[j] = powy.c;
        powy = powy * y;
    }
    Zq powx(raw, 1);
    for (int j = 0; j < n; ++j) {
        std::vector<Int> v = powx.c;
        for (int k = 0; k < n - 1; ++k) v = apply_cols(R->frob_cols, v, m);
        R->frob_inv_cols[j] = v;
        powx = powx * x;
    }
    return R;
}

}  // namespace

Int Ring::field_size() const {
    Int q = 1;
    for (int i = 0; i < n; ++i) q *= p;
    return q;
}

bool is_prime(unsigned long p) {
    if (p < 2) return false;
    for (unsigned long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

RingHandle make_ring(unsigned long p, int n, int N) {
    if (!is_prime(p)) throw ArgumentError("p = " + std::to_string(p) + " is not prime");
    if (n < 1) throw ArgumentError("extension degree must be at least 1");
    if (N < 1) throw ArgumentError("precision must be at least 1");
    if (p > (1ul << 30)) throw ArgumentError("p too large");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_tuple(p, n, N);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    auto R = build_ring(p, n, N);
    RingHandle h = R.get();
    cache.emplace(key, std::move(R));
    return h;
}

RingHandle with_precision(RingHandle R, int N) { return make_ring(R->p, R->n, N); }

Zq::Zq(RingHandle ring) : R(ring), c(ring->n, 0) {}

Zq::Zq(RingHandle ring, long v) : R(ring), c(ring->n, 0) {
    c[0] = v;
    normalize();
}

Zq::Zq(RingHandle ring, const Int& v) : R(ring), c(ring->n, 0) {
    c[0] = v;
    normalize();
}

Zq::Zq(RingHandle ring, std::vector<Int> coeffs) : R(ring), c(std::move(coeffs)) {
    if (static_cast<int>(c.size()) != R->n) throw ArgumentError("coefficient count differs from n");
    normalize();
}

Zq Zq::generator(RingHandle ring) {
    Zq g(ring);
    if (ring->n == 1) {
        g.c[0] = 0;
        return g;
    }
    g.c[1] = 1;
    return g;
}

void Zq::normalize() {
    for (auto& v : c) reduce_coeff(v, R->modulus());
}

bool Zq::is_zero() const {
    for (const auto& v : c)
        if (v != 0) return false;
    return true;
}

bool Zq::is_unit() const { return valuation(*this) == 0; }

Zq& Zq::operator+=(const Zq& b) {
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] += b.c[i];
        if (c[i] >= R->modulus()) c[i] -= R->modulus();
    }
    return *this;
}

Zq& Zq::operator-=(const Zq& b) {
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] -= b.c[i];
        if (c[i] < 0) c[i] += R->modulus();
    }
    return *this;
}

Zq& Zq::operator*=(const Zq& b) {
    *this = *this * b;
    return *this;
}

Zq operator*(const Zq& a, const Zq& b) {
    RingHandle R = a.R;
    int n = R->n;
    Zq r(R);
    if (n == 1) {
        r.c[0] = a.c[0] * b.c[0];
        reduce_coeff(r.c[0], R->modulus());
        return r;
    }
    std::vector<Int> prod(2 * n - 1, 0);
    for (int i = 0; i < n; ++i) {
        if (a.c[i] == 0) continue;
        for (int j = 0; j < n; ++j) prod[i + j] += a.c[i] * b.c[j];
    }
    for (int i = 0; i < n; ++i) r.c[i] = prod[i];
    for (int k = 0; k + n < 2 * n - 1; ++k) {
        const Int& t = prod[n + k];
        if (t == 0) continue;
        for (int i = 0; i < n; ++i) r.c[i] += t * R->xpow[k][i];
    }
    r.normalize();
    return r;
}

Zq operator-(const Zq& a) {
    Zq r(a.R);
    for (size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != 0) r.c[i] = a.R->modulus() - a.c[i];
    return r;
}

std::string Zq::to_string() const {
    if (c.size() == 1) return c[0].get_str();
    std::string s = "[";
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += c[i].get_str();
    }
    return s + "]";
}

int valuation(const Zq& a) {
    int best = a.R->N;
    for (const auto& v : a.c) {
        if (v == 0) continue;
        int k = static_cast<int>(mpz_scan1(v.get_mpz_t(), 0));
        if (a.R->p != 2) {
            Int t = v;
            k = 0;
            while (k < best && mpz_divisible_ui_p(t.get_mpz_t(), a.R->p)) {
                mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), a.R->p);
                ++k;
            }
        }
        if (k < best) best = k;
    }
    return best;
}

Zq frobenius(const Zq& a) {
    if (a.R->n == 1) return a;
    Zq r(a.R);
    r.c = apply_cols(a.R->frob_cols, a.c, a.R->modulus());
    return r;
}

Zq frobenius_inv(const Zq& a) {
    if (a.R->n == 1) return a;
    Zq r(a.R);
    r.c = apply_cols(a.R->frob_inv_cols, a.c, a.R->modulus());
    return r;
}

Zq frobenius_pow(const Zq& a, long k) {
    long n = a.R->n;
    k %= n;
    if (k < 0) k += n;
    Zq r = a;
    for (long i = 0; i < k; ++i) r = frobenius(r);
    return r;
}

Zq pow(const Zq& a, const Int& e) {
    Zq r(a.R, 1);
    Zq base = a;
    Int k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) r = r * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return r;
}

Zq inverse(const Zq& a) {
    if (!a.is_unit()) throw ArgumentError("element is not a unit: " + a.to_string());
    RingHandle R = a.R;
    if (R->n == 1) {
        Zq r(R);
        mpz_invert(r.c[0].get_mpz_t(), a.c[0].get_mpz_t(), R->modulus().get_mpz_t());
        return r;
    }
    Zq x = residue(pow(a, R->field_size() - 2));
    Zq two(R, 2);
    for (int prec = 1; prec < R->N; prec *= 2) x = x * (two - a * x);
    return x;
}

Zq mul_p(const Zq& a, int v) {
    Zq r = a;
    if (v >= a.R->N) return Zq(a.R);
    for (auto& t : r.c) {
        t *= a.R->pw[v];
        reduce_coeff(t, a.R->modulus());
    }
    return r;
}

Zq div_p(const Zq& a, int v) {
    if (v == 0) return a;
    Zq r = a;
    const Int& d = a.R->pw[v];
    for (auto& t : r.c) {
        if (!mpz_divisible_p(t.get_mpz_t(), d.get_mpz_t()))
            throw ArgumentError("inexact division by p^" + std::to_string(v));
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), d.get_mpz_t());
    }
    return r;
}

Zq residue(const Zq& a) {
    Zq r = a;
    for (auto& t : r.c) mpz_mod_ui(t.get_mpz_t(), t.get_mpz_t(), a.R->p);
    return r;
}

Zq teichmuller(RingHandle R, const Zq& res) {
    Zq x(R);
    for (int i = 0; i < R->n; ++i) x.c[i] = res.c[i] % Int(R->p);
    Zq r = residue(x);
    x = r;
    Int q = R->field_size();
    for (int i = 0; i < R->N; ++i) {
        Zq nx = pow(x, q);
        if (nx == x) break;
        x = nx;
    }
    return x;
}

Zq change_ring(const Zq& a, RingHandle R) {
    if (a.R->p != R->p || a.R->n != R->n) throw ArgumentError("change_ring across different fields");
    return Zq(R, a.c);
}

Zq unit_part(const Zq& a) {
    int v = valuation(a);
    if (v >= a.R->N) throw ArgumentError("unit part of zero");
    return div_p(a, v);
}

Zq coeff_floor_div(const Zq& a, int v) {
    Zq r = a;
    for (auto& t : r.c) mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), a.R->pw[v].get_mpz_t());
    return r;
}

Zq coeff_mod(const Zq& a, int v) {
    Zq r = a;
    if (v >= a.R->N) return r;
    for (auto& t : r.c) mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), a.R->pw[v].get_mpz_t());
    return r;
}

Zq residue_from_index(RingHandle R, const Int& idx) {
    Zq r(R);
    Int k = idx;
    for (int i = R->n - 1; i >= 0; --i) {
        Int d;
        mpz_fdiv_qr_ui(k.get_mpz_t(), d.get_mpz_t(), k.get_mpz_t(), R->p);
        r.c[i] = d;
    }
    return r;
}

Int residue_index(const Zq& a) {
    Int k = 0;
    for (int i = 0; i < a.R->n; ++i) k = k * a.R->p + (a.c[i] % Int(a.R->p));
    return k;
}

}  // namespace fcr
