#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace fcr {

using Int = mpz_class;

// W(F_{p^n}) / p^N presented as (Z/p^N)[x] / minpoly.
struct Ring {
    unsigned long p = 0;
    int n = 0;
    int N = 0;
    std::vector<Int> pw;                          // p^0 .. p^N
    std::vector<long> minpoly;                    // c_0 .. c_{n-1}, monic x^n implicit
    std::vector<std::vector<Int>> xpow;           // x^{n+k} reduced, k = 0 .. n-2
    std::vector<Int> frob_image;                  // sigma(x)
    std::vector<std::vector<Int>> frob_cols;      // sigma(x^j)
    std::vector<std::vector<Int>> frob_inv_cols;  // sigma^{-1}(x^j)

    const Int& modulus() const { return pw[N]; }
    // size of the residue field
    Int field_size() const;
};

// Rings are interned for the life of the process, so raw handles stay valid.
using RingHandle = const Ring*;

bool is_prime(unsigned long p);
RingHandle make_ring(unsigned long p, int n, int N);
RingHandle with_precision(RingHandle R, int N);

class Zq {
public:
    RingHandle R = nullptr;
    std::vector<Int> c;

    Zq() = default;
    explicit Zq(RingHandle ring);
    Zq(RingHandle ring, long v);
    Zq(RingHandle ring, const Int& v);
    Zq(RingHandle ring, std::vector<Int> coeffs);

    static Zq generator(RingHandle ring);

    bool is_zero() const;
    bool is_unit() const;

    Zq& operator+=(const Zq& b);
    Zq& operator-=(const Zq& b);
    Zq& operator*=(const Zq& b);

    friend Zq operator+(Zq a, const Zq& b) { return a += b; }
    friend Zq operator-(Zq a, const Zq& b) { return a -= b; }
    friend Zq operator*(const Zq& a, const Zq& b);
    friend Zq operator-(const Zq& a);
    friend bool operator==(const Zq& a, const Zq& b) { return a.c == b.c; }
    friend bool operator!=(const Zq& a, const Zq& b) { return !(a == b); }

    std::string to_string() const;

private:
    void normalize();
};

// Returns R->N for zero (the "at least N" marker).
int valuation(const Zq& a);
Zq frobenius(const Zq& a);
Zq frobenius_inv(const Zq& a);
Zq frobenius_pow(const Zq& a, long k);
Zq inverse(const Zq& a);
Zq pow(const Zq& a, const Int& e);
Zq mul_p(const Zq& a, int v);
// Exact division by p^v; the top v digits of the result are zero.
Zq div_p(const Zq& a, int v);
Zq residue(const Zq& a);
Zq teichmuller(RingHandle R, const Zq& res);
Zq change_ring(const Zq& a, RingHandle R);
Zq unit_part(const Zq& a);
// floor of each coefficient divided by p^v, used for Hermite reduction
Zq coeff_floor_div(const Zq& a, int v);
Zq coeff_mod(const Zq& a, int v);

// Residue field enumeration: c_0 is the most significant digit.
Zq residue_from_index(RingHandle R, const Int& idx);
Int residue_index(const Zq& a);

}  // namespace fcr
