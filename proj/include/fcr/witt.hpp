#pragma once

#include <map>
#include <string>
#include <vector>

#include "fcr/padic.hpp"

namespace fcr {

// Integer polynomial in variables a_0..a_{s-1}, b_0..b_{s-1} (indices 0..2s-1).
struct MPoly {
    int nvars = 0;
    std::map<std::vector<int>, Int> terms;

    static MPoly constant(int nvars, const Int& c);
    static MPoly variable(int nvars, int v);
    size_t size() const { return terms.size(); }
};

MPoly operator+(const MPoly& a, const MPoly& b);
MPoly operator-(const MPoly& a, const MPoly& b);
MPoly operator*(const MPoly& a, const MPoly& b);
MPoly scale(const MPoly& a, const Int& c);
// Exact division of every coefficient; throws when a coefficient is not divisible.
MPoly divexact(const MPoly& a, const Int& d);

struct WittPolyTable {
    unsigned long p = 0;
    int s = 0;
    std::vector<MPoly> S, M;
};

constexpr size_t kDefaultTermGuard = 200000;

// Memoized; p^s must be at most 256 and no polynomial may exceed term_guard terms.
const WittPolyTable& witt_poly_table(unsigned long p, int s, size_t term_guard = kDefaultTermGuard);
std::string table_text(const WittPolyTable& t);

Int eval_int(const MPoly& f, const std::vector<Int>& vars);
// Ghost components of an integer coordinate vector.
std::vector<Int> ghost(const std::vector<Int>& x, unsigned long p);

// Coordinates live in the residue field ring (p, n, 1).
struct WittVec {
    RingHandle F = nullptr;
    std::vector<Zq> x;
    int length() const { return static_cast<int>(x.size()); }
    friend bool operator==(const WittVec& a, const WittVec& b) { return a.F == b.F && a.x == b.x; }
};

WittVec witt_zero(RingHandle F, int s);
WittVec witt_one(RingHandle F, int s);
WittVec witt_add(const WittVec& x, const WittVec& y);
WittVec witt_mul(const WittVec& x, const WittVec& y);
WittVec frobenius_w(const WittVec& x);
WittVec verschiebung_w(const WittVec& x);
// q-th coordinate of the product of all vectors.
Zq witt_product_coord(int q, const std::vector<WittVec>& vectors);

Zq witt_to_zq(RingHandle R, const WittVec& x);
WittVec zq_to_witt(const Zq& a);

}  // namespace fcr
