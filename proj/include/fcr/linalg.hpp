#pragma once

#include <boost/rational.hpp>
#include <string>
#include <vector>

#include "fcr/matrix.hpp"

namespace fcr {

using Rational = boost::rational<long>;

std::string rational_string(const Rational& r);

struct Slope {
    Rational value;
    int mult = 0;
    friend bool operator==(const Slope& a, const Slope& b) {
        return a.value == b.value && a.mult == b.mult;
    }
};

// Expand (slope, mult) pairs into a sorted list with repetition.
std::vector<Rational> expand_slopes(const std::vector<Slope>& s);

// A = P * D * Q with D diagonal p^{e_i}; e_i == R->N marks a vanishing entry.
struct SNF {
    PMatrix P, Pinv, D, Q, Qinv;
    std::vector<int> e;
};

// slack > 0 rejects nonzero pivots of valuation >= N - slack.
SNF smith_normal_form(const PMatrix& A, int slack = 0);

// A^{-1} = p^{-e} J with J integral; throws when A is singular at precision.
struct ScaledInverse {
    PMatrix J;
    int e = 0;
};
ScaledInverse scaled_inverse(const PMatrix& A);

// Column Hermite form of a d x m matrix of rank d: upper triangular,
// diagonal p^{v_i}, entries to the right of each pivot reduced mod p^{v_i}.
PMatrix column_hermite(const PMatrix& B);

// Generators (columns) of {x : A x = 0} over R.
PMatrix module_kernel(const PMatrix& A);
// log_p of the order of the column span of G inside R^rows (n = 1 rings).
int span_order_exponent(const PMatrix& G);
bool span_contains(const PMatrix& G, const PMatrix& v);

Zq determinant(const PMatrix& A);
PMatrix adjugate(const PMatrix& A);

// Polynomials over R, coefficient i multiplies T^i.
using Poly = std::vector<Zq>;

Poly char_poly(const PMatrix& A);
Poly poly_mul(const Poly& a, const Poly& b);
// Division by a monic polynomial; returns quotient, remainder in rem.
Poly poly_divmod(const Poly& a, const Poly& monic, Poly& rem);
PMatrix poly_eval(const Poly& f, const PMatrix& A);

// Lower-hull slopes of (i, v(a_i)) read as root valuations, ascending.
std::vector<Slope> newton_polygon(const Poly& f);

struct SlopePart {
    PMatrix basis;   // d x k, saturated in R^d
    PMatrix coords;  // k x d, coords * basis = 1
    std::vector<Slope> slopes;
    int dim() const { return basis.cols; }
};

// Parts of the linear operator psi by root valuation against the integer threshold t.
struct SlopeSplit {
    SlopePart plus, zero, minus;
};

SlopeSplit slope_split(const PMatrix& psi, int t);

// The factorization f = f_gt * f_eq * f_lt by root valuation against t.
struct SlopeFactors {
    Poly gt, eq, lt;
};
SlopeFactors slope_factors(const Poly& f, int t);

}  // namespace fcr
