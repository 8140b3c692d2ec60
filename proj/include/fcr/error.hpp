#pragma once

#include <stdexcept>
#include <string>

namespace fcr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: malformed values, mismatched shapes, non-prime p.
struct ArgumentError : Error {
    using Error::Error;
};

// A valuation could not be certified at the working precision.
struct PrecisionExhausted : Error {
    using Error::Error;
};

struct SplitFailed : PrecisionExhausted {
    using PrecisionExhausted::PrecisionExhausted;
};

struct NonConvergence : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct ResourceError : Error {
    using Error::Error;
};

// The requested object exists over a larger residue field only.
struct BaseFieldTooSmall : Error {
    int suggested_degree;
    BaseFieldTooSmall(const std::string& what, int degree)
        : Error(what), suggested_degree(degree) {}
};

}  // namespace fcr
