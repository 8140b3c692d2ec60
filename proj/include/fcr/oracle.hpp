#pragma once

#include <cstdint>
#include <vector>

#include "fcr/crystal.hpp"

namespace fcr {

enum class Exec { serial, parallel };

struct SearchBudget {
    std::uint64_t max_candidates = 10'000'000;
    double timeout_seconds = 0;  // 0 disables the clock
};

struct SearchStats {
    std::uint64_t nominal = 0;    // p^{n r1 r2 (s + e_r)}, saturating
    std::uint64_t evaluated = 0;  // digit-level nodes tested
};

// Enumeration runs digit by digit over lifts mod p^{s + e_r}, least residues first,
// row-major over entries and power-basis coefficients. A branch is dropped as soon as the
// congruence fails at the digits already fixed; no solution is lost that way.
struct BruteHomResult {
    int s = 0;
    std::vector<PMatrix> solutions;  // distinct, mod p^s, sorted by coordinates
    SearchStats stats;
};

// Raises BudgetExceeded when the nominal candidate count is above the budget.
BruteHomResult brute_hom_s(const Crystal& M1, const Crystal& M2, int s, const SearchBudget& budget = {},
                           Exec exec = Exec::parallel);

// Is there h, invertible mod p, with h in Hom_s(M(g1), M(g2))? M(g) has matrix g A.
// The budget bounds evaluated nodes.
bool is_isomorphic_truncation(const Crystal& M, const PMatrix& g1, const PMatrix& g2, int s,
                              const SearchBudget& budget = {}, Exec exec = Exec::parallel,
                              SearchStats* stats = nullptr);

struct IsomClasses {
    std::vector<int> class_of;              // per family member
    std::vector<std::vector<int>> classes;  // members, first is the representative
};

IsomClasses brute_isom_classes(const Crystal& M, int s, const std::vector<PMatrix>& family,
                               const SearchBudget& budget = {}, Exec exec = Exec::parallel);

}  // namespace fcr
