#pragma once

#include "fcr/crystal.hpp"
#include "fcr/lattice.hpp"

namespace fcr {

struct LevelPart {
    PMatrix basis;   // d x k in H coordinates, saturated
    PMatrix coords;  // k x d, coords * basis = 1
    PMatrix op;      // phi12 on part coordinates is p^{-c} op sigma
    Lattice O;       // in part coordinates
    std::vector<Slope> slopes;  // slopes of phi12 on the part
    int iterations = 0;
    int dim() const { return basis.cols; }
};

struct LevelModule {
    Crystal hom;  // H12 with phi12
    LevelPart plus, zero, minus;
    int zero_forward_iterations = 0;
    int zero_backward_iterations = 0;
    bool zero_sides_agree = true;  // forward, backward and two-sided chains coincide
    PMatrix O_basis;               // d x d, columns plus | zero | minus
    Lattice O;
    int ell = 0;
    int precision = 0;
    int iteration_cap = 0;
};

struct LevelOptions {
    int initial_precision = 0;  // 0 picks a default from the slope threshold
    int max_precision = 4096;
    int stable_runs = 3;  // consecutive doublings that must agree
};

// One computation at a fixed precision.
LevelModule level_module_at(const Crystal& M1, const Crystal& M2, int N);
// Re-runs at doubled precision until stable_runs consecutive results agree.
LevelModule level_module(const Crystal& M1, const Crystal& M2, const LevelOptions& opt = {});
int level_torsion(const Crystal& M1, const Crystal& M2, const LevelOptions& opt = {});

// p^c phi12(X) for X in H coordinates (d x 1).
PMatrix phi12_scaled(const LevelModule& L, const PMatrix& X);
// The canonical X in O with phi12(X) - X = x; x in O, any precision up to L.precision.
PMatrix solve_phi_minus_id(const LevelModule& L, const PMatrix& x);
bool in_level_module(const LevelModule& L, const PMatrix& x);

}  // namespace fcr
