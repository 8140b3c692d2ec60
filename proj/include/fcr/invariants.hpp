#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcr/crystal.hpp"
#include "fcr/hom.hpp"
#include "fcr/oracle.hpp"

namespace fcr {

using IndexPair = std::pair<int, int>;

struct Gamma1Data {
    std::vector<IndexPair> plus, zero, minus;  // 0-based pairs (i, j)
    std::vector<int> nu;                       // first return time, per entry of minus
    std::vector<IndexPair> minus_pi;           // pairs of minus landing in plus
    int gamma1 = 0;
    int orbit_dim = 0;
};

// pi is 0-based: v_i -> p^{e_i} v_{pi(i)}.
Gamma1Data gamma1_permutation(const std::vector<int>& e, const std::vector<int>& pi);

struct PermInstance {
    std::vector<int> e, pi;
};

// Every (e, pi) with e_i in values and pi in S_r, e varying slowest, pi in lexicographic order.
std::vector<PermInstance> permutation_instances(int r, const std::vector<int>& values);
std::vector<int> gamma1_sweep(const std::vector<PermInstance>& inst, Exec exec = Exec::parallel);

struct IsomNumber {
    int n = 0;
    std::string provenance;  // "main-theorem", "ordinary-isoclinic" or "ordinary-split"
    int ell = -1;            // level torsion when it was computed
};

IsomNumber isom_number(const Crystal& M);
// From Newton and Hodge slopes alone; rank 2 only.
int rank2_closed_form(const Crystal& M);

struct ReportCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ReportOptions {
    bool tower_sweep = true;
    int cap = -1;  // -1 picks ell + 3
    std::vector<int> tower = {1, 2, 3, 4};
    bool oracle = false;
    int oracle_s = 1;
    SearchBudget budget;
    std::optional<PermInstance> permutation;
};

struct InvariantReport {
    std::optional<HodgeData> hodge;
    std::optional<std::vector<Slope>> newton;
    std::optional<bool> ordinary;
    std::optional<int> ell;
    std::optional<IsomNumber> n;
    std::optional<EndoNumberHat> e_hat;
    std::optional<Gamma1Data> gamma1;
    std::optional<int> closed_form;
    std::vector<std::pair<std::string, std::string>> errors;  // field, message
    std::vector<ReportCheck> checks;
    bool all_pass() const;
};

InvariantReport report(const Crystal& M, const ReportOptions& opt = {});

}  // namespace fcr
