#include "fcr/invariants.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#include "fcr/level.hpp"

namespace fcr {

Gamma1Data gamma1_permutation(const std::vector<int>& e, const std::vector<int>& pi) {
    const int r = static_cast<int>(e.size());
    if (static_cast<int>(pi.size()) != r) throw ArgumentError("permutation and exponent lengths differ");
    std::vector<char> seen(r, 0);
    for (int x : pi) {
        if (x < 0 || x >= r || seen[x]) throw ArgumentError("pi is not a permutation");
        seen[x] = 1;
    }
    Gamma1Data g;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (e[j] > e[i]) {
                g.plus.push_back({i, j});
            } else if (e[j] == e[i]) {
                g.zero.push_back({i, j});
            } else {
                g.minus.push_back({i, j});
                // walk the pi x pi orbit until it leaves the zero set; (i, j) itself is a return point
                int a = pi[i], b = pi[j], nu = 1;
                while (e[a] == e[b]) {
                    a = pi[a];
                    b = pi[b];
                    ++nu;
                }
                g.nu.push_back(nu);
                if (e[b] > e[a]) g.minus_pi.push_back({i, j});
            }
        }
    g.gamma1 = static_cast<int>(g.minus_pi.size());
    g.orbit_dim = r * r - g.gamma1;
    return g;
}

std::vector<PermInstance> permutation_instances(int r, const std::vector<int>& values) {
    if (r < 1) throw ArgumentError("rank must be positive");
    if (values.empty()) throw ArgumentError("exponent values must be nonempty");
    std::vector<PermInstance> out;
    const int k = static_cast<int>(values.size());
    std::vector<int> idx(r, 0);
    for (;;) {
        std::vector<int> e(r);
        for (int i = 0; i < r; ++i) e[i] = values[idx[r - 1 - i]];
        std::vector<int> pi(r);
        std::iota(pi.begin(), pi.end(), 0);
        do {
            out.push_back({e, pi});
        } while (std::next_permutation(pi.begin(), pi.end()));
        int i = 0;
        while (i < r && idx[i] == k - 1) idx[i++] = 0;
        if (i == r) break;
        ++idx[i];
    }
    return out;
}

std::vector<int> gamma1_sweep(const std::vector<PermInstance>& inst, Exec exec) {
    std::vector<int> out(inst.size());
    const long long count = static_cast<long long>(inst.size());
    if (exec == Exec::serial) {
        for (long long k = 0; k < count; ++k) out[k] = gamma1_permutation(inst[k].e, inst[k].pi).gamma1;
        return out;
    }
    std::vector<std::exception_ptr> errors(inst.size());
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < count; ++k) {
        try {
            out[k] = gamma1_permutation(inst[k].e, inst[k].pi).gamma1;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

IsomNumber isom_number(const Crystal& M) {
    IsomNumber out;
    if (!is_ordinary(M)) {
        out.ell = level_torsion(M, M);
        out.n = out.ell;
        out.provenance = "main-theorem";
    } else if (newton_slopes(M).size() == 1) {
        out.n = 0;
        out.provenance = "ordinary-isoclinic";
    } else {
        out.n = 1;
        out.provenance = "ordinary-split";
    }
    return out;
}

int rank2_closed_form(const Crystal& M) {
    if (M.rank() != 2) throw ArgumentError("closed form needs rank 2");
    HodgeData h = hodge_slopes(M);
    std::vector<Slope> nw = newton_slopes(M);
    const int e0 = h.e[0];
    std::vector<Rational> newton = expand_slopes(nw);
    for (auto& x : newton) x -= e0;
    const int e = h.e[1] - e0;
    if (newton == std::vector<Rational>{Rational(0), Rational(e)}) return 1;
    if (nw.size() == 1) return e;
    if (newton[0].denominator() != 1) throw Error("non-isoclinic rank-2 slope is not integral");
    return 2 * static_cast<int>(newton[0].numerator());
}

bool InvariantReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

template <class Fn>
void guarded(InvariantReport& rep, const std::string& field, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        rep.errors.push_back({field, e.what()});
    }
}

}  // namespace

InvariantReport report(const Crystal& M, const ReportOptions& opt) {
    InvariantReport rep;
    guarded(rep, "hodge", [&] { rep.hodge = hodge_slopes(M); });
    guarded(rep, "newton", [&] { rep.newton = newton_slopes(M); });
    guarded(rep, "ordinary", [&] { rep.ordinary = is_ordinary(M); });
    guarded(rep, "ell", [&] { rep.ell = level_torsion(M, M); });
    guarded(rep, "n", [&] { rep.n = isom_number(M); });
    if (M.rank() == 2) guarded(rep, "closed_form", [&] { rep.closed_form = rank2_closed_form(M); });
    if (opt.permutation)
        guarded(rep, "gamma1", [&] { rep.gamma1 = gamma1_permutation(opt.permutation->e, opt.permutation->pi); });
    if (opt.tower_sweep) {
        guarded(rep, "e_hat", [&] {
            int cap = opt.cap > 0 ? opt.cap : (rep.ell ? *rep.ell + 3 : 6);
            rep.e_hat = endo_number_hat(M, M, cap, opt.tower);
            if (!rep.e_hat->conclusive) rep.errors.push_back({"e_hat", "tower sweep did not stabilize"});
        });
    }

    if (rep.n && rep.n->provenance == "main-theorem" && rep.ell)
        rep.checks.push_back({"n-equals-ell", rep.n->n == *rep.ell, ""});
    if (rep.ordinary && *rep.ordinary && rep.ell)
        rep.checks.push_back({"ordinary-ell-zero", *rep.ell == 0, "ell = " + std::to_string(*rep.ell)});
    if (rep.e_hat && rep.e_hat->conclusive && rep.ell)
        rep.checks.push_back({"ell-equals-e-hat", rep.e_hat->e_hat == *rep.ell,
                              "ell = " + std::to_string(*rep.ell) + ", e_hat = " + std::to_string(rep.e_hat->e_hat)});
    if (rep.closed_form && rep.n)
        rep.checks.push_back({"n-equals-closed-form", rep.n->n == *rep.closed_form,
                              "n = " + std::to_string(rep.n->n) + ", closed form = " + std::to_string(*rep.closed_form)});
    if (rep.gamma1 && rep.ordinary)
        rep.checks.push_back({"gamma1-zero-iff-ordinary", (rep.gamma1->gamma1 == 0) == *rep.ordinary,
                              "gamma1 = " + std::to_string(rep.gamma1->gamma1)});
    if (opt.oracle) {
        guarded(rep, "oracle", [&] {
            HomGroup H = hom_s(M, M, opt.oracle_s);
            BruteHomResult B = brute_hom_s(M, M, opt.oracle_s, opt.budget);
            Int order = 1;
            for (int i = 0; i < H.order_exponent; ++i) order *= static_cast<long>(M.p());
            bool ok = Int(static_cast<unsigned long>(B.solutions.size())) == order;
            for (const auto& X : B.solutions) ok = ok && H.contains(X);
            rep.checks.push_back({"oracle-hom-s", ok,
                                  "s = " + std::to_string(opt.oracle_s) + ", |H| = " +
                                      std::to_string(B.solutions.size())});
        });
    }
    return rep;
}

}  // namespace fcr
