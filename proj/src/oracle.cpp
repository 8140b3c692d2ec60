#include "fcr/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <set>

namespace fcr {

namespace {

using u64 = std::uint64_t;
using Clock = std::chrono::steady_clock;

// The congruence A2 sigma(X) adj(A1) - det(A1) X = 0 mod p^{s + delta}, linear in X over Z.
struct Problem {
    long long p = 0;
    int n = 0, r1 = 0, r2 = 0, D = 0, s = 0, delta = 0, er = 0, L = 0;
    long long mod = 0;
    std::vector<long long> pw;
    std::vector<std::vector<long long>> F;  // image of each unit coordinate
    bool need_invertible = false;
    RingHandle F1 = nullptr;
    u64 nominal = 0;

    int need(int j) const { return std::min(j + delta - er, s + delta); }
};

long long to_ll(const Int& v) { return static_cast<long long>(v.get_si()); }

Problem make_problem(const PMatrix& A1in, const PMatrix& A2in, int s, bool need_invertible) {
    if (s < 1) throw ArgumentError("s must be at least 1");
    if (A1in.R->p != A2in.R->p || A1in.R->n != A2in.R->n) throw ArgumentError("matrices over different rings");
    Problem P;
    P.p = static_cast<long long>(A1in.R->p);
    P.n = A1in.R->n;
    P.r1 = A1in.rows;
    P.r2 = A2in.rows;
    P.D = P.r1 * P.r2 * P.n;
    P.s = s;
    int delta = valuation(determinant(A1in));
    if (delta >= A1in.R->N) throw PrecisionExhausted("det(phi1) vanishes at the working precision");
    P.delta = delta;
    RingHandle Rw = make_ring(A1in.R->p, P.n, s + delta);
    if (Rw->modulus() > Int(1) << 61) throw ResourceError("oracle modulus exceeds the native search range");
    PMatrix A1 = change_ring(A1in, Rw), A2 = change_ring(A2in, Rw);
    PMatrix adj = adjugate(A1);
    Zq det = determinant(A1);
    P.er = delta - min_valuation(adj);
    P.L = s + P.er;
    P.mod = to_ll(Rw->modulus());
    for (int k = 0; k <= s + delta; ++k) P.pw.push_back(to_ll(Rw->pw[k]));
    P.need_invertible = need_invertible;
    P.F1 = make_ring(A1in.R->p, P.n, 1);
    double bits = static_cast<double>(P.D) * P.L * std::log2(static_cast<double>(P.p));
    P.nominal = bits >= 63.5 ? UINT64_MAX : static_cast<u64>(std::llround(std::pow(static_cast<double>(P.p), P.D * P.L)));
    for (int i = 0; i < P.r2; ++i)
        for (int j = 0; j < P.r1; ++j)
            for (int a = 0; a < P.n; ++a) {
                PMatrix E(Rw, P.r2, P.r1);
                std::vector<Int> c(P.n, 0);
                c[a] = 1;
                E(i, j) = Zq(Rw, c);
                PMatrix img = A2 * frobenius(E, 1) * adj - det * E;
                std::vector<long long> v;
                for (const auto& z : img.a)
                    for (const auto& x : z.c) v.push_back(to_ll(x));
                P.F.push_back(v);
            }
    return P;
}

struct Shared {
    const SearchBudget* budget = nullptr;
    Clock::time_point start;
    std::atomic<u64> evaluated{0};
    std::atomic<bool> abort{false};
    bool count_budget = false;
};

class ShardSearch {
public:
    ShardSearch(const Problem& P, Shared& sh, bool stop_at_first) : P_(P), sh_(sh), stop_(stop_at_first) {}

    // Returns true if a solution was found in the shard.
    bool run(u64 shard) {
        std::vector<long long> x(P_.D, 0), r(P_.F[0].size(), 0);
        u64 k = shard;
        for (int u = 0; u < P_.D; ++u) {
            long long d = static_cast<long long>(k % P_.p);
            k /= P_.p;
            x[u] = d;
            if (d) add(r, P_.F[u], d);
        }
        tick();
        if (!passes(r, 1)) return false;
        if (P_.need_invertible && !invertible_mod_p(x)) return false;
        return descend(x, r, 2);
    }

    std::set<std::vector<long long>>& leaves() { return leaves_; }
    u64 evaluated() const { return local_; }

private:
    void add(std::vector<long long>& r, const std::vector<long long>& f, long long c) const {
        for (size_t i = 0; i < r.size(); ++i) {
            __int128 v = (__int128)r[i] + (__int128)c * f[i];
            v %= P_.mod;
            if (v < 0) v += P_.mod;
            r[i] = static_cast<long long>(v);
        }
    }

    bool passes(const std::vector<long long>& r, int j) const {
        int k = P_.need(j);
        if (k <= 0) return true;
        long long m = P_.pw[k];
        for (long long v : r)
            if (v % m != 0) return false;
        return true;
    }

    bool invertible_mod_p(const std::vector<long long>& x) const {
        PMatrix X(P_.F1, P_.r2, P_.r1);
        for (int u = 0; u < P_.r1 * P_.r2; ++u) {
            std::vector<Int> c(P_.n);
            for (int a = 0; a < P_.n; ++a) c[a] = static_cast<long>(x[u * P_.n + a] % P_.p);
            X.a[u] = Zq(P_.F1, c);
        }
        return determinant(X).is_unit();
    }

    void tick() {
        ++local_;
        u64 total = sh_.evaluated.fetch_add(1, std::memory_order_relaxed) + 1;
        if (sh_.count_budget && total > sh_.budget->max_candidates) {
            sh_.abort = true;
            throw BudgetExceeded("oracle search exceeded " + std::to_string(sh_.budget->max_candidates) + " nodes");
        }
        if ((local_ & 1023) == 0) {
            if (sh_.abort) throw BudgetExceeded("oracle search aborted");
            if (sh_.budget->timeout_seconds > 0 &&
                std::chrono::duration<double>(Clock::now() - sh_.start).count() > sh_.budget->timeout_seconds) {
                sh_.abort = true;
                throw BudgetExceeded("oracle search timed out");
            }
        }
    }

    void leaf(const std::vector<long long>& x) {
        std::vector<long long> key(x.size());
        for (size_t u = 0; u < x.size(); ++u) key[u] = x[u] % P_.pw[P_.s];
        leaves_.insert(std::move(key));
    }

    bool descend(std::vector<long long>& x, std::vector<long long>& r, int j) {
        if (j > P_.L) {
            if (!stop_) leaf(x);
            return true;
        }
        // j - 1 < L <= s + delta, so the step fits the residual modulus
        const long long step = P_.pw[j - 1];
        std::vector<long long> d(P_.D, 0);
        std::vector<long long> xr = x, rr = r;
        bool found = false;
        for (;;) {
            tick();
            if (passes(rr, j)) {
                if (descend(xr, rr, j + 1)) {
                    found = true;
                    if (stop_) return true;
                }
            }
            int u = 0;
            for (; u < P_.D; ++u) {
                if (d[u] < P_.p - 1) {
                    ++d[u];
                    xr[u] += step;
                    add(rr, P_.F[u], step);
                    break;
                }
                xr[u] -= (P_.p - 1) * step;
                add(rr, P_.F[u], -(P_.p - 1) * step);
                d[u] = 0;
            }
            if (u == P_.D) break;
        }
        return found;
    }

    const Problem& P_;
    Shared& sh_;
    bool stop_;
    u64 local_ = 0;
    std::set<std::vector<long long>> leaves_;
};

u64 shard_count(const Problem& P) {
    u64 c = 1;
    for (int u = 0; u < P.D; ++u) {
        if (c > UINT64_MAX / static_cast<u64>(P.p)) throw ResourceError("oracle shard count overflows");
        c *= static_cast<u64>(P.p);
    }
    return c;
}

struct ShardResult {
    bool found = false;
    u64 evaluated = 0;
    std::set<std::vector<long long>> leaves;
};

std::vector<ShardResult> run_serial(const Problem& P, Shared& sh, bool stop) {
    u64 shards = shard_count(P);
    std::vector<ShardResult> out(shards);
    for (u64 k = 0; k < shards; ++k) {
        ShardSearch search(P, sh, stop);
        out[k].found = search.run(k);
        out[k].evaluated = search.evaluated();
        out[k].leaves = std::move(search.leaves());
    }
    return out;
}

std::vector<ShardResult> run_parallel(const Problem& P, Shared& sh, bool stop) {
    u64 shards = shard_count(P);
    std::vector<ShardResult> out(shards);
    std::vector<std::exception_ptr> errors(shards);
#pragma omp parallel for schedule(dynamic)
    for (long long k = 0; k < static_cast<long long>(shards); ++k) {
        try {
            ShardSearch search(P, sh, stop);
            out[k].found = search.run(static_cast<u64>(k));
            out[k].evaluated = search.evaluated();
            out[k].leaves = std::move(search.leaves());
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<ShardResult> run(const Problem& P, const SearchBudget& budget, bool count_budget, bool stop, Exec exec,
                             SearchStats& stats) {
    Shared sh;
    sh.budget = &budget;
    sh.start = Clock::now();
    sh.count_budget = count_budget;
    std::vector<ShardResult> res = exec == Exec::parallel ? run_parallel(P, sh, stop) : run_serial(P, sh, stop);
    stats.nominal = P.nominal;
    stats.evaluated = 0;
    for (const auto& r : res) stats.evaluated += r.evaluated;
    return res;
}

}  // namespace

BruteHomResult brute_hom_s(const Crystal& M1, const Crystal& M2, int s, const SearchBudget& budget, Exec exec) {
    if (M1.scale != M2.scale) throw ArgumentError("Hom_s needs crystals with the same scale");
    Problem P = make_problem(M1.A, M2.A, s, false);
    if (P.nominal > budget.max_candidates)
        throw BudgetExceeded("oracle candidate count " + std::to_string(P.nominal) + " exceeds the budget " +
                             std::to_string(budget.max_candidates));
    BruteHomResult out;
    out.s = s;
    std::vector<ShardResult> res = run(P, budget, false, false, exec, out.stats);
    std::set<std::vector<long long>> all;
    for (auto& r : res) all.insert(r.leaves.begin(), r.leaves.end());
    RingHandle Rs = make_ring(M1.p(), M1.n(), s);
    for (const auto& key : all) {
        PMatrix X(Rs, P.r2, P.r1);
        for (int u = 0; u < P.r1 * P.r2; ++u) {
            std::vector<Int> c(P.n);
            for (int a = 0; a < P.n; ++a) c[a] = static_cast<long>(key[u * P.n + a]);
            X.a[u] = Zq(Rs, c);
        }
        out.solutions.push_back(X);
    }
    return out;
}

bool is_isomorphic_truncation(const Crystal& M, const PMatrix& g1, const PMatrix& g2, int s,
                              const SearchBudget& budget, Exec exec, SearchStats* stats) {
    Crystal C1 = twist(M, g1), C2 = twist(M, g2);
    Problem P = make_problem(C1.A, C2.A, s, true);
    SearchStats local;
    std::vector<ShardResult> res = run(P, budget, true, true, exec, local);
    if (stats) *stats = local;
    for (const auto& r : res)
        if (r.found) return true;
    return false;
}

IsomClasses brute_isom_classes(const Crystal& M, int s, const std::vector<PMatrix>& family,
                               const SearchBudget& budget, Exec exec) {
    IsomClasses out;
    for (int k = 0; k < static_cast<int>(family.size()); ++k) {
        int cls = -1;
        for (int c = 0; c < static_cast<int>(out.classes.size()) && cls < 0; ++c)
            if (is_isomorphic_truncation(M, family[out.classes[c][0]], family[k], s, budget, exec)) cls = c;
        if (cls < 0) {
            cls = static_cast<int>(out.classes.size());
            out.classes.emplace_back();
        }
        out.classes[cls].push_back(k);
        out.class_of.push_back(cls);
    }
    return out;
}

}  // namespace fcr
