// Parallel kernels against their serial reference implementations.
#include <benchmark/benchmark.h>

#include "fcr/invariants.hpp"
#include "fcr/oracle.hpp"

using namespace fcr;

namespace {

Crystal upper(int N) {
    RingHandle R = make_ring(2, 1, N);
    PMatrix A(R, 2, 2);
    A(0, 0) = Zq(R, 2);
    A(0, 1) = Zq(R, 1);
    A(1, 1) = Zq(R, 4);
    return make_crystal(A);
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_brute_hom_s(benchmark::State& state) {
    Crystal M = upper(12);
    SearchBudget budget;
    budget.max_candidates = std::uint64_t{1} << 40;
    const int s = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(brute_hom_s(M, M, s, budget, exec_of(state)).solutions.size());
    label(state);
}

void BM_truncation_isomorphism(benchmark::State& state) {
    Crystal M = upper(12);
    RingHandle R = M.ring();
    PMatrix one = PMatrix::identity(R, 2);
    PMatrix g = one;
    g(0, 1) += Zq(R, 2);  // separated from M at s = 2, so the whole tree is searched
    for (auto _ : state) benchmark::DoNotOptimize(is_isomorphic_truncation(M, one, g, 2, {}, exec_of(state)));
    label(state);
}

void BM_gamma1_sweep(benchmark::State& state) {
    std::vector<PermInstance> inst = permutation_instances(static_cast<int>(state.range(1)), {0, 1, 2});
    for (auto _ : state) benchmark::DoNotOptimize(gamma1_sweep(inst, exec_of(state)).data());
    state.SetItemsProcessed(state.iterations() * static_cast<long>(inst.size()));
    label(state);
}

}  // namespace

BENCHMARK(BM_brute_hom_s)->ArgsProduct({{0, 1}, {1, 2}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_truncation_isomorphism)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_gamma1_sweep)->ArgsProduct({{0, 1}, {5, 6}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
