// Serial reference kernels against their OpenMP counterparts, plus the two
// trajectory paths on a desk-scale model.
#include "acl/experiments.hpp"
#include "acl/kernels.hpp"
#include "acl/randmat.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace acl;

ComplexVector random_state(std::size_t n) {
    Xoshiro256 rng(7, kPhaseStreamTag);
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    return v.normalized();
}

kernels::Dims dims_of(const benchmark::State& state) {
    return {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1))};
}

std::span<const cplx> view(const ComplexVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

template <auto Kernel>
void BM_reduce(benchmark::State& state) {
    const auto dims = dims_of(state);
    const ComplexVector psi = random_state(dims.world());
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(view(psi), dims));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(dims.world()));
}

template <auto Kernel>
void BM_product_expectation(benchmark::State& state) {
    const auto dims = dims_of(state);
    const ComplexVector psi = random_state(dims.world());
    const ComplexMatrix q = sample_hermitian({dims.n_sys, 1, MatrixLabel::Environment}).matrix();
    const ComplexMatrix b = sample_hermitian({dims.n_env, 2, MatrixLabel::Interaction}).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(q, b, view(psi), dims));
}

template <auto Kernel>
void BM_propagate(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0)) * static_cast<std::size_t>(state.range(1));
    const ComplexVector alpha = random_state(n);
    std::vector<double> energies(n);
    for (std::size_t i = 0; i < n; ++i) energies[i] = 0.01 * static_cast<double>(i);
    std::vector<cplx> out(n);
    for (auto _ : state) {
        Kernel(view(alpha), energies, 3.7, out);
        benchmark::DoNotOptimize(out.data());
    }
}

#define ACL_DIMS Args({10, 120})->Args({30, 600})

BENCHMARK(BM_reduce<kernels::serial::reduce_to_system>)->Name("reduce_to_system/serial")->ACL_DIMS;
BENCHMARK(BM_reduce<kernels::parallel::reduce_to_system>)->Name("reduce_to_system/parallel")->ACL_DIMS;
BENCHMARK(BM_reduce<kernels::serial::reduce_to_environment>)->Name("reduce_to_environment/serial")->ACL_DIMS;
BENCHMARK(BM_reduce<kernels::parallel::reduce_to_environment>)->Name("reduce_to_environment/parallel")->ACL_DIMS;
BENCHMARK(BM_product_expectation<kernels::serial::product_expectation>)->Name("product_expectation/serial")->ACL_DIMS;
BENCHMARK(BM_product_expectation<kernels::parallel::product_expectation>)->Name("product_expectation/parallel")->ACL_DIMS;
BENCHMARK(BM_propagate<kernels::serial::propagate>)->Name("propagate/serial")->ACL_DIMS;
BENCHMARK(BM_propagate<kernels::parallel::propagate>)->Name("propagate/parallel")->ACL_DIMS;

const Model& desk_model() {
    static const Model m = [] {
        ModelParams p;
        p.n_sys = 10;
        p.n_env = 120;
        p.coupling = 0.224;
        return build_model(p);
    }();
    return m;
}

template <bool Batched>
void BM_trajectory(benchmark::State& state) {
    const Model& m = desk_model();
    const auto prep = prepare_initial_state(m, {60, 8.0, 0.0});
    const auto times = TimeGrid{default_horizon(m.world), static_cast<std::size_t>(state.range(0))}.times();
    for (auto _ : state) {
        auto samples = Batched ? observe_trajectory(m, prep.eigen, times) : observe_trajectory_serial(m, prep.eigen, times);
        benchmark::DoNotOptimize(samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_trajectory<false>)->Name("observe_trajectory/serial")->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_trajectory<true>)->Name("observe_trajectory/batched")->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
