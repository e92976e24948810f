#include <benchmark/benchmark.h>

#include "pelab/adversary.hpp"
#include "pelab/families.hpp"
#include "pelab/locc.hpp"
#include "pelab/ops.hpp"
#include "pelab/rng.hpp"
#include "pelab/spectral.hpp"

using namespace pelab;

namespace {

DensityMatrix random_state(int qubits, std::uint64_t seed) {
    CounterRng rng(seed, 0xbe);
    const std::int64_t d = std::int64_t{1} << qubits;
    Matrix g(d, d);
    for (std::int64_t i = 0; i < d; ++i) {
        for (std::int64_t j = 0; j < d; ++j) {
            g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
    }
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix::unchecked(0.5 * (m + m.adjoint().eval()));
}

EfiInstance angle_instance() {
    EfiSpec s;
    s.family = EfiFamilyKind::angle;
    s.theta = 0.5235987755982988;
    s.n_qubits = 1;
    s.lambda = 3;
    return make_instance(s);
}

}  // namespace

static void bm_tensor(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    const DensityMatrix a = random_state(q, 1);
    const DensityMatrix b = random_state(q, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tensor(a, b));
    }
}
BENCHMARK(bm_tensor)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

static void bm_partial_trace(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    const DensityMatrix rho = random_state(q, 3);
    const Bipartition cut = Bipartition::leading(q / 2, q);
    for (auto _ : state) {
        benchmark::DoNotOptimize(partial_trace(rho, cut, Side::A));
    }
}
BENCHMARK(bm_partial_trace)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

static void bm_trace_distance(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    const DensityMatrix rho = random_state(q, 4);
    const DensityMatrix sig = random_state(q, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_distance(rho, sig));
    }
}
BENCHMARK(bm_trace_distance)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void bm_helstrom(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    const DensityMatrix rho = random_state(q, 6);
    const DensityMatrix sig = random_state(q, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(helstrom_povm(rho, sig));
    }
}
BENCHMARK(bm_helstrom)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void bm_apply_local_unitary(benchmark::State& state) {
    const int q = static_cast<int>(state.range(0));
    const DensityMatrix rho = random_state(q, 8);
    const Matrix h = hadamard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_unitary(rho, h, {q / 2}));
    }
}
BENCHMARK(bm_apply_local_unitary)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void bm_distill_protocol(benchmark::State& state) {
    const EfiInstance inst = angle_instance();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_distill_phi(inst));
    }
}
BENCHMARK(bm_distill_protocol)->Unit(benchmark::kMillisecond);

static void bm_build_pair(benchmark::State& state) {
    const EfiInstance inst = angle_instance();
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_pair(inst));
    }
}
BENCHMARK(bm_build_pair)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
