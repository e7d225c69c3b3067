// bench_core.cpp — Microbenchmarks of the numerical kernels behind the propagator

#include <benchmark/benchmark.h>

#include <random>

#include "floquet_if/bath.hpp"
#include "floquet_if/embedding.hpp"
#include "floquet_if/floquet.hpp"
#include "floquet_if/linalg.hpp"

using namespace floquet;

namespace {

Matrix random_matrix(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    return a;
}

bath::BathSpec ohmic() {
    bath::BathSpec b;
    b.density = bath::SpectralDensityOhmic{0.1, 2.5};
    return b;
}

bath::ExponentialBathFit fit(int K) {
    bath::FitOptions fo;
    fo.terms = K;
    return bath::fit_exponentials(ohmic(), fo);
}

void BM_MatrixExponential(benchmark::State& state) {
    const Matrix a = 0.1 * random_matrix(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(num::matrix_exponential(a));
}
BENCHMARK(BM_MatrixExponential)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EigGeneral(benchmark::State& state) {
    const Matrix a = random_matrix(state.range(0), 2);
    num::EigOptions eo;
    eo.compute_reconstruction = false;
    for (auto _ : state) benchmark::DoNotOptimize(num::eig_general(a, eo));
}
BENCHMARK(BM_EigGeneral)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ExponentialFit(benchmark::State& state) {
    const auto spec = ohmic();
    bath::FitOptions fo;
    fo.terms = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bath::fit_exponentials(spec, fo));
}
BENCHMARK(BM_ExponentialFit)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BuildSemigroupIf(benchmark::State& state) {
    const auto f = fit(static_cast<int>(state.range(0)));
    Matrix sz = Matrix::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    const auto gen = embedding::build_environment_generator(f, {}, sz);
    for (auto _ : state) benchmark::DoNotOptimize(embedding::build_semigroup_if(gen, 0.05));
    state.counters["chi"] = static_cast<double>(gen.chi);
}
BENCHMARK(BM_BuildSemigroupIf)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ApplyPeriod(benchmark::State& state) {
    const auto f = fit(static_cast<int>(state.range(0)));
    const auto m = model::single_spin(1.0, model::DriveType::transversal, 1.0, 10.0);
    const auto grid = model::TrotterGrid::for_drive(10.0, kPi / 60.0);
    const auto gen = embedding::build_environment_generator(f, {}, m.coupling);
    const auto sg = std::make_shared<const embedding::SemiGroupIF>(embedding::build_semigroup_if(gen, grid.dt));
    const auto fp = engine::assemble_step_propagators(sg, m, grid);
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    Vector w = sg->embed(rho);
    for (auto _ : state) {
        w = fp.apply_period(w);
        benchmark::DoNotOptimize(w.data());
    }
    state.counters["chi"] = static_cast<double>(sg->chi);
}
BENCHMARK(BM_ApplyPeriod)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
