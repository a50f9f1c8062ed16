#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ensplace/kernels.hpp"

using namespace ensplace;

namespace {

std::vector<double> power_poles(std::size_t M, double d) {
    std::vector<double> a(M);
    for (std::size_t m = 0; m < M; ++m) a[m] = std::pow(static_cast<double>(m + 1), -d);
    return a;
}

template <auto Kernel>
void BM_placement_products(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0));
    const std::size_t M = 4 * N;
    const auto a = power_poles(M, 3.5);
    std::vector<cplx> lambda(M);
    for (std::size_t m = 0; m < M; ++m) lambda[m] = -a[m];
    const std::vector<double> offset(N, 0.0);
    std::vector<kernels::LogProduct> out(N);
    const kernels::PlacementProductArgs args{a, lambda, offset, M, 700.0};
    for (auto _ : state) {
        Kernel(args, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N * M));
}

template <auto Kernel>
void BM_phi_matrix(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(N), b(N);
    for (std::size_t n = 0; n < N; ++n) {
        a[n] = std::pow(0.5, 1.0 + n % 60);
        b[n] = std::pow(0.8, 1.0 + n % 60);
    }
    RealMatrix out(N, N);
    for (auto _ : state) {
        Kernel(a, b, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N * N));
}

template <auto Kernel>
void BM_matmul(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0));
    ComplexMatrix x(N, N), y(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            x(i, j) = {std::sin(1.0 + i + 2.0 * j), std::cos(1.0 * i)};
            y(i, j) = {std::cos(3.0 * i + j), std::sin(1.0 * j)};
        }
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N * N * N));
}

template <auto Kernel>
void BM_h_samples(benchmark::State& state) {
    const auto S = static_cast<std::size_t>(state.range(0));
    const std::size_t N = 256;
    std::vector<double> a(N);
    std::vector<cplx> kb(N);
    for (std::size_t n = 0; n < N; ++n) {
        a[n] = std::pow(0.9, static_cast<double>(n + 1));
        kb[n] = {std::sin(1.0 + n), 0.0};
    }
    std::vector<cplx> z(S), out(S);
    for (std::size_t j = 0; j < S; ++j) z[j] = std::polar(2.0, 2.0 * std::numbers::pi * j / S);
    for (auto _ : state) {
        Kernel(a, kb, z, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N * S));
}

using ComplexMul = ComplexMatrix (*)(const ComplexMatrix&, const ComplexMatrix&);
constexpr ComplexMul serial_cmul = kernels::serial::matmul;
constexpr ComplexMul omp_cmul = kernels::omp::matmul;

}  // namespace

BENCHMARK(BM_placement_products<kernels::serial::placement_products>)->Name("placement_products/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_placement_products<kernels::omp::placement_products>)->Name("placement_products/omp")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(BM_phi_matrix<kernels::serial::phi_matrix>)->Name("phi_matrix/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_phi_matrix<kernels::omp::phi_matrix>)->Name("phi_matrix/omp")->Arg(512)->Arg(2048)->UseRealTime();
BENCHMARK(BM_matmul<serial_cmul>)->Name("matmul_complex/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_matmul<omp_cmul>)->Name("matmul_complex/omp")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(BM_h_samples<kernels::serial::h_samples>)->Name("h_samples/serial")->Arg(4096)->Arg(65536);
BENCHMARK(BM_h_samples<kernels::omp::h_samples>)->Name("h_samples/omp")->Arg(4096)->Arg(65536)->UseRealTime();

BENCHMARK_MAIN();
