#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ensplace/kernels.hpp"

using namespace ensplace;

namespace {

std::vector<double> geometric_poles(std::size_t M, double r) {
    std::vector<double> a(M);
    for (std::size_t m = 0; m < M; ++m) a[m] = std::pow(r, static_cast<double>(m + 1));
    return a;
}

template <typename T>
Matrix<T> random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix<T> out(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if constexpr (std::is_same_v<T, cplx>) {
                out(i, j) = {g(rng), g(rng)};
            } else {
                out(i, j) = g(rng);
            }
        }
    return out;
}

template <typename T>
bool identical(const Matrix<T>& x, const Matrix<T>& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (x(i, j) != y(i, j)) return false;
    return true;
}

}  // namespace

TEST_CASE("placement products agree bit for bit") {
    for (std::size_t M : {1u, 7u, 200u, 2048u}) {
        const auto a = geometric_poles(M, 0.7);
        std::vector<cplx> lambda(M);
        for (std::size_t m = 0; m < M; ++m) lambda[m] = {-a[m], 0.1 * a[m]};
        const std::size_t N = std::min<std::size_t>(M, 64);
        std::vector<double> offset(N, 0.0);
        kernels::PlacementProductArgs args{a, lambda, offset, M, 700.0};
        std::vector<kernels::LogProduct> s(N), o(N);
        kernels::serial::placement_products(args, s);
        kernels::omp::placement_products(args, o);
        for (std::size_t n = 0; n < N; ++n) {
            CHECK(s[n].log_abs == o[n].log_abs);
            CHECK(s[n].arg == o[n].arg);
            CHECK(s[n].tripped == o[n].tripped);
        }
    }
}

TEST_CASE("placement product guard trips identically") {
    const std::size_t M = 4096;
    std::vector<double> a(M);
    for (std::size_t m = 0; m < M; ++m) a[m] = std::pow(static_cast<double>(m + 1), -1.5);
    const std::vector<cplx> lambda(M);
    const std::size_t N = 1024;
    const std::vector<double> offset(N, 0.0);
    kernels::PlacementProductArgs args{a, lambda, offset, M, 700.0};
    std::vector<kernels::LogProduct> s(N), o(N);
    kernels::serial::placement_products(args, s);
    kernels::omp::placement_products(args, o);
    std::size_t trips = 0;
    for (std::size_t n = 0; n < N; ++n) {
        CHECK(s[n].tripped == o[n].tripped);
        CHECK(s[n].trip_index == o[n].trip_index);
        CHECK(s[n].trip_log_abs == o[n].trip_log_abs);
        trips += s[n].tripped ? 1 : 0;
    }
    CHECK(trips > 0);
}

TEST_CASE("phi matrix and decay violation agree") {
    for (std::size_t N : {1u, 5u, 33u, 200u}) {
        const auto a = geometric_poles(N, 0.5);
        std::vector<double> abs_b(N);
        for (std::size_t n = 0; n < N; ++n) abs_b[n] = std::pow(0.8, static_cast<double>(n + 1));
        RealMatrix s(N, N), o(N, N);
        kernels::serial::phi_matrix(a, abs_b, s);
        kernels::omp::phi_matrix(a, abs_b, o);
        CHECK(identical(s, o));
        CHECK(kernels::serial::decay_violation(s, 1.0, 0.8) == kernels::omp::decay_violation(o, 1.0, 0.8));
        CHECK(kernels::serial::decay_violation(s, 0.1, 0.2) == kernels::omp::decay_violation(o, 0.1, 0.2));
    }
}

TEST_CASE("matmul agrees and matches a hand product") {
    RealMatrix x(2, 3), y(3, 2);
    const double xv[] = {1, 2, 3, 4, 5, 6};
    const double yv[] = {7, 8, 9, 10, 11, 12};
    for (std::size_t i = 0; i < 6; ++i) {
        x(i / 3, i % 3) = xv[i];
        y(i / 2, i % 2) = yv[i];
    }
    const auto p = kernels::serial::matmul(x, y);
    CHECK(p(0, 0) == 58.0);
    CHECK(p(0, 1) == 64.0);
    CHECK(p(1, 0) == 139.0);
    CHECK(p(1, 1) == 154.0);

    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 17u, 96u}) {
        const auto a = random_matrix<double>(n, n + 3, rng);
        const auto b = random_matrix<double>(n + 3, n, rng);
        CHECK(identical(kernels::serial::matmul(a, b), kernels::omp::matmul(a, b)));
        const auto ca = random_matrix<cplx>(n, n, rng);
        const auto cb = random_matrix<cplx>(n, n, rng);
        CHECK(identical(kernels::serial::matmul(ca, cb), kernels::omp::matmul(ca, cb)));
    }
}

TEST_CASE("h samples agree") {
    const std::size_t N = 24;
    const auto a = geometric_poles(N, 0.5);
    std::vector<cplx> kb(N);
    for (std::size_t n = 0; n < N; ++n) kb[n] = {std::sin(1.0 + n), std::cos(2.0 * n)};
    std::vector<cplx> z(1024);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::polar(2.0, 2.0 * M_PI * j / z.size());
    std::vector<cplx> s(z.size()), o(z.size());
    kernels::serial::h_samples(a, kb, z, s);
    kernels::omp::h_samples(a, kb, z, o);
    CHECK(s == o);
    const std::vector<cplx> zero(N);
    kernels::serial::h_samples(a, zero, z, s);
    for (const auto& v : s) CHECK(v == cplx{1.0});
}
