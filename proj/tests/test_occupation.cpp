#include <doctest.h>

#include "ppp/error.hpp"
#include "ppp/occupation.hpp"
#include "ppp/quad.hpp"
#include "ppp/rigidity.hpp"
#include "ppp/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ppp;

namespace {

// Plain 2D Gauss-Legendre over I_0 x I_n of -det K, as an oracle.
double cov_2d(const MatrixKernel& k, double lambda, long n) {
    const auto& gl = quad::gauss_legendre(24);
    int m = 8;
    double h = lambda / m, s = 0;
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < 24; ++i) {
            double x = -lambda / 2 + (a + 0.5 * (1 + gl.x[i])) * h;
            for (int b = 0; b < m; ++b)
                for (int j = 0; j < 24; ++j) {
                    double y = n * lambda - lambda / 2 + (b + 0.5 * (1 + gl.x[j])) * h;
                    s += 0.25 * h * h * gl.w[i] * gl.w[j] * rho2_truncated(k, x, y);
                }
        }
    return s;
}

}  // namespace

TEST_CASE("single covariances") {
    auto k = matrix_kernel(KernelName::sine1);
    for (long n : {1, 3, 7}) CHECK(std::abs(occupation_cov(k, 1, n) - cov_2d(k, 1, n)) < 1e-9);
    auto k4 = matrix_kernel(KernelName::sine4);
    CHECK(std::abs(occupation_cov(k4, 2, 4) - cov_2d(k4, 2, 4)) < 1e-9);
    for (long n = 1; n <= 5; ++n) CHECK(occupation_cov(k, 1.3, n) == occupation_cov(k, 1.3, -n));
    CHECK_THROWS_AS(occupation_cov(matrix_kernel(KernelName::bessel4, 1.0), 1, 0), ContractViolation);
    CHECK_THROWS_AS(IntervalGrid(0), ContractViolation);
}

TEST_CASE("n = 0 equals the indicator variance") {
    for (auto name : {KernelName::sine1, KernelName::sine4}) {
        auto k = matrix_kernel(name);
        double a = occupation_cov(k, 1, 0);
        double b = variance_additive(k, indicator_statistic(-0.5, 0.5)).variance;
        CHECK(std::abs(a - b) < 1e-4);
    }
}

TEST_CASE("inverse-square envelope for sine1") {
    auto k = matrix_kernel(KernelName::sine1);
    double C = StationaryProfile(k).fitted_tail_constant();
    double c50 = occupation_cov(k, 1, 50);
    // Convexity of 1/u^2 over the tent adds a relative 1/n^2 correction.
    CHECK(std::abs(c50) <= C / (50.0 * 50.0) * (1 + 1.0 / (50.0 * 50.0)));
    CHECK(c50 < 0);
}

TEST_CASE("series, sums and tails") {
    auto s1 = covariance_series(matrix_kernel(KernelName::sine1), 1, 256);
    auto ser = covariance_series(matrix_kernel(KernelName::sine1), 1, 256, Exec::Serial);
    CHECK(s1.values == ser.values);
    CHECK(cov_total_sum(s1, 0).sum == s1.values[0]);
    CHECK(std::abs(cov_total_sum(s1, 100).sum) <= 0.02);
    auto t = cov_total_sum(s1, 100);
    CHECK(std::abs(t.sum + t.tail_estimate) < 1e-5);
    CHECK(s1.tail_constant == doctest::Approx(-1 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-2));
    double worst = 0, first = 10 * cov_abs_tail(s1, 10);
    for (int N = 10; N <= 100; N += 10) worst = std::max(worst, N * cov_abs_tail(s1, N));
    CHECK(worst <= 2 * first);
    CHECK(cov_abs_tail(s1, 400) > 0);
    CHECK_THROWS_AS(cov_total_sum(s1, 300), ContractViolation);

    auto s4 = covariance_series(matrix_kernel(KernelName::sine4), 2, 256);
    CHECK(s4.tail == CovTail::InverseSquare);
    CHECK(std::abs(cov_total_sum(s4, 200).sum) <= 0.02);
    auto h = covariance_series(matrix_kernel(KernelName::sine4), 1, 64);
    CHECK(h.tail == CovTail::Harmonic);
    CHECK(std::isinf(cov_abs_tail(h, 10)));
}

TEST_CASE("divergence probe") {
    auto S = divergence_probe_sine4_lambda1({50, 100, 200});
    CHECK(S[0] <= S[1]);
    CHECK(S[1] <= S[2]);
    // Terms near the cos-over-x envelope: Cov_n ~ (-1)^n / (2 pi^2 n).
    auto k = matrix_kernel(KernelName::sine4);
    for (long n : {60, 61}) {
        double env = 1 / (2 * std::numbers::pi * std::numbers::pi * n);
        CHECK(std::abs(std::abs(occupation_cov(k, 1, n)) - env) < 1.0 / (n * n));
    }
}

TEST_CASE("csv and json") {
    auto s = covariance_series(matrix_kernel(KernelName::sine1), 1, 16);
    std::ostringstream os;
    write_covariance_csv(os, s);
    CHECK(os.str().rfind("process,lambda,n,cov\nsine1,1,-16,", 0) == 0);
    auto j = nlohmann::json::parse(covariance_summary_json(s));
    CHECK(j["process"] == "sine1");
    CHECK(j["total_sums"].size() == 2);
}
