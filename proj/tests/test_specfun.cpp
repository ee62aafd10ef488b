#include <doctest.h>

#include "ppp/error.hpp"
#include "ppp/quad.hpp"
#include "ppp/specfun.hpp"

#include <cmath>
#include <numbers>

using namespace ppp;

namespace {

// Power series of J_nu with a bound on the first omitted term.
double series_j(double nu, double x, int terms, double* remainder = nullptr) {
    double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1), sum = 0;
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= -0.25 * x * x / ((k + 1) * (k + 1 + nu));
    }
    if (remainder) *remainder = std::abs(term);
    return sum;
}

double series_si(double x) {
    double sum = 0, term = x;
    for (int k = 0; k < 60; ++k) {
        sum += term / (2 * k + 1);
        term *= -x * x / ((2 * k + 2) * (2 * k + 3));
    }
    return sum;
}

}  // namespace

TEST_CASE("bessel_j values") {
    CHECK(bessel_j(BesselOrder(0), 0) == 1.0);
    double x = 1e-3;
    CHECK(bessel_j(BesselOrder(1), x) == doctest::Approx(x / 2).epsilon(1e-6));
    double rem = 0;
    double ref = series_j(0, 2.0, 40, &rem);
    CHECK(rem < 1e-30);
    CHECK(std::abs(bessel_j(BesselOrder(0), 2.0) - ref) < 1e-14);
    CHECK(std::abs(bessel_j(BesselOrder(1.5), 3.7) - series_j(1.5, 3.7, 60)) < 1e-13);
}

TEST_CASE("bessel_j domain") {
    CHECK_THROWS_AS(BesselOrder(-1), DomainError);
    CHECK_THROWS_AS(bessel_j(BesselOrder(0), -1), DomainError);
    CHECK_THROWS_AS(bessel_j_deriv(BesselOrder(0.5), 0), DomainError);
    CHECK(bessel_j_deriv(BesselOrder(1), 0) == 0.5);
}

TEST_CASE("recurrence and envelope") {
    for (double nu = 0.5; nu <= 5; nu += 0.5) {
        for (double x = 0.1; x <= 50; x += 0.7) {
            double lhs = bessel_j(BesselOrder(nu - 1), x) + bessel_j(BesselOrder(nu + 1), x);
            double rhs = 2 * nu / x * bessel_j(BesselOrder(nu), x);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(bessel_j(BesselOrder(nu), x))));
        }
    }
    for (double x = 20; x < 2000; x *= 1.3)
        CHECK(std::abs(bessel_j(BesselOrder(1), x)) <= std::sqrt(2 / (std::numbers::pi * x)) + 1.0 / std::pow(x, 1.5));
}

TEST_CASE("derivative") {
    for (double x : {0.3, 1.0, 7.5, 40.0})
        CHECK(std::abs(bessel_j_deriv(BesselOrder(0), x) + bessel_j(BesselOrder(1), x)) < 1e-12);
    double h = 1e-5;
    double fd = (bessel_j(BesselOrder(1), 3 + h) - bessel_j(BesselOrder(1), 3 - h)) / (2 * h);
    CHECK(std::abs(bessel_j_deriv(BesselOrder(1), 3) - fd) < 1e-6);
    // Large x: J'_nu ~ -sqrt(2/(pi x)) sin(x - nu pi/2 - pi/4).
    for (double x : {200.0, 800.0, 3000.0}) {
        double nu = 1;
        double asym = -std::sqrt(2 / (std::numbers::pi * x)) * std::sin(x - nu * std::numbers::pi / 2 - std::numbers::pi / 4);
        CHECK(std::abs(bessel_j_deriv(BesselOrder(nu), x) - asym) < 2.0 / std::pow(x, 1.5));
    }
}

TEST_CASE("cumulative integrals") {
    CHECK(bessel_j_cumulative(BesselOrder(0.7), 0) == 0);
    quad::Options o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-15;
    auto j1 = [](double t) { return bessel_j(BesselOrder(1), t); };
    double ref = quad::integrate(j1, 0, 10, o).value;
    CHECK(std::abs(bessel_j_cumulative(BesselOrder(1), 10) - ref) < 1e-9);
    auto jm = [](double t) { return bessel_j(BesselOrder(-0.5), t); };
    o.singularity = quad::Singularity::Left;
    double refm = quad::integrate(jm, 0, 3.3, o).value;
    CHECK(std::abs(bessel_j_cumulative(BesselOrder(-0.5), 3.3) - refm) < 1e-9);
    // Tail to infinity is 1 - cumulative; far out it is within the envelope.
    for (double nu : {0.0, 1.0, 2.5}) {
        double x = 3000;
        CHECK(std::abs(bessel_j_tail(BesselOrder(nu), x)) < std::sqrt(2 / (std::numbers::pi * x)) + 1e-6);
    }
}

TEST_CASE("bessel zeros") {
    CHECK(bessel_j_zero(BesselOrder(0), 1) == doctest::Approx(2.404825557695773).epsilon(1e-13));
    CHECK(bessel_j_zero(BesselOrder(1), 3) == doctest::Approx(10.17346813506272).epsilon(1e-13));
    for (int k = 1; k < 30; ++k) CHECK(std::abs(bessel_j(BesselOrder(2.5), bessel_j_zero(BesselOrder(2.5), k))) < 1e-12);
}

TEST_CASE("sine and cosine integrals") {
    for (double x : {0.1, 1.0, 3.9, 4.1, 7.0, 12.0})
        CHECK(std::abs(sine_integral(x) - series_si(x)) < 1e-12);
    CHECK(sine_integral(-2.0) == -sine_integral(2.0));
    CHECK(sine_integral(1e6) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
    // Ci(x) = -integral_x^inf cos(t)/t dt; check the derivative cos(x)/x.
    for (double x : {0.5, 3.0, 5.0, 20.0}) {
        double h = 1e-5;
        CHECK(std::abs((cosine_integral(x + h) - cosine_integral(x - h)) / (2 * h) - std::cos(x) / x) < 1e-8);
    }
    CHECK(cosine_integral(1.0) == doctest::Approx(0.3374039229009681).epsilon(1e-13));
}

TEST_CASE("sine kernel parts") {
    auto p0 = sine_kernel_parts(0);
    CHECK(p0.S == 1);
    CHECK(p0.dS == 0);
    CHECK(p0.IS == 0);
    CHECK(p0.eps == 0);
    CHECK(std::abs(sine_kernel_parts(1).S) < 1e-16);
    auto sinc = [](double t) { return sine_kernel_parts(t).S; };
    quad::Options o;
    o.rel_tol = 1e-14;
    CHECK(std::abs(sine_kernel_parts(0.5).IS - quad::integrate(sinc, 0, 0.5, o).value) < 1e-10);
    for (double x = 0.01; x < 9; x += 0.37) {
        auto p = sine_kernel_parts(x), m = sine_kernel_parts(-x);
        CHECK(p.S == m.S);
        CHECK(p.IS == -m.IS);
        CHECK(p.eps == -m.eps);
        double h = 1e-6;
        CHECK(std::abs(p.dS - (sine_kernel_parts(x + h).S - sine_kernel_parts(x - h).S) / (2 * h)) < 1e-7);
    }
}
