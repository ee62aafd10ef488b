#include <doctest.h>

#include "ppp/error.hpp"
#include "ppp/quad.hpp"
#include "ppp/rigidity.hpp"
#include "ppp/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ppp;

namespace {

const StationaryProfile& profile(KernelName n) {
    static StationaryProfile s1(matrix_kernel(KernelName::sine1));
    static StationaryProfile s4(matrix_kernel(KernelName::sine4));
    return n == KernelName::sine1 ? s1 : s4;
}

double ghat2(const AdditiveStatistic& g, double l) {
    double a = 2 * std::numbers::pi * l;
    quad::Options o;
    o.rel_tol = 1e-11;
    o.initial_panels = 4 + static_cast<int>(4 * l * (g.hi - g.lo));
    double re = quad::integrate([&](double x) { return g.f(x) * std::cos(a * x); }, g.lo, g.hi, g.breaks, o).value;
    double im = quad::integrate([&](double x) { return g.f(x) * std::sin(a * x); }, g.lo, g.hi, g.breaks, o).value;
    return re * re + im * im;
}

}  // namespace

TEST_CASE("profile basics") {
    for (auto n : {KernelName::sine1, KernelName::sine4}) {
        const auto& p = profile(n);
        for (double x : {0.3, 4.1, 77.0}) CHECK(std::abs(p.F(x) - p.F(-x)) < 1e-12);
        double rho = n == KernelName::sine1 ? 1.0 : 0.5;
        CHECK(p.rho() == rho);
        CHECK(std::abs(p.F(0) + rho * rho) < 1e-14);
        // Leading model against F far out.
        for (double x : {300.3, 1000.7}) CHECK(std::abs(p.F(x) - p.F_tail(x)) < 5.0 / (x * x * x));
        double C = p.fitted_tail_constant();
        MESSAGE(to_string(n), " fitted tail constant ", C);
        CHECK(C > 0);
        CHECK(C < 1);
    }
    CHECK_THROWS_AS(StationaryProfile(matrix_kernel(KernelName::bessel4, 1.0)), ContractViolation);
}

TEST_CASE("closed forms") {
    using enum KernelName;
    CHECK(closed_form_fhat_delta(sine1, 1) == doctest::Approx(2 - std::log(3.0)).epsilon(1e-14));
    CHECK(std::abs(closed_form_fhat_delta_branch(sine1, 1, false) - closed_form_fhat_delta_branch(sine1, 1, true)) < 1e-12);
    CHECK(closed_form_fhat_delta(sine4, 2) == 0.5);
    CHECK(closed_form_fhat_delta(sine4, -1.5) == 0.5);
    CHECK(std::isinf(closed_form_fhat_delta(sine4, 0.5)));
    CHECK(std::abs(closed_form_fhat_delta(sine1, 1e-6)) < 3e-6);
    CHECK_THROWS_AS(closed_form_fhat_delta(bessel4, 1), ContractViolation);
}

TEST_CASE("numeric Fourier transform against the closed forms") {
    for (auto n : {KernelName::sine1, KernelName::sine4}) {
        const auto& p = profile(n);
        double f0 = p.fhat(0);
        CHECK(std::abs(f0 + p.rho()) < 2e-2);
        double worst = 0;
        for (int i = 1; i <= 20; ++i) {
            double l = 0.1 * i;
            if (n == KernelName::sine4 && std::abs(l - 0.5) < 0.05) continue;
            worst = std::max(worst, std::abs(p.fhat(l) - f0 - closed_form_fhat_delta(n, l)));
        }
        MESSAGE(to_string(n), " F(0) + rho = ", f0 + p.rho(), ", max deviation ", worst);
        CHECK(worst < 5e-3);
        CHECK(p.fhat(0.7) == p.fhat(-0.7));
        // The direct-panel branch for larger lambda.
        CHECK(std::abs(p.fhat(4.5) - f0 - closed_form_fhat_delta(n, 4.5)) < 5e-3);
    }
}

TEST_CASE("spectral density and Plancherel") {
    const auto& p = profile(KernelName::sine1);
    CHECK(spectral_density(p, zero_statistic(), 0.3) == 0);
    auto ind = indicator_statistic(-0.5, 0.5);
    CHECK(std::abs(spectral_density(p, ind, 0)) < 1e-12);
    CHECK(std::abs(spectral_density(p, ind, 0.8) - ghat2(ind, 0.8) * closed_form_fhat_delta(KernelName::sine1, 0.8)) < 1e-12);
    // Var = rho int g^2 + int |ghat|^2 Fhat; Fhat is O(lambda^-2) for large lambda.
    std::vector<AdditiveStatistic> gs{ind, taper_statistic(TaperFunction(1, 5), true)};
    AdditiveStatistic tent;
    tent.f = [](double x) { return std::max(0.0, 1 - std::abs(x)); };
    tent.lo = -1;
    tent.hi = 1;
    tent.breaks = {0};
    gs.push_back(tent);
    for (auto n : {KernelName::sine1, KernelName::sine4}) {
        const auto& pr = profile(n);
        auto k = matrix_kernel(n);
        for (const auto& g : gs) {
            quad::Options o;
            o.rel_tol = 1e-8;
            o.initial_panels = 40;
            std::vector<double> br{0.5, 1.0};
            double fh = 2 * quad::integrate([&](double l) {
                return ghat2(g, l) * (closed_form_fhat_delta(n, l) - pr.rho());
            }, 0, 20, br, o).value;
            double g2 = quad::integrate([&](double x) { return g.f(x) * g.f(x); }, g.lo, g.hi, g.breaks).value;
            double v = pr.rho() * g2 + fh;
            double ref = variance_additive(k, g).variance;
            INFO(to_string(n), " spectral ", v, " direct ", ref);
            CHECK(std::abs(v - ref) < 1e-3);
        }
    }
}

TEST_CASE("linear bound") {
    auto r1 = check_linear_bound(profile(KernelName::sine1), 1, 2.1);
    MESSAGE("sine1 max ratio ", r1.max_ratio);
    CHECK(r1.pass);
    CHECK(r1.max_ratio <= 2.0 + 1e-4);
    auto r4 = check_linear_bound(profile(KernelName::sine4), 0.4, 1, FhatSource::Numeric, 80);
    CHECK(r4.pass);
    auto c4 = check_linear_bound(profile(KernelName::sine4), 0.4, 1, FhatSource::ClosedForm);
    CHECK(c4.pass);
    // Near 1/2 the printed sine4 formula has no linear bound.
    CHECK_FALSE(check_linear_bound(profile(KernelName::sine4), 0.6, 1, FhatSource::ClosedForm).pass);
    auto empty = check_linear_bound(profile(KernelName::sine1), 1, 2.1, FhatSource::ClosedForm, 0);
    CHECK(empty.pass);
    CHECK(empty.points == 0);
}

TEST_CASE("mollifier") {
    for (auto n : {KernelName::sine1, KernelName::sine4}) {
        for (int m : {1, 2, 5}) {
            auto mo = build_mollifier(profile(n), m, 2);
            INFO(to_string(n), " n=", m, " var ", mo.variance, " dev ", mo.sup_deviation);
            CHECK(mo.phi.f(0) == doctest::Approx(1).epsilon(1e-10));
            CHECK(mo.variance <= 1.0 / m);
            CHECK(mo.sup_deviation <= 1.0 / m);
            // int psi = 1 and the pointwise cap.
            double s = 2 * quad::integrate(mo.psi, mo.eps, 1 / mo.k, std::vector<double>{mo.eps * 2, mo.eps * 10, 0.1 / mo.k}).value;
            CHECK(std::abs(s - 1) < 1e-6);
            for (double l : {mo.eps * 3, 0.5 / mo.k}) CHECK(mo.psi(l) <= 1 / (mo.C * m * l));
            CHECK(std::abs(mo.phi.f(5.0)) <= 1);
        }
    }
    CHECK_THROWS_AS(build_mollifier(profile(KernelName::sine1), 0, 2), ContractViolation);
}

TEST_CASE("csv and svg") {
    std::ostringstream os, svg;
    write_fhat_csv(os, profile(KernelName::sine4), {1.5});
    CHECK(os.str().rfind("process,lambda,fhat_delta_numeric,fhat_delta_closed,abs_err\nsine4,1.5,", 0) == 0);
    write_fhat_svg(svg, profile(KernelName::sine1), {0.5, 1, 1.5});
    CHECK(svg.str().find("<polyline") != std::string::npos);
}
