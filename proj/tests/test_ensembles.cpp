#include <doctest.h>

#include "ppp/ensembles.hpp"
#include "ppp/error.hpp"
#include "ppp/quad.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace ppp;

namespace {

// E g(x1, x2) under const * w(x1) w(x2) |x1 - x2|^beta by tensor Gauss-Legendre.
template <class G, class W>
double two_point_moment(G g, W w, double beta, double lo, double hi) {
    const auto& gl = quad::gauss_legendre(32);
    int m = 40;
    double h = (hi - lo) / m, num = 0, den = 0;
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < 32; ++i) {
            double x = lo + (a + 0.5 * (1 + gl.x[i])) * h;
            for (int b = 0; b < m; ++b)
                for (int j = 0; j < 32; ++j) {
                    double y = lo + (b + 0.5 * (1 + gl.x[j])) * h;
                    double d = gl.w[i] * gl.w[j] * w(x) * w(y) * std::pow(std::abs(x - y), beta);
                    num += d * g(x, y);
                    den += d;
                }
        }
    return num / den;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("philox known answers") {
    auto z = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
    CHECK(z == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto f = Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f == Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    Philox4x32 g(7, 3), h(7, 3), other(7, 4);
    for (int i = 0; i < 10; ++i) CHECK(g() == h());
    CHECK(Philox4x32(7, 3)() != other());
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(sample({3, Weight::Hermite, 0, 4, 1}), ContractViolation);
    CHECK_THROWS_AS(sample({2, Weight::Hermite, 0, 0, 1}), ContractViolation);
    CHECK_THROWS_AS(sample({2, Weight::Laguerre, -1, 4, 1}), ContractViolation);
}

TEST_CASE("single point laws") {
    for (int beta : {1, 2, 4}) {
        auto b = sample_batch({beta, Weight::Hermite, 0, 1, 11}, 100000);
        double m = 0;
        for (auto& c : b) m += c[0];
        m /= b.size();
        CHECK(std::abs(m) < 3 / std::sqrt(1e5));
    }
    // Laguerre N = 1: Gamma(a + 1) with scale 2/beta.
    auto b = sample_batch({4, Weight::Laguerre, 2, 1, 5}, 50000);
    double m = 0;
    for (auto& c : b) m += c[0];
    m /= b.size();
    double mean = 2 * 3 / 4.0, sd = std::sqrt(3.0) * 0.5;
    CHECK(std::abs(m - mean) < 3 * sd / std::sqrt(5e4));
}

TEST_CASE("two point laws against quadrature") {
    {
        auto w = [](double x) { return std::exp(-x * x / 2); };
        auto g = [](double x, double y) { return (x - y) * (x - y); };
        auto g2 = [](double x, double y) { return std::pow(x - y, 4); };
        double e1 = two_point_moment(g, w, 2, -9, 9), e2 = two_point_moment(g2, w, 2, -9, 9);
        CHECK(e1 == doctest::Approx(6).epsilon(1e-10));
        auto b = sample_batch({2, Weight::Hermite, 0, 2, 99}, 40000);
        double m = 0;
        for (auto& c : b) m += (c[0] - c[1]) * (c[0] - c[1]);
        m /= b.size();
        double sd = std::sqrt((e2 - e1 * e1) / b.size());
        CHECK(std::abs(m - e1) < 3 * sd);
    }
    {
        double a = 2, beta = 4;
        auto w = [&](double x) { return std::pow(x, a) * std::exp(-beta * x / 2); };
        auto g = [](double x, double y) { return x + y; };
        auto g2 = [](double x, double y) { return (x + y) * (x + y); };
        double e1 = two_point_moment(g, w, beta, 0, 25), e2 = two_point_moment(g2, w, beta, 0, 25);
        auto b = sample_batch({4, Weight::Laguerre, a, 2, 3}, 40000);
        double m = 0;
        for (auto& c : b) m += c[0] + c[1];
        m /= b.size();
        CHECK(std::abs(m - e1) < 3 * std::sqrt((e2 - e1 * e1) / b.size()));
    }
}

TEST_CASE("determinism and ordering") {
    EnsembleSpec spec{1, Weight::Hermite, 0, 30, 42};
    CHECK(sample(spec, 5) == sample(spec, 5));
    CHECK(sample(spec, 5) != sample(spec, 6));
    auto c = sample(spec, 0);
    CHECK(std::is_sorted(c.begin(), c.end()));
    auto s = sample_batch(spec, 50, Exec::Serial), p = sample_batch(spec, 50, Exec::Parallel);
    CHECK(s == p);
    // Exchangeability: statistics do not depend on sample order.
    std::vector<int> counts = sample_counts(spec, 1200, RescaleMode::identity(), -1, 1);
    auto st = empirical_count_stats(counts);
    std::reverse(counts.begin(), counts.end());
    CHECK(empirical_count_stats(counts).mean == doctest::Approx(st.mean).epsilon(1e-14));
}

TEST_CASE("sturm counts agree with the eigenvalues") {
    EnsembleSpec h{1, Weight::Hermite, 0, 40, 4}, l{4, Weight::Laguerre, 2, 40, 4};
    auto bulk = RescaleMode::bulk(0.3, hermite_bulk_density(1, 40));
    auto ch = sample_counts(h, 200, bulk, -2, 3, Exec::Serial);
    auto cl = sample_counts(l, 200, RescaleMode::hard_edge(40), 0, 20, Exec::Serial);
    for (std::size_t i = 0; i < 200; ++i) {
        CHECK(ch[i] == count_in(rescale(sample(h, i), bulk), -2, 3));
        CHECK(cl[i] == count_in(rescale(sample(l, i), RescaleMode::hard_edge(40)), 0, 20));
    }
    CHECK(sample_counts(h, 10, bulk, 1, 1)[3] == 0);
}

TEST_CASE("rescaling") {
    Configuration c{-1, 0.5, 2};
    CHECK(rescale(c, RescaleMode::identity()) == c);
    CHECK(rescale(c, RescaleMode::bulk(0, 1)) == c);
    CHECK(rescale(c, RescaleMode::hard_edge(2)) == Configuration{-8, 4, 16});
    // Bulk intensity near one in the centre.
    int N = 100;
    EnsembleSpec spec{1, Weight::Hermite, 0, N, 8};
    auto counts = sample_counts(spec, 2000, RescaleMode::bulk(0, hermite_bulk_density(1, N)), -5, 5);
    auto st = empirical_count_stats(counts);
    CHECK(std::abs(st.mean / 10 - 1) < 3 * st.stderr_mean / 10 + 0.01);
    // Hard-edge smallest point stabilises in N.
    std::vector<double> f1, f2;
    for (int N2 : {100, 200}) {
        EnsembleSpec l{4, Weight::Laguerre, 2, N2, 17};
        auto b = sample_batch(l, 1500);
        for (auto& cfg : b) (N2 == 100 ? f1 : f2).push_back(rescale(cfg, RescaleMode::hard_edge(N2))[0]);
    }
    CHECK(ks_distance(f1, f2) < 0.1);
}

TEST_CASE("count statistics") {
    std::vector<int> few(10, 1);
    CHECK_THROWS_AS(empirical_count_stats(few), ResourceError);
    std::vector<Configuration> cs(1000, Configuration{0.1, 0.2});
    auto st = empirical_count_stats(cs, 5, 5);
    CHECK(st.mean == 0);
    CHECK(st.variance == 0);
    CHECK(st.stderr_mean == 0);
    CHECK(count_in({0, 1, 2}, 0, 2) == 2);
    CHECK(laguerre_exponent_for_bessel(KernelName::bessel4, 1) == 2);
    CHECK_THROWS_AS(laguerre_exponent_for_bessel(KernelName::sine1, 1), ContractViolation);
}

TEST_CASE("validation helpers") {
    auto r = validate_sine1_variance(60, 2000, 1);
    MESSAGE("sine1 variance ", r.empirical, " +- ", r.stderr_, " analytic ", r.analytic);
    CHECK(r.pass);
    auto b = validate_bessel4_mean(1, 50, 20000, 2, 20);
    MESSAGE("bessel4 mean ", b.empirical, " analytic ", b.analytic);
    CHECK(b.pass);
    auto j = nlohmann::json::parse(validation_json(b));
    CHECK(j["samples"] == 20000);
    std::ostringstream os;
    write_counts_csv(os, {3, 4});
    CHECK(os.str() == "sample,count\n0,3\n1,4\n");
}
