#include <doctest.h>

#include "ppp/error.hpp"
#include "ppp/pfaffian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace ppp;

namespace {

double det_lu(std::vector<double> a, std::size_t n) {
    double d = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
        if (a[p * n + k] == 0) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            d = -d;
        }
        d *= a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return d;
}

std::vector<double> random_antisym(std::size_t n, std::mt19937_64& g) {
    std::normal_distribution<double> nd;
    std::vector<double> a(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            a[i * n + j] = nd(g);
            a[j * n + i] = -a[i * n + j];
        }
    return a;
}

// Sum over perfect matchings of {0..n-1}.
double pf_by_matchings(const std::vector<double>& a, std::vector<int> idx, std::size_t n) {
    if (idx.empty()) return 1;
    int first = idx[0];
    double sum = 0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        std::vector<int> rest;
        for (std::size_t m = 1; m < idx.size(); ++m)
            if (m != k) rest.push_back(idx[m]);
        double sign = (k % 2 == 1) ? 1 : -1;
        sum += sign * a[first * n + idx[k]] * pf_by_matchings(a, rest, n);
    }
    return sum;
}

}  // namespace

TEST_CASE("small closed forms") {
    CHECK(pfaffian(AntisymmetricMatrix(2, {0, 3.5, -3.5, 0})) == 3.5);
    std::mt19937_64 g(7);
    auto a = random_antisym(4, g);
    double expect = a[1] * a[11] - a[2] * a[7] + a[3] * a[6];
    CHECK(std::abs(pfaffian(AntisymmetricMatrix(4, a)) - expect) < 1e-12);
    auto b = random_antisym(6, g);
    CHECK(std::abs(pfaffian(AntisymmetricMatrix(6, b)) - pf_by_matchings(b, {0, 1, 2, 3, 4, 5}, 6)) < 1e-12);
}

TEST_CASE("contract") {
    CHECK_THROWS_AS(AntisymmetricMatrix(3, std::vector<double>(9, 0.0)), ContractViolation);
    CHECK_THROWS_AS(AntisymmetricMatrix(2, {0, 1, 1, 0}), ContractViolation);
}

TEST_CASE("square equals determinant") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 40; ++rep) {
        for (std::size_t n = 2; n <= 20; n += 2) {
            auto a = random_antisym(n, g);
            double pf = pfaffian(AntisymmetricMatrix(n, a));
            double det = det_lu(a, n);
            CHECK(std::abs(pf * pf - det) <= 1e-9 * std::abs(det));
        }
    }
}

TEST_CASE("congruence and scaling") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> nd;
    for (std::size_t n = 2; n <= 8; n += 2) {
        auto a = random_antisym(n, g);
        std::vector<double> b(n * n), bab(n * n, 0), tmp(n * n, 0);
        for (auto& v : b) v = nd(g);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) tmp[i * n + j] += b[i * n + k] * a[k * n + j];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) bab[i * n + j] += tmp[i * n + k] * b[j * n + k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) bab[j * n + i] = -bab[i * n + j];
        for (std::size_t i = 0; i < n; ++i) bab[i * n + i] = 0;
        double lhs = pfaffian(AntisymmetricMatrix(n, bab));
        double rhs = det_lu(b, n) * pfaffian(AntisymmetricMatrix(n, a));
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
        std::vector<double> sa = a;
        for (auto& v : sa) v *= 1.7;
        CHECK(pfaffian(AntisymmetricMatrix(n, sa)) ==
              doctest::Approx(std::pow(1.7, n / 2) * pfaffian(AntisymmetricMatrix(n, a))).epsilon(1e-12));
    }
}

TEST_CASE("degenerate") {
    std::vector<double> z(16, 0.0);
    auto r = pfaffian_checked(AntisymmetricMatrix(4, z));
    CHECK(r.degenerate);
    CHECK(r.value == 0);
    // Rows 0 and 1 repeat rows 2 and 3: rank deficient.
    auto m = AntisymmetricMatrix::from_upper(4, [](std::size_t i, std::size_t j) {
        double base[4] = {0.3, 1.1, 0.3, 1.1};
        return base[i] - base[j];
    });
    CHECK(pfaffian_checked(m).degenerate);
}
