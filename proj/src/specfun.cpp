#include "ppp/specfun.hpp"

#include "ppp/error.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <vector>

namespace ppp {

namespace {

constexpr double pi = std::numbers::pi;

// 20-point Gauss-Legendre on [-1, 1], computed once.
struct GL20 {
    std::array<double, 20> x{}, w{};
    GL20() {
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = 0;
                for (int k = 1; k <= n; ++k) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
                }
                double dp = n * (z * p0 - p1) / (z * z - 1);
                double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) {
                    p0 = 1, p1 = 0;
                    for (int k = 1; k <= n; ++k) {
                        double p2 = p1;
                        p1 = p0;
                        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
                    }
                    dp = n * (z * p0 - p1) / (z * z - 1);
                    x[i] = z;
                    w[i] = 2 / ((1 - z * z) * dp * dp);
                    break;
                }
            }
        }
    }
};

const GL20& gl20() {
    static const GL20 rule;
    return rule;
}

double gl_panel(double nu, double a, double b) {
    const auto& r = gl20();
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
    for (int i = 0; i < 20; ++i) s += r.w[i] * boost::math::cyl_bessel_j(nu, c + h * r.x[i]);
    return s * h;
}

// Term-by-term integrated power series, used on [0, 1].
double cumulative_series(double nu, double x) {
    if (x == 0) return 0;
    double half = 0.5 * x;
    double term = std::pow(half, nu) / boost::math::tgamma(nu + 1);
    double sum = 0;
    for (int k = 0; k < 60; ++k) {
        double t = term * x / (2 * k + nu + 1);
        sum += t;
        if (std::abs(t) < 1e-18 * std::abs(sum)) break;
        term *= -half * half / ((k + 1) * (k + 1 + nu));
    }
    return sum;
}

// Cumulative integrals of J_nu at integer abscissae, extended on demand.
class CumulativeCache {
public:
    double at(double nu, double x) {
        if (x <= 1) return cumulative_series(nu, x);
        auto k = static_cast<std::size_t>(std::floor(x));
        double base = node(nu, k);
        if (x == static_cast<double>(k)) return base;
        return base + gl_panel(nu, static_cast<double>(k), x);
    }

private:
    double node(double nu, std::size_t k) {
        {
            std::shared_lock lock(mutex_);
            auto it = table_.find(nu);
            if (it != table_.end() && k < it->second.size()) return it->second[k];
        }
        std::unique_lock lock(mutex_);
        auto& v = table_[nu];
        if (v.empty()) {
            v.push_back(0.0);
            v.push_back(cumulative_series(nu, 1.0));
        }
        while (v.size() <= k) {
            double j = static_cast<double>(v.size() - 1);
            v.push_back(v.back() + gl_panel(nu, j, j + 1));
        }
        return v[k];
    }

    std::shared_mutex mutex_;
    std::map<double, std::vector<double>> table_;
};

CumulativeCache& cache() {
    static CumulativeCache c;
    return c;
}

void check_arg(double x, const char* what) {
    if (!(x >= 0)) throw DomainError(std::string(what) + ": negative argument");
}

// Continued fraction for E1(-ix)-type auxiliary functions (x > 4).
std::complex<double> cisi_cf(double x) {
    using C = std::complex<double>;
    C b(1.0, x);
    C c = 1.0 / std::numeric_limits<double>::min();
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i < 1000; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1) + std::abs(del.imag()) < 1e-16) break;
    }
    return h * C(std::cos(x), -std::sin(x));
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
    if (!(nu > -1)) throw DomainError("Bessel order must exceed -1");
}

double bessel_j(BesselOrder nu, double x) {
    check_arg(x, "bessel_j");
    if (x == 0) {
        if (nu == 0) return 1;
        return nu > 0 ? 0 : std::numeric_limits<double>::infinity();
    }
    return boost::math::cyl_bessel_j(nu.value(), x);
}

double bessel_j_deriv(BesselOrder nu, double x) {
    check_arg(x, "bessel_j_deriv");
    if (x == 0) {
        if (nu < 1) throw DomainError("bessel_j_deriv: singular at x = 0 for order < 1");
        return nu == 1 ? 0.5 : 0.0;
    }
    return nu / x * bessel_j(nu, x) - bessel_j(BesselOrder(nu + 1), x);
}

double bessel_j_cumulative(BesselOrder nu, double x) {
    check_arg(x, "bessel_j_cumulative");
    return cache().at(nu, x);
}

double bessel_j_tail(BesselOrder nu, double x) {
    return 1.0 - bessel_j_cumulative(nu, x);
}

double bessel_j_zero(BesselOrder nu, int k) {
    if (k < 1) throw DomainError("bessel_j_zero: index starts at 1");
    double mu = 4 * nu * nu;
    double b = (k + 0.5 * nu - 0.25) * pi;
    double e = 8 * b;
    double z = b - (mu - 1) / e - 4 * (mu - 1) * (7 * mu - 31) / (3 * e * e * e);
    if (z <= 0) z = 0.5 * b;
    for (int it = 0; it < 8; ++it) {
        double dz = bessel_j(nu, z) / bessel_j_deriv(nu, z);
        z -= dz;
        if (std::abs(dz) < 1e-14 * z) break;
    }
    return z;
}

double sine_integral(double x) {
    double ax = std::abs(x);
    double r;
    if (ax <= 4) {
        double term = ax, sum = ax;
        for (int k = 1; k < 40; ++k) {
            term *= -ax * ax / ((2 * k) * (2 * k + 1));
            double t = term / (2 * k + 1);
            sum += t;
            if (std::abs(t) < 1e-18) break;
        }
        r = sum;
    } else {
        r = pi / 2 + cisi_cf(ax).imag();
    }
    return x < 0 ? -r : r;
}

double cosine_integral(double x) {
    if (!(x > 0)) throw DomainError("cosine_integral: argument must be positive");
    if (x <= 4) {
        double term = 1, sum = 0;
        for (int k = 1; k < 40; ++k) {
            term *= -x * x / ((2 * k - 1) * (2 * k));
            double t = term / (2 * k);
            sum += t;
            if (std::abs(t) < 1e-18) break;
        }
        return std::numbers::egamma + std::log(x) + sum;
    }
    return -cisi_cf(x).real();
}

SineParts sine_kernel_parts(double x) {
    SineParts p{};
    double z = pi * x;
    if (std::abs(x) < 1e-3) {
        double z2 = z * z;
        p.S = 1 - z2 / 6 + z2 * z2 / 120;
        p.dS = pi * (-z / 3 + z * z2 / 30 - z * z2 * z2 / 840);
    } else {
        p.S = std::sin(z) / z;
        p.dS = (std::cos(z) * z - std::sin(z)) / (z * x);
    }
    p.IS = sine_integral(z) / pi;
    p.eps = x > 0 ? 0.5 : (x < 0 ? -0.5 : 0.0);
    return p;
}

}  // namespace ppp
