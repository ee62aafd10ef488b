#include "ppp/spectral.hpp"

#include "ppp/error.hpp"
#include "ppp/io.hpp"
#include "ppp/quad.hpp"
#include "ppp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

namespace ppp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPanel = 0.25;

// int_X^inf cos(a x)/x^2 dx, a >= 0.
double cos_over_x2(double a, double X) {
    if (a == 0) return 1 / X;
    return std::cos(a * X) / X - a * (kPi / 2 - sine_integral(a * X));
}

// int_X^inf cos(c x)/x dx.
double cos_over_x(double c, double X) {
    c = std::abs(c);
    if (c == 0) return kInf;
    return -cosine_integral(c * X);
}

// int_X^inf sin(b x)/x^2 dx.
double sin_over_x2(double b, double X) {
    if (b == 0) return 0;
    double s = b > 0 ? 1.0 : -1.0;
    b = std::abs(b);
    return s * (std::sin(b * X) / X - b * cosine_integral(b * X));
}

// Smooth step from 0 at t <= 0 to 1 at t >= 1.
double smooth_step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
    return a / (a + b);
}

}  // namespace

struct StationaryProfile::Cache {
    std::once_flag once;
    std::vector<double> x, wf;  // nodes on [0, X] and weight * F
};

StationaryProfile::StationaryProfile(const MatrixKernel& k)
    : kernel_(k), rho_(0), cache_(std::make_shared<Cache>()) {
    if (!k.stationary()) throw ContractViolation("spectral profile needs a stationary kernel");
    rho_ = rho1(k, 0.0);
}

TailModel StationaryProfile::tail_model() const {
    return kernel_.beta() == 1 ? TailModel::InverseSquare : TailModel::CosineOverX;
}

double StationaryProfile::F(double x) const {
    return -kernel_(std::abs(x), 0.0).det();
}

double StationaryProfile::F_tail(double x) const {
    x = std::abs(x);
    if (tail_model() == TailModel::InverseSquare) return -1 / (kPi * kPi * x * x);
    return std::cos(kPi * x) / (8 * x) - std::sin(kPi * x) / (8 * kPi * x * x) - 1 / (4 * kPi * kPi * x * x);
}

double StationaryProfile::fhat(double lambda) const {
    double l = std::abs(lambda);
    double a = 2 * kPi * l;
    double body = 0;
    if (l <= 4) {
        std::call_once(cache_->once, [&] {
            const auto& gl = quad::gauss_legendre(16);
            std::size_t m = static_cast<std::size_t>(std::llround(X_ / kPanel));
            cache_->x.resize(m * 16);
            cache_->wf.resize(m * 16);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(m); ++p) {
                double c = (p + 0.5) * kPanel;
                for (int i = 0; i < 16; ++i) {
                    double x = c + 0.5 * kPanel * gl.x[i];
                    cache_->x[p * 16 + i] = x;
                    cache_->wf[p * 16 + i] = 0.5 * kPanel * gl.w[i] * F(x);
                }
            }
        });
        for (std::size_t j = 0; j < cache_->x.size(); ++j) body += cache_->wf[j] * std::cos(a * cache_->x[j]);
    } else {
        const auto& gl = quad::gauss_legendre(16);
        double h = 1 / l;
        std::size_t m = static_cast<std::size_t>(std::ceil(X_ / h));
        h = X_ / m;
        for (std::size_t p = 0; p < m; ++p) {
            double c = (p + 0.5) * h;
            for (int i = 0; i < 16; ++i) {
                double x = c + 0.5 * h * gl.x[i];
                body += 0.5 * h * gl.w[i] * F(x) * std::cos(a * x);
            }
        }
    }
    double X = X_, tail;
    if (tail_model() == TailModel::InverseSquare) {
        tail = -cos_over_x2(a, X) / (kPi * kPi);
    } else {
        double c1 = 0.5 * (cos_over_x(a + kPi, X) + cos_over_x(a - kPi, X));
        double s2 = 0.5 * (sin_over_x2(kPi + a, X) + sin_over_x2(kPi - a, X));
        tail = c1 / 8 - s2 / (8 * kPi) - cos_over_x2(a, X) / (4 * kPi * kPi);
    }
    return 2 * (body + tail);
}

double StationaryProfile::fitted_tail_constant() const {
    double c = 0;
    for (double x = 50; x <= 500; x += 0.1) {
        double lead = tail_model() == TailModel::InverseSquare ? 0.0 : std::cos(kPi * x) / (8 * x);
        c = std::max(c, x * x * std::abs(F(x) - lead));
    }
    return c;
}

double fhat(const StationaryProfile& p, double lambda) {
    return p.fhat(lambda);
}

double closed_form_fhat_delta_branch(KernelName process, double lambda, bool upper) {
    double l = std::abs(lambda);
    switch (process) {
    case KernelName::sine1:
        if (!upper) return 2 * l - l * std::log(1 + 2 * l);
        return 2 - l * std::log((2 * l + 1) / (2 * l - 1));
    case KernelName::sine4:
        if (upper) return 0.5;
        if (l == 0.5) return kInf;
        return l / 2 - l / 4 * std::log(std::abs(1 - 2 * l));
    default:
        throw ContractViolation("closed-form spectral data exists only for sine1 and sine4");
    }
}

double closed_form_fhat_delta(KernelName process, double lambda) {
    return closed_form_fhat_delta_branch(process, lambda, std::abs(lambda) > 1);
}

double fhat_plus_rho(const StationaryProfile& p, double lambda, FhatSource src) {
    if (src == FhatSource::ClosedForm) return closed_form_fhat_delta(p.process(), lambda);
    return p.fhat(lambda) + p.rho();
}

double spectral_density(const StationaryProfile& p, const AdditiveStatistic& g, double lambda, FhatSource src) {
    if (!g.f || !(g.hi > g.lo)) return 0;
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw ContractViolation("spectral_density: support must be finite");
    double a = 2 * kPi * lambda;
    quad::Options o;
    o.rel_tol = 1e-11;
    o.abs_tol = 1e-14;
    o.initial_panels = 1 + static_cast<int>(std::ceil(2 * std::abs(lambda) * (g.hi - g.lo)));
    std::vector<double> br;
    for (double b : g.breaks)
        if (b > g.lo && b < g.hi) br.push_back(b);
    std::sort(br.begin(), br.end());
    double re = quad::integrate([&](double x) { return g.f(x) * std::cos(a * x); }, g.lo, g.hi, br, o).value;
    double im = quad::integrate([&](double x) { return g.f(x) * std::sin(a * x); }, g.lo, g.hi, br, o).value;
    return (re * re + im * im) * fhat_plus_rho(p, lambda, src);
}

double spectral_variance(const StationaryProfile& p, const std::function<double(double)>& ghat2, double cut,
                         FhatSource src) {
    if (!(cut > 0)) return 0;
    std::vector<double> br;
    for (double b : {0.5, 1.0})
        if (b < cut) br.push_back(b);
    quad::Options o;
    o.rel_tol = 1e-9;
    o.abs_tol = 1e-13;
    o.initial_panels = 1 + static_cast<int>(cut);
    auto f = [&](double l) { return ghat2(l) * fhat_plus_rho(p, l, src); };
    return 2 * quad::integrate(f, 0, cut, br, o).value;
}

LinearBoundReport check_linear_bound(const StationaryProfile& p, double lambda_max, double C, FhatSource src,
                                     int grid) {
    if (!(lambda_max > 0)) throw ContractViolation("check_linear_bound: lambda_max must be positive");
    LinearBoundReport r;
    double tol = src == FhatSource::Numeric ? 1e-6 : 0.0;
    r.min_value = kInf;
    for (int i = 1; i <= grid; ++i) {
        double l = lambda_max * i / grid;
        double v = fhat_plus_rho(p, l, src);
        double ratio = v / l;
        ++r.points;
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.argmax = l;
        }
        r.min_value = std::min(r.min_value, v);
        if (v < -tol || v > C * l + tol) {
            r.pass = false;
            r.violations.push_back(l);
        }
    }
    if (r.points == 0) r.min_value = 0;
    return r;
}

Mollifier build_mollifier(const StationaryProfile& p, int n, double R) {
    if (n < 1) throw ContractViolation("build_mollifier: n must be positive");
    if (!(R > 0)) throw ContractViolation("build_mollifier: R must be positive");
    Mollifier m;
    m.n = n;
    m.R = R;
    // 2|sin(pi t)| <= 1/n for |t| <= R/k.
    double kmin = kPi * R / std::asin(1.0 / (2 * n));
    m.k = std::max<double>(n, std::ceil(kmin));
    double top = 1 / m.k;
    {
        double c = 0;
        for (int i = 1; i <= 400; ++i) {
            double l = top * i / 400;
            c = std::max(c, closed_form_fhat_delta(p.process(), l) / l);
        }
        m.C = 1.05 * c;
    }
    // psi = A w(log lambda)/lambda on [eps, 1/k]; the ramps of w have width delta in log lambda.
    const double delta = 0.5;
    double L = m.C * n / 2 + delta + 0.5;
    if (L > 600) throw ResourceError("build_mollifier: n too large for double precision");
    m.eps = top * std::exp(-L);
    double s0 = std::log(m.eps), s1 = std::log(top);
    auto w = [=](double s) { return smooth_step((s - s0) / delta) * smooth_step((s1 - s) / delta); };
    double A = 1 / (2 * (L - delta));
    m.psi = [=](double lambda) {
        double l = std::abs(lambda);
        if (l <= 0 || l < m.eps || l > top) return 0.0;
        return A * w(std::log(l)) / l;
    };

    quad::Options o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-15;
    o.initial_panels = 8 + static_cast<int>(L);
    std::vector<double> br{s0 + delta, s1 - delta};
    auto phi = [=](double x) {
        auto f = [&](double s) { return w(s) * std::cos(2 * kPi * std::exp(s) * x); };
        return 2 * A * quad::integrate(f, s0, s1, br, o).value;
    };
    m.phi.f = phi;
    m.phi.lo = -kInf;
    m.phi.hi = kInf;

    auto var = [&](double s) {
        double l = std::exp(s);
        double ps = A * w(s) / l;
        return ps * ps * closed_form_fhat_delta(p.process(), l) * l;
    };
    m.variance = 2 * quad::integrate(var, s0, s1, br, o).value;
    double dev = 0;
    for (int i = 0; i <= 200; ++i) dev = std::max(dev, std::abs(phi(R * i / 200.0) - 1));
    m.sup_deviation = dev;
    return m;
}

void write_fhat_csv(std::ostream& os, const StationaryProfile& p, const std::vector<double>& lambdas) {
    os << "process,lambda,fhat_delta_numeric,fhat_delta_closed,abs_err\n";
    double f0 = p.fhat(0);
    for (double l : lambdas) {
        double num = p.fhat(l) - f0;
        double cf = closed_form_fhat_delta(p.process(), l);
        os << io::csv_row({to_string(p.process()), io::num(l), io::num(num), io::num(cf), io::num(std::abs(num - cf))});
    }
}

void write_fhat_svg(std::ostream& os, const StationaryProfile& p, const std::vector<double>& lambdas) {
    io::Series num{"numeric", {}, {}, "#1f77b4"}, cf{"closed form", {}, {}, "#d62728"};
    double f0 = p.fhat(0);
    for (double l : lambdas) {
        num.x.push_back(l);
        num.y.push_back(p.fhat(l) - f0);
        cf.x.push_back(l);
        cf.y.push_back(closed_form_fhat_delta(p.process(), l));
    }
    io::write_svg(os, to_string(p.process()) + ": Fhat(lambda) - Fhat(0)", "lambda", {num, cf});
}

}  // namespace ppp
