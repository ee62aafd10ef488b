#include "ppp/kernels.hpp"

#include "ppp/error.hpp"
#include "ppp/pfaffian.hpp"
#include "ppp/quad.hpp"
#include "ppp/specfun.hpp"

#include <cmath>
#include <limits>

namespace ppp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDelta = 1e-6;  // relative near-diagonal switch

double jv(double nu, double x) { return bessel_j(BesselOrder(nu), x); }

// B_a(X, X) at p = sqrt(X).
double b_diag(double a, double p, double ja, double ja1) {
    if (p == 0) return a == 0 ? 0.25 : 0.0;
    return 0.25 * (ja * ja + ja1 * ja1 - 2 * a / p * ja * ja1);
}

// dB_a/dX on the diagonal: half the derivative of B_a(X, X).
double bx_diag(double a, double p, double ja, double ja1) {
    double dja = a / p * ja - ja1;
    double dja1 = ja - (a + 1) / p * ja1;
    double dD = 0.25 * (2 * ja * dja + 2 * ja1 * dja1 + 2 * a / (p * p) * ja * ja1 -
                        2 * a / p * (dja * ja1 + ja * dja1));
    return dD / (4 * p);
}

struct BPoint {
    double p, ja, ja1;
};

BPoint bpoint(double a, double p) {
    if (p == 0) return {0, a == 0 ? 1.0 : 0.0, 0};
    return {p, jv(a, p), jv(a + 1, p)};
}

bool near_diag(double X, double Y) {
    return std::abs(X - Y) < kDelta * std::max(1.0, std::max(X, Y));
}

// Symmetric determinantal Bessel kernel B_a(X, Y), X = p^2, Y = q^2.
double bess_b(double a, const BPoint& u, const BPoint& v) {
    double X = u.p * u.p, Y = v.p * v.p;
    if (near_diag(X, Y)) {
        if (X == Y) return b_diag(a, u.p, u.ja, u.ja1);
        BPoint m = bpoint(a, std::sqrt(0.5 * (X + Y)));
        return b_diag(a, m.p, m.ja, m.ja1);
    }
    return (u.p * u.ja1 * v.ja - v.p * v.ja1 * u.ja) / (2 * (X - Y));
}

// dB_a/dX at (X, Y).
double bess_bx(double a, const BPoint& u, const BPoint& v) {
    double X = u.p * u.p, Y = v.p * v.p;
    if (near_diag(X, Y)) {
        if (X == Y) return bx_diag(a, u.p, u.ja, u.ja1);
        BPoint m = bpoint(a, std::sqrt(0.5 * (X + Y)));
        return bx_diag(a, m.p, m.ja, m.ja1);
    }
    double p = u.p, q = v.p;
    double nx = ((p * u.ja - a * u.ja1) * v.ja - q * v.ja1 * (a / p * u.ja - u.ja1)) / (2 * p);
    double b = (p * u.ja1 * v.ja - q * v.ja1 * u.ja) / (2 * (X - Y));
    return (nx - 2 * b) / (2 * (X - Y));
}

// Integral of B_a(p^2, v^2) dv over [p, q].
double bess_b_line(double a, double p, double q) {
    if (p == q) return 0;
    BPoint u = bpoint(a, p);
    auto f = [&](double v) { return bess_b(a, u, bpoint(a, v)); };
    quad::Options o;
    o.rel_tol = 1e-11;
    o.abs_tol = 1e-14;
    o.initial_panels = 1 + static_cast<int>(std::abs(q - p) / 2);
    o.max_subdivisions = 20000;
    return quad::integrate(f, p, q, o).value;
}

class SineModel final : public detail::ScalarModel {
public:
    detail::Node node(double x) const override { return {x, 0, 0, 0, 0, 0}; }
    double value(const detail::Node& x, const detail::Node& y) const override {
        return sine_kernel_parts(x.x - y.x).S;
    }
    double dx(const detail::Node& x, const detail::Node& y) const override {
        return sine_kernel_parts(x.x - y.x).dS;
    }
    double integral(const detail::Node& x, const detail::Node& y) const override {
        return -sine_kernel_parts(x.x - y.x).IS;
    }
    bool stationary() const override { return true; }
    double domain_min() const override { return -kInf; }
};

// 2 (x/y)^{1/2} B_a(4x, 4y) - g(y) F(x), a = 2s - 1,
// g(y) = J_a(2 y^{1/2}) / (2 y^{1/2}), F(x) = int_0^{x^{1/2}} J_a(2t) dt.
class Bessel4Model final : public detail::ScalarModel {
public:
    explicit Bessel4Model(double s) : a_(2 * s - 1) {}

    detail::Node node(double x) const override {
        if (!(x >= 0)) throw DomainError("bessel4: negative argument");
        double p = 2 * std::sqrt(x);
        BPoint b = bpoint(a_, p);
        double F = 0.5 * bessel_j_cumulative(BesselOrder(a_), p);
        double g;
        if (p > 0) g = b.ja / p;
        else g = a_ == 1 ? 0.5 : (a_ > 1 ? 0.0 : kInf);
        return {x, p, b.ja, b.ja1, F, g};
    }
    double value(const detail::Node& x, const detail::Node& y) const override {
        need_positive(y);
        return 2 * (x.p / y.p) * bess_b(a_, bp(x), bp(y)) - y.small * x.big;
    }
    double dx(const detail::Node& x, const detail::Node& y) const override {
        need_positive(x);
        need_positive(y);
        double b = bess_b(a_, bp(x), bp(y));
        return 4 * b / (x.p * y.p) + 8 * (x.p / y.p) * bess_bx(a_, bp(x), bp(y)) - x.small * y.small;
    }
    double integral(const detail::Node& x, const detail::Node& y) const override {
        need_positive(y);
        return x.p * bess_b_line(a_, x.p, y.p) - x.big * (y.big - x.big);
    }
    bool stationary() const override { return false; }
    double domain_min() const override { return 0; }

private:
    static BPoint bp(const detail::Node& n) { return {n.p, n.ja, n.ja1}; }
    static void need_positive(const detail::Node& n) {
        if (!(n.x > 0)) throw DomainError("bessel4: argument must be positive");
    }
    double a_;
};

// (x/y)^{1/2} B_b(x, y) + h(y) T(x), b = s + 1,
// h(y) = J_b(y^{1/2}) / (4 y^{1/2}), T(x) = int_{x^{1/2}}^inf J_b.
class Bessel1Model final : public detail::ScalarModel {
public:
    explicit Bessel1Model(double s) : b_(s + 1) {}

    detail::Node node(double x) const override {
        if (!(x >= 0)) throw DomainError("bessel1: negative argument");
        double p = std::sqrt(x);
        BPoint b = bpoint(b_, p);
        double T = bessel_j_tail(BesselOrder(b_), p);
        double h = p > 0 ? b.ja / (4 * p) : (b_ == 1 ? 0.125 : 0.0);
        return {x, p, b.ja, b.ja1, T, h};
    }
    double value(const detail::Node& x, const detail::Node& y) const override {
        need_positive(y);
        return (x.p / y.p) * bess_b(b_, bp(x), bp(y)) + y.small * x.big;
    }
    double dx(const detail::Node& x, const detail::Node& y) const override {
        need_positive(x);
        need_positive(y);
        double b = bess_b(b_, bp(x), bp(y));
        return b / (2 * x.p * y.p) + (x.p / y.p) * bess_bx(b_, bp(x), bp(y)) - 2 * x.small * y.small;
    }
    double integral(const detail::Node& x, const detail::Node& y) const override {
        need_positive(y);
        return 2 * x.p * bess_b_line(b_, x.p, y.p) + 0.5 * x.big * (x.big - y.big);
    }
    bool stationary() const override { return false; }
    double domain_min() const override { return 0; }

private:
    static BPoint bp(const detail::Node& n) { return {n.p, n.ja, n.ja1}; }
    static void need_positive(const detail::Node& n) {
        if (!(n.x > 0)) throw DomainError("bessel1: argument must be positive");
    }
    double b_;
};

}  // namespace

KernelName parse_kernel_name(std::string_view name) {
    if (name == "sine1") return KernelName::sine1;
    if (name == "sine4") return KernelName::sine4;
    if (name == "bessel1") return KernelName::bessel1;
    if (name == "bessel4") return KernelName::bessel4;
    throw ContractViolation("unknown kernel name: " + std::string(name));
}

std::string to_string(KernelName name) {
    switch (name) {
    case KernelName::sine1: return "sine1";
    case KernelName::sine4: return "sine4";
    case KernelName::bessel1: return "bessel1";
    case KernelName::bessel4: return "bessel4";
    }
    return "?";
}

double bessel2(double a, double x, double y) {
    if (!(x > 0) || !(y > 0)) throw DomainError("bessel2: arguments must be positive");
    static_cast<void>(BesselOrder(a));
    return bess_b(a, bpoint(a, std::sqrt(x)), bpoint(a, std::sqrt(y)));
}

double bessel4_scalar(double s, double x, double y) {
    if (!(s > 0)) throw DomainError("bessel4: s must be positive");
    Bessel4Model m(s);
    return m.value(m.node(x), m.node(y));
}

double bessel1_scalar(double s, double x, double y) {
    if (!(s > 0)) throw DomainError("bessel1: s must be positive");
    Bessel1Model m(s);
    return m.value(m.node(x), m.node(y));
}

int MatrixKernel::beta() const {
    return (name_ == KernelName::sine1 || name_ == KernelName::bessel1) ? 1 : 4;
}

bool MatrixKernel::in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    return stationary() || x > 0;
}

std::string MatrixKernel::label() const {
    return to_string(name_);
}

KernelEntries MatrixKernel::operator()(double x, double y) const {
    if (!in_domain(x) || !in_domain(y)) throw DomainError(label() + ": point outside the domain");
    auto nx = model_->node(x), ny = model_->node(y);
    double c = prefactor();
    double K = model_->value(nx, ny), Kt = model_->value(ny, nx);
    double d = x == y ? 0.0 : model_->dx(nx, ny);
    double q = model_->integral(nx, ny);
    double eps = beta() == 1 ? (x > y ? 0.5 : (x < y ? -0.5 : 0.0)) : 0.0;
    return {c * K, c * (-q - eps), c * d, c * Kt};
}

double MatrixKernel::scalar(double x, double y) const {
    return model_->value(model_->node(x), model_->node(y));
}

double MatrixKernel::scalar_dx(double x, double y) const {
    return model_->dx(model_->node(x), model_->node(y));
}

double MatrixKernel::scalar_integral(double x, double y) const {
    return model_->integral(model_->node(x), model_->node(y));
}

double MatrixKernel::det_from(const detail::Node& x, const detail::Node& y, double q) const {
    double c = prefactor();
    double K = model_->value(x, y), Kt = model_->value(y, x);
    double d = x.x == y.x ? 0.0 : model_->dx(x, y);
    double eps = beta() == 1 ? (x.x > y.x ? 0.5 : (x.x < y.x ? -0.5 : 0.0)) : 0.0;
    return c * c * (K * Kt + d * (q + eps));
}

MatrixKernel matrix_kernel(KernelName name, std::optional<double> s) {
    MatrixKernel k;
    k.name_ = name;
    switch (name) {
    case KernelName::sine1:
    case KernelName::sine4:
        k.model_ = std::make_shared<SineModel>();
        break;
    case KernelName::bessel4:
        if (!s || !(*s > 0)) throw ContractViolation("bessel4 needs s > 0");
        k.s_ = s;
        k.model_ = std::make_shared<Bessel4Model>(*s);
        break;
    case KernelName::bessel1:
        if (!s || !(*s > 0)) throw ContractViolation("bessel1 needs s > 0");
        k.s_ = s;
        k.model_ = std::make_shared<Bessel1Model>(*s);
        break;
    }
    return k;
}

MatrixKernel matrix_kernel(std::string_view name, std::optional<double> s) {
    return matrix_kernel(parse_kernel_name(name), s);
}

double rho1(const MatrixKernel& k, double x) {
    return k(x, x).k11;
}

double rho2_truncated(const MatrixKernel& k, double x, double y) {
    return -k(x, y).det();
}

CorrelationResult correlation_checked(const MatrixKernel& k, const std::vector<double>& pts) {
    if (pts.empty()) throw ContractViolation("correlation needs at least one point");
    for (double x : pts)
        if (!k.in_domain(x)) throw DomainError(k.label() + ": point outside the domain");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i] == pts[j]) return {0.0, true};

    const std::size_t n = pts.size();
    std::vector<KernelEntries> blocks(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) blocks[i * n + j] = k(pts[i], pts[j]);
    // Block (i, j) is K(x_i, x_j) J = [[-k12, k11], [-k22, k21]].
    auto m = AntisymmetricMatrix::from_upper(2 * n, [&](std::size_t r, std::size_t c) {
        const KernelEntries& e = blocks[(r / 2) * n + c / 2];
        int a = static_cast<int>(r % 2), b = static_cast<int>(c % 2);
        if (a == 0 && b == 0) return -e.k12;
        if (a == 0 && b == 1) return e.k11;
        if (a == 1 && b == 0) return -e.k22;
        return e.k21;
    });
    auto r = pfaffian_checked(m);
    return {r.value, r.degenerate};
}

double correlation(const MatrixKernel& k, const std::vector<double>& pts) {
    return correlation_checked(k, pts).value;
}

}  // namespace ppp
