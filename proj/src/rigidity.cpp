#include "ppp/rigidity.hpp"

#include "ppp/error.hpp"
#include "ppp/io.hpp"
#include "ppp/quad.hpp"
#include "ppp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ppp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxGridNodes = 12000;

double jv(double nu, double x) { return bessel_j(BesselOrder(nu), x); }

// Period of the oscillation in v = sqrt(y) for the Bessel kernels.
double sqrt_period(const MatrixKernel& k) {
    return k.name() == KernelName::bessel4 ? kPi : 2 * kPi;
}

void require_stationary(const MatrixKernel& k, const char* what) {
    if (!k.stationary()) throw ContractViolation(std::string(what) + ": stationary kernel expected");
}

// det K(u, 0) for a stationary kernel, even in u.
double stationary_det(const MatrixKernel& k, double u) {
    return k(std::abs(u), 0.0).det();
}

quad::Oscillation aligned(double period, double step) {
    quad::Oscillation o;
    o.kind = quad::Oscillation::Kind::AlignedPeriod;
    o.period = period;
    o.exponent_step = step;
    return o;
}

quad::TailOptions tail_options() {
    quad::TailOptions t;
    t.abs_tol = 1e-10;
    t.rel_tol = 1e-7;
    t.max_lobes = 4096;
    t.lobe.rel_tol = 1e-11;
    t.lobe.abs_tol = 1e-14;
    return t;
}

// int_0^inf det K(u, 0) du, extrapolated over whole periods.
double half_line_det_integral(const MatrixKernel& k, double from) {
    auto f = [&](double u) { return stationary_det(k, u); };
    auto t = tail_options();
    t.lobe.initial_panels = 2;
    return quad::integrate_oscillatory_tail(f, from, aligned(2.0, 1.0), t).value;
}

// ---------------------------------------------------------------------------
// Panel grid on the support of f, in u = x (stationary) or u = sqrt(x).

struct Grid {
    std::vector<double> x, W, jac, f;
    std::vector<int> panel;         // panel of each node
    std::vector<double> half;       // half width of each panel in u
    std::vector<std::size_t> start; // first node of each panel
    int nodes = 0;
};

Grid build_grid(const MatrixKernel& k, const AdditiveStatistic& st, double lo, double hi,
                const VarianceOptions& opt, int nodes) {
    const bool sq = !k.stationary();
    auto to_u = [&](double x) { return sq ? std::sqrt(x) : x; };
    std::vector<double> cuts{to_u(lo), to_u(hi)};
    for (double b : st.breaks)
        if (b > lo && b < hi) cuts.push_back(to_u(b));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto& gl = quad::gauss_legendre(nodes);
    Grid g;
    g.nodes = nodes;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double len = cuts[c + 1] - cuts[c];
        int m = std::max(1, static_cast<int>(std::ceil(len / opt.panel - 1e-9)));
        double h = len / m;
        for (int p = 0; p < m; ++p) {
            double a = cuts[c] + p * h, b = a + h;
            g.start.push_back(g.x.size());
            g.half.push_back(0.5 * h);
            int pid = static_cast<int>(g.half.size()) - 1;
            for (int i = 0; i < nodes; ++i) {
                double u = 0.5 * (a + b) + 0.5 * h * gl.x[i];
                double x = sq ? u * u : u;
                double jac = sq ? 2 * u : 1.0;
                g.x.push_back(x);
                g.jac.push_back(jac);
                g.W.push_back(0.5 * h * gl.w[i] * jac);
                g.f.push_back(st.f(x));
                g.panel.push_back(pid);
            }
        }
        if (g.x.size() > kMaxGridNodes) throw ResourceError("variance grid too large; use a stationary route or a coarser panel");
    }
    return g;
}

double grid_variance(const MatrixKernel& k, const AdditiveStatistic& st, double lo, double hi,
                     const VarianceOptions& opt, int nodes) {
    Grid g = build_grid(k, st, lo, hi, opt, nodes);
    const std::size_t n = g.x.size();
    const auto& gl = quad::gauss_legendre(nodes);
    const auto& model = k.model();
    const double c2 = k.prefactor() * k.prefactor();
    const bool beta1 = k.beta() == 1;

    std::vector<detail::Node> nd(n);
    for (std::size_t i = 0; i < n; ++i) nd[i] = model.node(g.x[i]);

    std::vector<double> K(n * n);
    auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) K[i * n + j] = model.value(nd[i], nd[j]);
    };
    std::vector<double> rowsum(n, 0.0);
    auto row = [&](std::size_t i) {
        // C(x_j) = int_lo^{x_j} K(x_i, t) dt and G(x_j) = int_lo^{x_j} f(t) dK/dx(x_i, t) dt.
        std::vector<double> C(n), G(n), d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = j == i ? 0.0 : model.dx(nd[i], nd[j]);
        double c0 = 0, g0 = 0;
        for (std::size_t p = 0; p < g.start.size(); ++p) {
            std::size_t s = g.start[p];
            double h = g.half[p];
            for (int a = 0; a < nodes; ++a) {
                double cs = 0, gs = 0;
                for (int b = 0; b < nodes; ++b) {
                    double sab = gl.S[a * nodes + b];
                    cs += sab * K[i * n + s + b] * g.jac[s + b];
                    gs += sab * g.f[s + b] * d[s + b] * g.jac[s + b];
                }
                C[s + a] = c0 + h * cs;
                G[s + a] = g0 + h * gs;
            }
            double ct = 0, gt = 0;
            for (int b = 0; b < nodes; ++b) {
                ct += gl.w[b] * K[i * n + s + b] * g.jac[s + b];
                gt += gl.w[b] * g.f[s + b] * d[s + b] * g.jac[s + b];
            }
            c0 += h * ct;
            g0 += h * gt;
        }
        double acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (g.f[j] == 0) continue;
            double q = C[j] - C[i];
            acc += g.W[j] * g.f[j] * (K[i * n + j] * K[j * n + i] + d[j] * q);
        }
        // eps(x - y) = sgn/2 enters only through the smooth f dK/dx.
        if (beta1) acc += G[i] - 0.5 * g0;
        rowsum[i] = c2 * acc;
    };

    if (opt.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) fill_row(i);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            if (g.f[i] != 0) row(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) fill_row(i);
        for (std::size_t i = 0; i < n; ++i)
            if (g.f[i] != 0) row(i);
    }

    double first = 0, second = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double rho = k.prefactor() * K[i * n + i];
        first += g.W[i] * g.f[i] * g.f[i] * rho;
        second += g.W[i] * g.f[i] * rowsum[i];
    }
    return first - second;
}

// ---------------------------------------------------------------------------
// Stationary route through the autocorrelation A(u) = int f(x) f(x + u) dx.

std::vector<double> all_breaks(const AdditiveStatistic& st) {
    std::vector<double> b{st.lo, st.hi};
    for (double t : st.breaks)
        if (t > st.lo && t < st.hi) b.push_back(t);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double autocorrelation(const AdditiveStatistic& st, const std::vector<double>& br, double u) {
    double a = st.lo, b = st.hi - u;
    if (!(b > a)) return 0;
    std::vector<double> cuts;
    for (double t : br) {
        if (t > a && t < b) cuts.push_back(t);
        if (t - u > a && t - u < b) cuts.push_back(t - u);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    quad::Options o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-14;
    return quad::integrate([&](double x) { return st.f(x) * st.f(x + u); }, a, b, cuts, o).value;
}

// Panels on [0, L] broken at all positive differences of f's breakpoints.
std::vector<double> lag_cuts(const std::vector<double>& br, double L) {
    std::vector<double> c{0.0, L};
    for (double a : br)
        for (double b : br)
            if (b - a > 0 && b - a < L) c.push_back(b - a);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(), [](double p, double q) { return std::abs(p - q) < 1e-12; }), c.end());
    return c;
}

// sum of w(u) D(u) h(u) over GL panels on [0, L].
double lag_integral(const MatrixKernel& k, const std::vector<double>& cuts, double panel, int nodes,
                    Exec exec, const std::function<double(double)>& h) {
    const auto& gl = quad::gauss_legendre(nodes);
    std::vector<double> us, ws;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double len = cuts[c + 1] - cuts[c];
        int m = std::max(1, static_cast<int>(std::ceil(len / panel - 1e-9)));
        double w = len / m;
        for (int p = 0; p < m; ++p) {
            double a = cuts[c] + p * w;
            for (int i = 0; i < nodes; ++i) {
                us.push_back(a + 0.5 * w * (1 + gl.x[i]));
                ws.push_back(0.5 * w * gl.w[i]);
            }
        }
    }
    std::vector<double> terms(us.size());
    auto one = [&](std::size_t i) { terms[i] = ws[i] * stationary_det(k, us[i]) * h(us[i]); };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(us.size()); ++i) one(i);
    } else {
        for (std::size_t i = 0; i < us.size(); ++i) one(i);
    }
    double s = 0;
    for (double t : terms) s += t;
    return s;
}

double integral_f2(const AdditiveStatistic& st, const std::vector<double>& br) {
    quad::Options o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-14;
    std::vector<double> inner(br.begin() + 1, br.end() - 1);
    return quad::integrate([&](double x) { double v = st.f(x); return v * v; }, st.lo, st.hi, inner, o).value;
}

double stationary_variance(const MatrixKernel& k, const AdditiveStatistic& st, const VarianceOptions& opt,
                           int nodes) {
    auto br = all_breaks(st);
    double L = st.hi - st.lo;
    double rho = rho1(k, 0.0);
    double f2 = integral_f2(st, br);
    auto cuts = lag_cuts(br, L);
    double pair = lag_integral(k, cuts, opt.panel, nodes, opt.exec,
                               [&](double u) { return autocorrelation(st, br, u); });
    return rho * f2 - 2 * pair;
}

VarianceResult finish(double v, double v_low) {
    double err = std::abs(v - v_low);
    if (v < 0) {
        if (v >= -1e-6 || v >= -err) v = 0;
        else throw QuadratureError("variance: negative value beyond tolerance", v, err);
    }
    return {v, err};
}

// ---------------------------------------------------------------------------
// Screening residual for the Bessel kernels, integrated in v = sqrt(y) with the
// running entry integral C(v) = int_0^v K(x, w^2) 2w dw carried along.

class ResidualLobes {
public:
    ResidualLobes(const MatrixKernel& k, double x) : k_(k), nx_(k.model().node(x)), sx_(std::sqrt(x)) {
        quad::Options o;
        o.rel_tol = 1e-13;
        o.abs_tol = 1e-15;
        o.initial_panels = 1 + static_cast<int>(sx_);
        cx_ = quad::integrate([&](double w) { return kern(w); }, 0, sx_, o).value;
    }

    double operator()(double l, double r) {
        std::vector<double> cuts{l};
        if (sx_ > l && sx_ < r) cuts.push_back(sx_);
        cuts.push_back(r);
        double total = 0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double len = cuts[c + 1] - cuts[c];
            int m = std::max(1, static_cast<int>(std::ceil(len / 0.8)));
            for (int p = 0; p < m; ++p) {
                double a = cuts[c] + len * p / m;
                total += panel(a, a + len / m);
            }
        }
        return total;
    }

private:
    double kern(double w) const {
        return k_.model().value(nx_, k_.model().node(w * w)) * 2 * w;
    }

    double panel(double a, double b) {
        const auto& gl = quad::gauss_legendre(kNodes);
        double h = 0.5 * (b - a);
        std::vector<detail::Node> nodes(kNodes);
        std::vector<double> g(kNodes), v(kNodes);
        for (int i = 0; i < kNodes; ++i) {
            v[i] = 0.5 * (a + b) + h * gl.x[i];
            nodes[i] = k_.model().node(v[i] * v[i]);
            g[i] = k_.model().value(nx_, nodes[i]) * 2 * v[i];
        }
        double sum = 0, ct = 0;
        for (int i = 0; i < kNodes; ++i) {
            double cs = 0;
            for (int j = 0; j < kNodes; ++j) cs += gl.S[i * kNodes + j] * g[j];
            double q = c_ + h * cs - cx_;
            sum += gl.w[i] * k_.det_from(nx_, nodes[i], q) * 2 * v[i];
            ct += gl.w[i] * g[i];
        }
        c_ += h * ct;
        return h * sum;
    }

    static constexpr int kNodes = 32;
    const MatrixKernel& k_;
    detail::Node nx_;
    double sx_;
    double cx_ = 0;
    double c_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------

TaperFunction::TaperFunction(double R, double T) : R_(R), T_(T) {
    if (!(R > 0) || !(T > R) || !std::isfinite(T)) throw ContractViolation("taper needs 0 < R < T");
    logw_ = std::log(T - R + 1);
}

double TaperFunction::operator()(double x) const {
    if (x <= R_) return 1.0;
    if (x >= T_) return 0.0;
    return 1.0 - std::log(x - R_ + 1) / logw_;
}

double taper_eval(const TaperFunction& t, double x) {
    if (!(x >= 0)) throw DomainError("taper_eval: x must be nonnegative");
    return t(x);
}

AdditiveStatistic taper_statistic(const TaperFunction& t, bool two_sided) {
    AdditiveStatistic s;
    if (two_sided) {
        s.f = [t](double x) { return t(std::abs(x)); };
        s.lo = -t.T();
        s.hi = t.T();
        s.breaks = {-t.R(), t.R()};
    } else {
        s.f = [t](double x) { return x < 0 ? 0.0 : t(x); };
        s.lo = 0;
        s.hi = t.T();
        s.breaks = {t.R()};
    }
    return s;
}

AdditiveStatistic indicator_statistic(double a, double b) {
    if (!(b > a)) throw ContractViolation("indicator needs a < b");
    AdditiveStatistic s;
    s.f = [a, b](double x) { return (x >= a && x < b) ? 1.0 : 0.0; };
    s.lo = a;
    s.hi = b;
    return s;
}

AdditiveStatistic zero_statistic() {
    AdditiveStatistic s;
    s.f = [](double) { return 0.0; };
    return s;
}

VarianceResult variance_additive(const MatrixKernel& k, const AdditiveStatistic& f, const VarianceOptions& opt) {
    if (!f.f) throw ContractViolation("variance_additive: empty test function");
    if (!std::isfinite(f.lo) || !std::isfinite(f.hi)) throw ContractViolation("variance_additive: support must be finite");
    if (!(opt.panel > 0) || opt.nodes < 4 || opt.nodes > 64) throw ContractViolation("variance_additive: bad grid options");
    double lo = f.lo, hi = f.hi;
    if (!k.stationary()) lo = std::max(lo, 0.0);
    if (!(hi > lo)) return {0, 0};

    const int low = std::max(4, opt.nodes - 4);
    if (k.stationary() && !opt.force_grid) {
        AdditiveStatistic g = f;
        g.lo = lo;
        g.hi = hi;
        return finish(stationary_variance(k, g, opt, opt.nodes), stationary_variance(k, g, opt, low));
    }
    return finish(grid_variance(k, f, lo, hi, opt, opt.nodes), grid_variance(k, f, lo, hi, opt, low));
}

VarianceSplit variance_general_split(const MatrixKernel& k, const AdditiveStatistic& f) {
    require_stationary(k, "variance_general_split");
    if (!(f.hi > f.lo)) return {0, 0};
    auto br = all_breaks(f);
    double L = f.hi - f.lo;
    double f2 = integral_f2(f, br);
    double screen = 2 * half_line_det_integral(k, 0.0);
    double bulk = lag_integral(k, lag_cuts(br, L), 0.5, 16, Exec::Parallel,
                               [&](double u) { return f2 - autocorrelation(f, br, u); });
    double tail = half_line_det_integral(k, L);
    return {f2 * (rho1(k, 0.0) - screen), 2 * bulk + 2 * f2 * tail};
}

double defect(const MatrixKernel& k, double x) {
    if (!k.in_domain(x)) throw DomainError("defect: point outside the domain");
    auto t = tail_options();
    if (k.stationary()) {
        auto f = [](double u) { double s = sine_kernel_parts(u).S; return s * s; };
        return 2 * quad::integrate_oscillatory_tail(f, 0, aligned(1.0, 1.0), t).value - 1.0;
    }
    const auto& m = k.model();
    auto nx = m.node(x);
    auto f = [&](double v) {
        if (v == 0) return 0.0;
        auto ny = m.node(v * v);
        return m.value(nx, ny) * m.value(ny, nx) * 2 * v;
    };
    t.lobe.initial_panels = 4;
    double I = quad::integrate_oscillatory_tail(f, 0, aligned(sqrt_period(k), 0.5), t).value;
    return I - m.value(nx, nx);
}

double defect_closed_form(const MatrixKernel& k, double x) {
    if (!k.in_domain(x)) throw DomainError("defect: point outside the domain");
    if (k.stationary()) return 0.0;
    double s = *k.s();
    double r = std::sqrt(x);
    if (k.name() == KernelName::bessel4) {
        double a = 2 * s - 1;
        double F = 0.5 * bessel_j_cumulative(BesselOrder(a), 2 * r);
        return -3.0 / 16.0 * jv(a, 2 * r) / r * F;
    }
    double b = s + 1;
    return jv(b, r) / (16 * r) * bessel_j_tail(BesselOrder(b), r);
}

double screening_residual(const MatrixKernel& k, double x) {
    if (!k.in_domain(x)) throw DomainError("screening_residual: point outside the domain");
    if (k.stationary()) return 2 * half_line_det_integral(k, 0.0) - rho1(k, x);
    ResidualLobes lobes(k, x);
    auto t = tail_options();
    double I = quad::integrate_lobes(std::ref(lobes), 0, aligned(sqrt_period(k), 0.5), t).value;
    return I - rho1(k, x);
}

double screening_residual_closed_form(const MatrixKernel& k, double x) {
    if (!k.in_domain(x)) throw DomainError("screening_residual: point outside the domain");
    if (k.stationary()) return 0.0;
    double s = *k.s();
    double r = std::sqrt(x);
    if (k.name() == KernelName::bessel4) {
        double a = 2 * s - 1;
        double J = jv(a, 2 * r);
        double F = 0.5 * bessel_j_cumulative(BesselOrder(a), 2 * r);
        return J / (16 * r) - J / (4 * r) * F;
    }
    double b = s + 1;
    double T = bessel_j_tail(BesselOrder(b), r);
    return jv(b, r) / (8 * r) * (T - (1 - T));
}

double screening_integral_symmetric(const MatrixKernel& k, double x, double M) {
    require_stationary(k, "screening_integral_symmetric");
    if (!(M > 0)) throw ContractViolation("screening_integral_symmetric: M must be positive");
    static_cast<void>(x);
    quad::Options o;
    o.rel_tol = 1e-11;
    o.abs_tol = 1e-13;
    o.initial_panels = static_cast<int>(std::ceil(2 * M));
    o.max_subdivisions = 20 * o.initial_panels + 4000;
    return -2 * quad::integrate([&](double u) { return stationary_det(k, u); }, 0, M, o).value;
}

double screening_average(const MatrixKernel& k, double X) {
    if (!(X >= 0)) throw ContractViolation("screening_average: X must be nonnegative");
    if (X == 0 || k.stationary()) return 0.0;
    double V = std::sqrt(X);
    quad::Options o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-14;
    o.initial_panels = 1 + static_cast<int>(2 * V);
    o.max_subdivisions = 20 * o.initial_panels + 4000;
    auto f = [&](double v) { return v == 0 ? 0.0 : screening_residual_closed_form(k, v * v) * 2 * v; };
    return quad::integrate(f, 0, V, o).value;
}

std::vector<SweepRow> variance_sweep(const MatrixKernel& k, double R, const std::vector<double>& Ts,
                                     const VarianceOptions& opt) {
    if (Ts.empty()) throw ContractViolation("variance_sweep: empty T list");
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!(Ts[i] > R)) throw ContractViolation("variance_sweep: every T must exceed R");
        if (i && !(Ts[i] > Ts[i - 1])) throw ContractViolation("variance_sweep: T list must be increasing");
    }
    std::vector<SweepRow> rows;
    for (double T : Ts) {
        auto st = taper_statistic(TaperFunction(R, T), k.stationary());
        auto v = variance_additive(k, st, opt);
        rows.push_back({T, v.variance, v.error_estimate});
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const MatrixKernel& k, double R, const std::vector<SweepRow>& rows) {
    os << "kernel,s,R,T,variance,err_estimate\n";
    std::string s = k.s() ? io::num(*k.s()) : "";
    for (const auto& r : rows)
        os << io::csv_row({k.label(), s, io::num(R), io::num(r.T), io::num(r.variance), io::num(r.error_estimate)});
}

}  // namespace ppp
