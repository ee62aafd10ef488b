#include "ppp/quad.hpp"

#include "ppp/error.hpp"
#include "ppp/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>

namespace ppp::quad {

namespace {

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Kronrod-21 / Gauss-10 tables from Boost: abscissae >= 0 only.
Segment gk21(const Integrand& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    static const auto& xk = GK::abscissa();
    static const auto& wk = GK::weights();
    static const auto& wg = G::weights();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double f0 = f(c);
    double rk = wk[0] * f0, rg = 0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        double fs = f(c + h * xk[i]) + f(c - h * xk[i]);
        rk += wk[i] * fs;
        if (i % 2 == 1) rg += wg[(i - 1) / 2] * fs;
    }
    // Odd Kronrod indices carry the 10-point Gauss nodes.
    double err = std::abs((rk - rg) * h);
    return {a, b, rk * h, err};
}

Result adaptive(const Integrand& f, const std::vector<double>& edges, const Options& opt) {
    std::priority_queue<Segment> heap;
    double total = 0, err = 0;
    int evals = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i + 1] == edges[i]) continue;
        Segment s = gk21(f, edges[i], edges[i + 1]);
        evals += 21;
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int splits = 0;
    while (!heap.empty() && err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (splits >= opt.max_subdivisions)
            throw QuadratureError("adaptive quadrature: subdivision budget exhausted", total, err);
        Segment s = heap.top();
        heap.pop();
        double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) {
            // Interval at machine resolution; keep its estimate.
            heap.push({s.a, s.b, s.value, 0.0});
            err -= s.error;
            continue;
        }
        Segment l = gk21(f, s.a, m), r = gk21(f, m, s.b);
        evals += 42;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++splits;
    }
    // Re-sum to shed accumulated update drift.
    double sum = 0, esum = 0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return {sum, esum, evals};
}

std::vector<double> panel_edges(double a, double b, int panels) {
    panels = std::max(1, panels);
    std::vector<double> e(panels + 1);
    for (int i = 0; i <= panels; ++i) e[i] = a + (b - a) * i / panels;
    e[panels] = b;
    return e;
}

Result integrate_plain(const Integrand& f, double a, double b, const Options& opt) {
    switch (opt.singularity) {
    case Singularity::None:
        return adaptive(f, panel_edges(a, b, opt.initial_panels), opt);
    case Singularity::Left: {
        // x = a + (b - a) t^2 removes x^{-1/2}-type behaviour at a.
        double L = b - a;
        auto g = [&](double t) { return 2 * L * t * f(a + L * t * t); };
        return adaptive(g, panel_edges(0, 1, opt.initial_panels), opt);
    }
    case Singularity::Right: {
        double L = b - a;
        auto g = [&](double t) { return 2 * L * t * f(b - L * t * t); };
        return adaptive(g, panel_edges(0, 1, opt.initial_panels), opt);
    }
    case Singularity::Both: {
        double m = 0.5 * (a + b);
        Options lo = opt, hi = opt;
        lo.singularity = Singularity::Left;
        hi.singularity = Singularity::Right;
        Result r1 = integrate_plain(f, a, m, lo), r2 = integrate_plain(f, m, b, hi);
        return {r1.value + r2.value, r1.error + r2.error, r1.evaluations + r2.evaluations};
    }
    }
    return {};
}

// Breakpoints of the lobe decomposition beyond a.
class LobeGrid {
public:
    LobeGrid(double a, const Oscillation& osc) : a_(a), osc_(osc) {
        if (osc.kind == Oscillation::Kind::BesselZeros) {
            if (!(osc.scale > 0)) throw ContractViolation("Bessel oscillation needs positive scale");
            BesselOrder nu(osc.nu);
            k0_ = 1;
            while (bessel_j_zero(nu, k0_) / osc.scale <= a) ++k0_;
        } else if (!(osc.period > 0)) {
            throw ContractViolation("oscillation period must be positive");
        }
    }

    // Point ending lobe i (i >= 0); lobe 0 starts at a.
    double end(int i) const {
        switch (osc_.kind) {
        case Oscillation::Kind::Period:
            return a_ + 0.5 * osc_.period * (i + 1);
        case Oscillation::Kind::AlignedPeriod:
            return a_ + osc_.period * (i + 1);
        case Oscillation::Kind::BesselZeros:
            return bessel_j_zero(BesselOrder(osc_.nu), k0_ + i) / osc_.scale;
        }
        return a_;
    }

private:
    double a_;
    Oscillation osc_;
    int k0_ = 1;
};

// Lobe magnitudes in the last quarter not clearly below those of the second quarter.
bool lobes_growing(const std::vector<double>& lobes) {
    std::size_t n = lobes.size();
    if (n < 16) return false;
    double early = 0, late = 0;
    for (std::size_t i = n / 4; i < n / 2; ++i) early = std::max(early, std::abs(lobes[i]));
    for (std::size_t i = 3 * n / 4; i < n; ++i) late = std::max(late, std::abs(lobes[i]));
    return late > 0.95 * early && late > 1e-300;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opt) {
    if (!(opt.abs_tol > 0) || !(opt.rel_tol > 0)) throw ContractViolation("tolerances must be positive");
    if (a == b) return {0, 0, 0};
    if (b < a) {
        Result r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    return integrate_plain(f, a, b, opt);
}

Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                 const Options& opt) {
    if (b < a) {
        Result r = integrate(f, b, a, breaks, opt);
        r.value = -r.value;
        return r;
    }
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.push_back(b);
    Result total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Options o = opt;
        if (o.singularity == Singularity::Both) {
            o.singularity = Singularity::None;
            if (i == 0) o.singularity = Singularity::Left;
            if (i + 2 == pts.size()) o.singularity = pts.size() == 2 ? Singularity::Both : Singularity::Right;
        } else if (o.singularity == Singularity::Left && i > 0) {
            o.singularity = Singularity::None;
        } else if (o.singularity == Singularity::Right && i + 2 < pts.size()) {
            o.singularity = Singularity::None;
        }
        Result r = integrate(f, pts[i], pts[i + 1], o);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
    }
    return total;
}

Result iterated_aitken(const std::vector<double>& s) {
    if (s.empty()) return {0, 0, 0};
    if (s.size() < 3) return {s.back(), s.size() == 2 ? std::abs(s[1] - s[0]) : 0.0, 0};
    std::vector<double> cur = s;
    double prev_est = s[s.size() - 2], est = s.back();
    while (cur.size() >= 3) {
        std::vector<double> next;
        next.reserve(cur.size() - 2);
        for (std::size_t i = 0; i + 2 < cur.size(); ++i) {
            double d1 = cur[i + 1] - cur[i], d2 = cur[i + 2] - cur[i + 1];
            double den = d2 - d1;
            if (den == 0 || !std::isfinite(den)) next.push_back(cur[i + 2]);
            else next.push_back(cur[i + 2] - d2 * d2 / den);
        }
        prev_est = next.size() >= 2 ? next[next.size() - 2] : est;
        est = next.back();
        cur.swap(next);
    }
    return {est, std::abs(est - prev_est), 0};
}

Result richardson(const std::vector<double>& h, const std::vector<double>& v) {
    if (h.size() != v.size() || v.empty()) throw ContractViolation("richardson: size mismatch");
    const std::size_t n = v.size();
    // Neville table T[i][m], polynomial in h through points i-m..i, evaluated at 0.
    std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        t[i][0] = v[i];
        for (std::size_t m = 1; m <= i; ++m)
            t[i][m] = (h[i - m] * t[i][m - 1] - h[i] * t[i - 1][m - 1]) / (h[i - m] - h[i]);
    }
    double est = t[n - 1][n - 1];
    double err = n >= 2 ? std::abs(est - t[n - 1][n - 2]) : 0.0;
    return {est, err, 0};
}

Result integrate_lobes(const LobeIntegral& lobe, double a, const Oscillation& osc,
                       const TailOptions& opt) {
    LobeGrid grid(a, osc);
    std::vector<double> lobes;
    double left = a, sum = 0;
    auto add = [&]() {
        double right = grid.end(static_cast<int>(lobes.size()));
        double v = lobe(left, right);
        lobes.push_back(v);
        sum += v;
        left = right;
    };
    auto tol = [&](double value) { return std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };

    if (osc.kind == Oscillation::Kind::AlignedPeriod) {
        // Partial integrals at n = 8, 16, 32, ... periods, extrapolated in n^{-step}.
        std::vector<double> hs, sums;
        Result best{0, 0, 0};
        int n = 8;
        while (n <= opt.max_lobes) {
            while (static_cast<int>(lobes.size()) < n) add();
            hs.push_back(std::pow(static_cast<double>(n), -osc.exponent_step));
            sums.push_back(sum);
            if (lobes_growing(lobes)) throw DivergenceError("oscillatory tail: lobes do not decay", sum, INFINITY);
            if (sums.size() >= 3) {
                std::size_t m = std::min<std::size_t>(sums.size(), 7);
                std::vector<double> hh(hs.end() - m, hs.end()), ss(sums.end() - m, sums.end());
                Result r = richardson(hh, ss);
                std::vector<double> hh2(hs.end() - m, hs.end() - 1), ss2(sums.end() - m, sums.end() - 1);
                Result r2 = richardson(hh2, ss2);
                best = {r.value, std::max(r.error, std::abs(r.value - r2.value)), 0};
                if (best.error <= tol(best.value)) return best;
            }
            n *= 2;
        }
        throw QuadratureError("oscillatory tail: extrapolation did not settle", best.value, best.error);
    }

    std::vector<double> partial;
    Result best{0, 0, 0};
    double last = NAN;
    while (static_cast<int>(lobes.size()) < opt.max_lobes) {
        add();
        partial.push_back(sum);
        if (lobes_growing(lobes)) throw DivergenceError("oscillatory tail: lobes do not decay", sum, INFINITY);
        if (partial.size() >= 8 && partial.size() % 4 == 0) {
            std::size_t m = std::min<std::size_t>(partial.size(), 24);
            std::vector<double> tail(partial.end() - m, partial.end());
            Result r = iterated_aitken(tail);
            double err = std::isnan(last) ? INFINITY : std::abs(r.value - last);
            err = std::max(err, r.error);
            best = {r.value, err, 0};
            last = r.value;
            if (err <= tol(r.value)) return best;
            bool all_zero = std::all_of(lobes.begin(), lobes.end(), [](double v) { return v == 0; });
            if (all_zero) return {0, 0, 0};
        }
    }
    throw QuadratureError("oscillatory tail: acceleration did not settle", best.value, best.error);
}

Result integrate_oscillatory_tail(const Integrand& f, double a, const Oscillation& osc,
                                  const TailOptions& opt) {
    int evals = 0;
    auto lobe = [&](double l, double r) {
        Result res = integrate(f, l, r, opt.lobe);
        evals += res.evaluations;
        return res.value;
    };
    Result r = integrate_lobes(lobe, a, osc, opt);
    r.evaluations = evals;
    return r;
}

double lobe_partial_sum(const Integrand& f, double a, const Oscillation& osc, int n, const Options& lobe) {
    LobeGrid grid(a, osc);
    double left = a, sum = 0;
    for (int i = 0; i < n; ++i) {
        double right = grid.end(i);
        sum += integrate(f, left, right, lobe).value;
        left = right;
    }
    return sum;
}

GaussLegendre::GaussLegendre(int n_) : n(n_), x(n_), w(n_), S(static_cast<std::size_t>(n_) * n_) {
    auto legendre = [&](double z, int deg, double& p, double& dp) {
        double p0 = 1, p1 = 0;
        for (int k = 1; k <= deg; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
        }
        p = p0;
        dp = deg * (z * p0 - p1) / (z * z - 1);
    };
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(z, n, p, dp);
            double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        legendre(z, n, p, dp);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
    // Lagrange basis expanded in Legendre polynomials (exact by discrete orthogonality).
    std::vector<double> P(static_cast<std::size_t>(n + 1) * n);  // P_k(x_j)
    std::vector<double> Q(static_cast<std::size_t>(n + 1) * n);  // P_k(x_i), k up to n
    for (int j = 0; j < n; ++j) {
        double p0 = 1, p1 = 0;
        P[j] = 1;
        for (int k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2 * k - 1) * x[j] * p1 - (k - 1) * p2) / k;
            P[static_cast<std::size_t>(k) * n + j] = p0;
        }
    }
    Q = P;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.5 * (x[i] + 1);
            for (int k = 1; k < n; ++k) {
                double pk_j = P[static_cast<std::size_t>(k) * n + j];
                double up = Q[static_cast<std::size_t>(k + 1) * n + i];
                double dn = Q[static_cast<std::size_t>(k - 1) * n + i];
                s += 0.5 * pk_j * (up - dn);
            }
            S[static_cast<std::size_t>(i) * n + j] = w[j] * s;
        }
    }
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex m;
    static std::map<int, std::unique_ptr<GaussLegendre>> rules;
    std::lock_guard lock(m);
    auto& r = rules[n];
    if (!r) r = std::make_unique<GaussLegendre>(n);
    return *r;
}

}  // namespace ppp::quad
