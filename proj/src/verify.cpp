#include "ppp/verify.hpp"

#include "ppp/ensembles.hpp"
#include "ppp/error.hpp"
#include "ppp/kernels.hpp"
#include "ppp/occupation.hpp"
#include "ppp/pfaffian.hpp"
#include "ppp/rigidity.hpp"
#include "ppp/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

namespace ppp::verify {

namespace {

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const KernelName kAll[] = {KernelName::sine1, KernelName::sine4, KernelName::bessel1, KernelName::bessel4};

MatrixKernel kernel(KernelName n) {
    return (n == KernelName::sine1 || n == KernelName::sine4) ? matrix_kernel(n) : matrix_kernel(n, 1.0);
}

struct Outcome {
    bool pass;
    std::string name;
    std::string details;
};

Outcome pfaffian_check(const Options& opt) {
    Philox4x32 gen(opt.seed, 1);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int m = 0; m < 200; ++m) {
        std::size_t n = 2 * (1 + m % 10);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                a(i, j) = u(gen);
                a(j, i) = -a(i, j);
            }
        std::vector<double> e(a.data(), a.data() + n * n);
        double pf = pfaffian(AntisymmetricMatrix(n, e));
        double det = a.partialPivLu().determinant();
        worst = std::max(worst, std::abs(pf * pf - det) / std::abs(det));
    }
    double worst4 = 0;
    for (int m = 0; m < 50; ++m) {
        double b[6];
        for (double& v : b) v = u(gen);
        auto A = AntisymmetricMatrix::from_upper(4, [&](std::size_t i, std::size_t j) {
            static const int idx[4][4] = {{-1, 0, 1, 2}, {-1, -1, 3, 4}, {-1, -1, -1, 5}, {-1, -1, -1, -1}};
            return b[idx[i][j]];
        });
        double closed = b[0] * b[5] - b[1] * b[4] + b[2] * b[3];
        worst4 = std::max(worst4, std::abs(pfaffian(A) - closed));
    }
    return {worst <= 1e-9 && worst4 <= 1e-12, "pfaffian",
            "max rel |Pf^2 - det| = " + g(worst) + " (tol 1e-09, 200 matrices); 4x4 closed form err " + g(worst4) +
                " (tol 1e-12)"};
}

Outcome kernel_structure(const Options& opt) {
    Philox4x32 gen(opt.seed, 2);
    double skew = 0, detsym = 0, diag = 0;
    for (auto name : kAll) {
        auto k = kernel(name);
        std::uniform_real_distribution<double> u(k.stationary() ? -20.0 : 0.01, k.stationary() ? 20.0 : 50.0);
        for (int i = 0; i < 1000; ++i) {
            double x = u(gen), y = u(gen);
            auto a = k(x, y), b = k(y, x);
            skew = std::max({skew, std::abs(a.k22 - b.k11), std::abs(a.k12 + b.k12), std::abs(a.k21 + b.k21)});
            detsym = std::max(detsym, std::abs(a.det() - b.det()));
            if (i < 100) diag = std::max(diag, std::abs(correlation(k, {x, x})));
        }
    }
    return {skew <= 1e-9 && detsym <= 1e-9 && diag <= 1e-8, "kernel structure",
            "skew " + g(skew) + ", det symmetry " + g(detsym) + " (tol 1e-09, 1000 pairs x 4 kernels); rho2(x,x) " +
                g(diag) + " (tol 1e-08)"};
}

Outcome screening_identities(const Options&) {
    double a = screening_integral_symmetric(matrix_kernel(KernelName::sine1), 0, 100);
    double b = screening_integral_symmetric(matrix_kernel(KernelName::sine4), 0, 200);
    bool pass = std::abs(a + 1) <= 0.05 && std::abs(b + 0.5) <= 0.05;
    return {pass, "screening identities",
            "sine1 M=100: " + g(a) + " (target -1); sine4 M=200: " + g(b) + " (target -0.5); tol 0.05"};
}

const double kXGrid[] = {0.5, 1, 2, 5, 10};

Outcome bessel_residuals(const Options&) {
    bool pass = true;
    std::string d;
    for (auto name : {KernelName::bessel4, KernelName::bessel1}) {
        auto k = kernel(name);
        double worst = 0, maxnum = 0, maxcf = 0;
        for (double x : kXGrid) {
            double num = screening_residual(k, x), cf = screening_residual_closed_form(k, x);
            worst = std::max(worst, std::abs(num - cf) / std::max(std::abs(num), std::abs(cf)));
            maxnum = std::max(maxnum, std::abs(num));
            maxcf = std::max(maxcf, std::abs(cf));
        }
        double a2 = std::abs(screening_average(k, 1e2)), a3 = std::abs(screening_average(k, 1e3)),
               a4 = std::abs(screening_average(k, 1e4));
        bool closed = worst <= 1e-3, avg = a4 <= 0.02 && a3 < a2 && a4 < a3;
        pass = pass && closed && avg;
        if (!d.empty()) d += "; ";
        d += to_string(name) + " closed form rel err " + g(worst) + (closed ? "" : " [fail]") + " (max |quad| " +
             g(maxnum) + ", max |closed| " + g(maxcf) + "), |avg| at 1e2/1e3/1e4 = " + g(a2) + "/" + g(a3) + "/" +
             g(a4) + (avg ? "" : " [fail]");
    }
    return {pass, "bessel residuals", d};
}

Outcome defects(const Options&) {
    double sine = 0;
    for (auto name : {KernelName::sine1, KernelName::sine4})
        for (double x : kXGrid) sine = std::max(sine, std::abs(defect(kernel(name), x)));
    bool pass = sine <= 1e-6;
    std::string d = "sine max |Def| " + g(sine) + " (tol 1e-06)";
    for (auto name : {KernelName::bessel4, KernelName::bessel1}) {
        auto k = kernel(name);
        double worst = 0;
        for (double x : kXGrid) {
            double num = defect(k, x), cf = defect_closed_form(k, x);
            worst = std::max(worst, std::abs(num - cf) / std::max(std::abs(num), std::abs(cf)));
        }
        pass = pass && worst <= 1e-3;
        d += "; " + to_string(name) + " closed form rel err " + g(worst) + (worst <= 1e-3 ? "" : " [fail]");
    }
    return {pass, "defects", d + " (tol 1e-03)"};
}

Outcome spectral_forms(const Options&) {
    bool pass = true;
    std::string d;
    for (auto name : {KernelName::sine1, KernelName::sine4}) {
        StationaryProfile p(kernel(name));
        double f0 = p.fhat(0), worst = 0;
        for (int i = 1; i <= 20; ++i) {
            double l = 0.1 * i;
            if (name == KernelName::sine4 && std::abs(l - 0.5) < 0.05) continue;
            worst = std::max(worst, std::abs(p.fhat(l) - f0 - closed_form_fhat_delta(name, l)));
        }
        double zero = std::abs(f0 + p.rho());
        pass = pass && worst <= 5e-3 && zero <= 2e-2;
        d += to_string(name) + " max |delta err| " + g(worst) + ", |Fhat(0)+rho| " + g(zero) + "; ";
    }
    double jump = std::abs(closed_form_fhat_delta_branch(KernelName::sine1, 1, false) -
                           closed_form_fhat_delta_branch(KernelName::sine1, 1, true));
    pass = pass && jump <= 1e-12;
    return {pass, "spectral closed forms", d + "sine1 branch jump at 1: " + g(jump) + " (tol 5e-03 / 2e-02 / 1e-12)"};
}

Outcome linear_bound(const Options&) {
    auto r1 = check_linear_bound(StationaryProfile(kernel(KernelName::sine1)), 1.0, 2.1);
    auto r4 = check_linear_bound(StationaryProfile(kernel(KernelName::sine4)), 0.4, 1.0);
    return {r1.pass && r4.pass, "linear bound",
            "sine1 C=2.1 on (0,1]: max ratio " + g(r1.max_ratio) + (r1.pass ? "" : " [fail]") +
                "; sine4 C=1 on (0,0.4]: max ratio " + g(r4.max_ratio) + (r4.pass ? "" : " [fail]")};
}

Outcome mollifiers(const Options&) {
    bool pass = true;
    std::string d;
    for (auto name : {KernelName::sine1, KernelName::sine4}) {
        StationaryProfile p(kernel(name));
        for (int n : {1, 2, 5}) {
            auto m = build_mollifier(p, n, 2);
            bool ok = m.variance <= 1.0 / n && m.sup_deviation <= 1.0 / n;
            pass = pass && ok;
            if (!d.empty()) d += "; ";
            d += to_string(name) + " n=" + std::to_string(n) + " var " + g(m.variance) + " sup " +
                 g(m.sup_deviation) + (ok ? "" : " [fail]");
        }
    }
    return {pass, "mollifier", d + " (bound 1/n, R=2)"};
}

Outcome sweeps(const Options&) {
    bool pass = true;
    std::string d;
    for (auto name : kAll) {
        auto rows = variance_sweep(kernel(name), 1, {10, 100, 1000});
        bool dec = rows[1].variance < rows[0].variance && rows[2].variance < rows[1].variance;
        double ratio = rows[2].variance / rows[0].variance;
        bool ok = dec && ratio <= 0.5;
        pass = pass && ok;
        if (!d.empty()) d += "; ";
        d += to_string(name) + " " + g(rows[0].variance) + "/" + g(rows[1].variance) + "/" + g(rows[2].variance) +
             " ratio " + g(ratio) + (ok ? "" : " [fail]");
    }
    return {pass, "variance sweeps", d + " (T=10/100/1000, R=1, ratio <= 0.5)"};
}

Outcome occupation(const Options&) {
    auto s1 = covariance_series(kernel(KernelName::sine1), 1, 512);
    auto s4 = covariance_series(kernel(KernelName::sine4), 2, 512);
    auto h = covariance_series(kernel(KernelName::sine4), 1, 512);
    double t1 = cov_total_sum(s1, 200).sum, t4 = cov_total_sum(s4, 200).sum;
    bool a = std::abs(t1) <= 0.02 && std::abs(t4) <= 0.02;
    bool b = true;
    std::string bd;
    for (const auto* s : {&s1, &s4}) {
        double first = 10 * cov_abs_tail(*s, 10), worst = 0;
        for (int N = 10; N <= 100; N += 10) worst = std::max(worst, N * cov_abs_tail(*s, N));
        b = b && worst <= 2 * first;
        bd += " " + g(worst / first);
    }
    auto g1 = partial_abs_sums(h, {100, 400}), g2 = partial_abs_sums(s4, {100, 400});
    double gain1 = g1[1] - g1[0], gain2 = g2[1] - g2[0];
    bool c = gain1 >= 1e-3 && gain2 <= 1e-4;
    return {a && b && c, "occupation",
            std::string("(a) sums ") + g(t1) + ", " + g(t4) + (a ? "" : " [fail]") + "; (b) max/first N*tail" + bd +
                (b ? "" : " [fail]") + "; (c) gain sine4 l=1 " + g(gain1) + ", l=2 " + g(gain2) +
                (c ? "" : " [fail]") + " (tol 0.02 / 2 / 1e-03, 1e-04)"};
}

Outcome monte_carlo(const Options& opt) {
    int n1 = opt.quick ? 100 : 200, nb = opt.quick ? 100 : 200;
    std::size_t m1 = opt.quick ? 2000 : 10000, mb = opt.quick ? 40000 : 100000;
    auto v = validate_sine1_variance(n1, m1, opt.seed);
    auto b = validate_bessel4_mean(1, nb, mb, opt.seed + 1, 2);
    return {v.pass && b.pass, "monte carlo",
            "sine1 variance " + g(v.empirical) + " +- " + g(v.stderr_) + " vs " + g(v.analytic) +
                (v.pass ? "" : " [fail]") + " (N=" + std::to_string(n1) + ", " + std::to_string(m1) +
                " samples); bessel4 mean " + g(b.empirical) + " vs " + g(b.analytic) + ", rel " +
                g(std::abs(b.empirical / b.analytic - 1)) + (b.pass ? "" : " [fail]") + " (N=" +
                std::to_string(nb) + ", " + std::to_string(mb) + " samples)"};
}

const double kBudget[] = {0, 1, 10, 30, 300, 120, 120, 30, 120, 1200, 300, 600, 0};

using Check = Outcome (*)(const Options&);
const Check kChecks[] = {nullptr,         pfaffian_check, kernel_structure, screening_identities, bessel_residuals,
                         defects,         spectral_forms, linear_bound,     mollifiers,           sweeps,
                         occupation,      monte_carlo};

CriterionResult finish(int id, Outcome o, double secs) {
    CriterionResult r;
    r.id = id;
    r.seconds = secs;
    r.budget = kBudget[id];
    bool late = r.budget > 0 && secs > r.budget;
    r.pass = o.pass && !late;
    r.line = "criterion " + std::to_string(id) + ": " + (r.pass ? "PASS " : "FAIL ") + o.name + ": " + o.details +
             (late ? " [over runtime budget]" : "");
    return r;
}

CriterionResult run_single(int id, const Options& opt) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = kChecks[id](opt);
    } catch (const std::exception& e) {
        o = {false, "error", e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(id, o, secs);
}

CriterionResult reproducibility(const std::vector<std::string>& first, const Options& opt) {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t diff = 0;
    for (int id = 1; id < kCriteria; ++id)
        if (run_single(id, opt).line != first[id - 1]) ++diff;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(kCriteria,
                  {diff == 0, "reproducibility",
                   "second in-process run of criteria 1-11: " + std::to_string(diff) + " differing lines"},
                  secs);
}

}  // namespace

CriterionResult run_criterion(int id, const Options& opt) {
    if (id < 1 || id > kCriteria) throw ContractViolation("criterion id must be in 1..12");
    if (id < kCriteria) return run_single(id, opt);
    std::vector<std::string> first;
    for (int i = 1; i < kCriteria; ++i) first.push_back(run_single(i, opt).line);
    return reproducibility(first, opt);
}

bool run_all(const Options& opt, std::ostream& out, std::ostream* diag) {
    bool all = true;
    std::vector<std::string> lines;
    auto emit = [&](const CriterionResult& r) {
        out << r.line << '\n' << std::flush;
        if (diag) *diag << "criterion " << r.id << ": " << g(r.seconds) << " s\n" << std::flush;
        all = all && r.pass;
    };
    for (int id = 1; id < kCriteria; ++id) {
        auto r = run_single(id, opt);
        lines.push_back(r.line);
        emit(r);
    }
    emit(reproducibility(lines, opt));
    return all;
}

}  // namespace ppp::verify
