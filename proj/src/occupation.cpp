#include "ppp/occupation.hpp"

#include "ppp/error.hpp"
#include "ppp/io.hpp"
#include "ppp/quad.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ppp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double F(const MatrixKernel& k, double u) {
    return -k(std::abs(u), 0.0).det();
}

bool even_integer(double x) {
    double r = std::round(x);
    return std::abs(x - r) < 1e-12 && static_cast<long>(r) % 2 == 0;
}

}  // namespace

IntervalGrid::IntervalGrid(double l) : lambda(l) {
    if (!(l > 0) || !std::isfinite(l)) throw ContractViolation("interval length must be positive");
}

double occupation_cov(const MatrixKernel& k, double lambda, long n) {
    if (!k.stationary()) throw ContractViolation("occupation_cov needs a stationary kernel");
    IntervalGrid grid(lambda);
    n = std::labs(n);
    quad::Options o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-15;
    o.initial_panels = 2 + static_cast<int>(std::ceil(2 * lambda));
    double c = n * lambda;
    auto tent = [&](double u) { return F(k, u) * (lambda - std::abs(u - c)); };
    if (n == 0) {
        double pair = 2 * quad::integrate(tent, 0, lambda, o).value;
        return rho1(k, 0.0) * lambda + pair;
    }
    return quad::integrate(tent, c - lambda, c + lambda, std::vector<double>{c}, o).value;
}

double CovarianceSeries::cov(long n) const {
    n = std::labs(n);
    if (n > n_max) throw ContractViolation("covariance index beyond the computed range");
    return values[n];
}

CovarianceSeries covariance_series(const MatrixKernel& k, double lambda, int n_max, Exec exec) {
    if (n_max < 8) throw ContractViolation("covariance_series: n_max must be at least 8");
    CovarianceSeries s;
    s.process = k.name();
    s.lambda = lambda;
    s.n_max = n_max;
    s.values.resize(n_max + 1);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (int n = 0; n <= n_max; ++n) s.values[n] = occupation_cov(k, lambda, n);
    } else {
        for (int n = 0; n <= n_max; ++n) s.values[n] = occupation_cov(k, lambda, n);
    }
    s.tail = (k.beta() == 4 && !even_integer(lambda)) ? CovTail::Harmonic : CovTail::InverseSquare;
    double signed_acc = 0;
    int cnt = 0;
    for (int n = n_max / 2; n <= n_max; ++n) {
        double m = double(n) * n * s.values[n];
        s.tail_abs_constant = std::max(s.tail_abs_constant, std::abs(m));
        signed_acc += m;
        ++cnt;
    }
    s.tail_constant = signed_acc / cnt;
    return s;
}

namespace {

// sum over n > N of 1/n^2.
double inverse_square_tail(int N) {
    double n = N;
    return 1 / n - 1 / (2 * n * n) + 1 / (6 * n * n * n);
}

}  // namespace

TotalSum cov_total_sum(const CovarianceSeries& s, int N) {
    if (N < 0 || N > s.n_max) throw ContractViolation("cov_total_sum: N outside [0, n_max]");
    double sum = s.values[0];
    for (int n = 1; n <= N; ++n) sum += 2 * s.values[n];
    double tail = 0;
    if (s.tail == CovTail::InverseSquare) {
        for (int n = N + 1; n <= s.n_max; ++n) tail += 2 * s.values[n];
        tail += 2 * s.tail_constant * inverse_square_tail(s.n_max);
    } else {
        tail = NAN;
    }
    return {sum, tail};
}

double cov_abs_tail(const CovarianceSeries& s, int N) {
    if (N < 1) throw ContractViolation("cov_abs_tail: N must be at least 1");
    if (s.tail == CovTail::Harmonic) return kInf;
    if (N > s.n_max) return 2 * s.tail_abs_constant * inverse_square_tail(N - 1);
    double t = 0;
    for (int n = N; n <= s.n_max; ++n) t += 2 * std::abs(s.values[n]);
    return t + 2 * s.tail_abs_constant * inverse_square_tail(s.n_max);
}

std::vector<double> partial_abs_sums(const CovarianceSeries& s, const std::vector<int>& Ns) {
    std::vector<double> out;
    for (int N : Ns) {
        if (N < 0 || N > s.n_max) throw ContractViolation("partial_abs_sums: N outside [0, n_max]");
        double acc = std::abs(s.values[0]);
        for (int n = 1; n <= N; ++n) acc += 2 * std::abs(s.values[n]);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> divergence_probe_sine4_lambda1(const std::vector<int>& Ns) {
    int top = 8;
    for (int N : Ns) top = std::max(top, N);
    auto s = covariance_series(matrix_kernel(KernelName::sine4), 1.0, top);
    return partial_abs_sums(s, Ns);
}

void write_covariance_csv(std::ostream& os, const CovarianceSeries& s) {
    os << "process,lambda,n,cov\n";
    for (int n = -s.n_max; n <= s.n_max; ++n)
        os << io::csv_row({to_string(s.process), io::num(s.lambda), std::to_string(n), io::num(s.cov(n))});
}

std::string covariance_summary_json(const CovarianceSeries& s) {
    nlohmann::ordered_json j;
    j["process"] = to_string(s.process);
    j["lambda"] = s.lambda;
    j["n_max"] = s.n_max;
    j["tail_model"] = s.tail == CovTail::InverseSquare ? "inverse-square" : "harmonic";
    j["tail_constant"] = s.tail_constant;
    nlohmann::ordered_json totals = nlohmann::ordered_json::array();
    for (int N : {10, 50, 100, 200, s.n_max}) {
        if (N > s.n_max) continue;
        auto t = cov_total_sum(s, N);
        totals.push_back({{"N", N}, {"sum", t.sum}, {"tail_estimate", std::isnan(t.tail_estimate) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.tail_estimate)}});
    }
    j["total_sums"] = totals;
    nlohmann::ordered_json tails = nlohmann::ordered_json::array();
    for (int N : {10, 20, 50, 100}) {
        if (N > s.n_max) continue;
        double t = cov_abs_tail(s, N);
        tails.push_back({{"N", N}, {"abs_tail", std::isinf(t) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t)},
                         {"N_times_tail", std::isinf(t) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(N * t)}});
    }
    j["abs_tails"] = tails;
    std::vector<int> Ns;
    for (int N : {100, 200, 400})
        if (N <= s.n_max) Ns.push_back(N);
    auto S = partial_abs_sums(s, Ns);
    nlohmann::ordered_json growth = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < Ns.size(); ++i) growth.push_back({{"N", Ns[i]}, {"abs_sum", S[i]}});
    j["growth"] = growth;
    if (Ns.size() >= 2) j["gain"] = S.back() - S.front();
    return j.dump(2);
}

}  // namespace ppp
