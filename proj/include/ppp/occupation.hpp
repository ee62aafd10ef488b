#pragma once

#include "ppp/kernels.hpp"
#include "ppp/parallel.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ppp {

// Intervals I_n = [n lambda - lambda/2, n lambda + lambda/2).
struct IntervalGrid {
    explicit IntervalGrid(double lambda);
    double lambda;
    double left(long n) const { return (n - 0.5) * lambda; }
    double right(long n) const { return (n + 0.5) * lambda; }
};

// Cov(X_0, X_n) of the interval counts, as int F(u) w_n(u) du with the tent overlap
// w_n(u) = (lambda - |u - n lambda|)_+ (plus rho lambda for n = 0).
double occupation_cov(const MatrixKernel& k, double lambda, long n);

enum class CovTail {
    InverseSquare,  // |Cov_n| = O(n^-2), summable
    Harmonic        // cos-over-x part survives: absolute sums diverge
};

struct CovarianceSeries {
    KernelName process{};
    double lambda = 0;
    int n_max = 0;
    std::vector<double> values;  // Cov(X_0, X_n), n = 0..n_max
    CovTail tail = CovTail::InverseSquare;
    double tail_constant = 0;  // Cov_n ~ tail_constant / n^2 for large n
    double tail_abs_constant = 0;  // max n^2 |Cov_n| over the upper half of the range
    double cov(long n) const;
};

CovarianceSeries covariance_series(const MatrixKernel& k, double lambda, int n_max = 512,
                                   Exec exec = Exec::Parallel);

struct TotalSum {
    double sum;            // sum over |n| <= N
    double tail_estimate;  // modeled sum over |n| > N
};
TotalSum cov_total_sum(const CovarianceSeries& s, int N);

// sum over N <= |n| <= n_max of |Cov| plus the modeled tail; inf for a harmonic tail.
double cov_abs_tail(const CovarianceSeries& s, int N);

// S_N = sum over |n| <= N of |Cov_n| for each N.
std::vector<double> partial_abs_sums(const CovarianceSeries& s, const std::vector<int>& Ns);
std::vector<double> divergence_probe_sine4_lambda1(const std::vector<int>& Ns);

void write_covariance_csv(std::ostream& os, const CovarianceSeries& s);
std::string covariance_summary_json(const CovarianceSeries& s);

}  // namespace ppp
