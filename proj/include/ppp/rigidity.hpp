#pragma once

#include "ppp/kernels.hpp"
#include "ppp/parallel.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace ppp {

// 1 on [0, R], 1 - log(x - R + 1)/log(T - R + 1) on [R, T], 0 beyond T.
class TaperFunction {
public:
    TaperFunction(double R, double T);
    double operator()(double x) const;
    double R() const { return R_; }
    double T() const { return T_; }

private:
    double R_, T_, logw_;
};

double taper_eval(const TaperFunction& t, double x);

// Bounded test function with compact support [lo, hi]; `breaks` lists points
// where f is not smooth.
struct AdditiveStatistic {
    std::function<double(double)> f;
    double lo = 0, hi = 0;
    std::vector<double> breaks;
};

// One-sided taper on [0, T], or mirrored phi(|x|) on [-T, T].
AdditiveStatistic taper_statistic(const TaperFunction& t, bool two_sided);
AdditiveStatistic indicator_statistic(double a, double b);
AdditiveStatistic zero_statistic();

struct VarianceOptions {
    Exec exec = Exec::Parallel;
    double panel = 0.5;   // panel width in the mapped coordinate
    int nodes = 16;       // Gauss-Legendre nodes per panel
    bool force_grid = false;  // use the 2D grid route for stationary kernels too
};

struct VarianceResult {
    double variance = 0;
    double error_estimate = 0;
};

// Var S_f = int f^2 rho1 - int int f(x) f(y) det K(x, y) dx dy, evaluated on a
// Gauss-Legendre panel grid (sqrt-mapped on the half-line) or, for stationary
// kernels, through the autocorrelation of f.
VarianceResult variance_additive(const MatrixKernel& k, const AdditiveStatistic& f,
                                 const VarianceOptions& opt = {});

// Two-term form: int f^2 (rho1 - int det K dy) + 1/2 int int |f(x) - f(y)|^2 det K,
// stationary kernels only.
struct VarianceSplit {
    double screening_term;
    double pair_term;
    double total() const { return screening_term + pair_term; }
};
VarianceSplit variance_general_split(const MatrixKernel& k, const AdditiveStatistic& f);

// int K(x, y) K(y, x) dy - K(x, x) for the scalar kernel.
double defect(const MatrixKernel& k, double x);
double defect_closed_form(const MatrixKernel& k, double x);

// int det K(x, y) dy - rho1(x) by quadrature over the whole domain.
double screening_residual(const MatrixKernel& k, double x);
double screening_residual_closed_form(const MatrixKernel& k, double x);

// int over [x - M, x + M] of rho^(2,T)(x, y) dy, stationary kernels.
double screening_integral_symmetric(const MatrixKernel& k, double x, double M);

// int_0^X of the closed-form residual.
double screening_average(const MatrixKernel& k, double X);

struct SweepRow {
    double T;
    double variance;
    double error_estimate;
};

std::vector<SweepRow> variance_sweep(const MatrixKernel& k, double R, const std::vector<double>& Ts,
                                     const VarianceOptions& opt = {});
void write_sweep_csv(std::ostream& os, const MatrixKernel& k, double R, const std::vector<SweepRow>& rows);

}  // namespace ppp
