#pragma once

#include "ppp/kernels.hpp"
#include "ppp/rigidity.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace ppp {

enum class TailModel { InverseSquare, CosineOverX };

// rho^(2,T)(x, 0) = F(x) of a stationary Pfaffian kernel with its large-x model.
class StationaryProfile {
public:
    explicit StationaryProfile(const MatrixKernel& k);

    KernelName process() const { return kernel_.name(); }
    double rho() const { return rho_; }
    TailModel tail_model() const;
    double F(double x) const;
    // Leading large-x behaviour used for the analytic Fourier tail.
    double F_tail(double x) const;

    // 2 int_0^X F cos(2 pi lambda x) dx plus the model tail beyond X.
    double fhat(double lambda) const;
    double truncation() const { return X_; }

    // max over x in [50, 500] of x^2 |F - leading oscillatory part|.
    double fitted_tail_constant() const;

private:
    struct Cache;
    MatrixKernel kernel_;
    double rho_;
    double X_ = 1e4;
    std::shared_ptr<Cache> cache_;
};

double fhat(const StationaryProfile& p, double lambda);

// Printed piecewise formulas for Fhat(lambda) - Fhat(0); +inf for sine4 at |lambda| = 1/2.
double closed_form_fhat_delta(KernelName process, double lambda);
// One branch evaluated regardless of |lambda| (lower: |lambda| <= 1 formula).
double closed_form_fhat_delta_branch(KernelName process, double lambda, bool upper);

enum class FhatSource { Numeric, ClosedForm };

double fhat_plus_rho(const StationaryProfile& p, double lambda, FhatSource src);

// |ghat(lambda)|^2 (Fhat(lambda) + rho).
double spectral_density(const StationaryProfile& p, const AdditiveStatistic& g, double lambda,
                        FhatSource src = FhatSource::ClosedForm);

// int over [-cut, cut] of ghat2(lambda) (Fhat + rho).
double spectral_variance(const StationaryProfile& p, const std::function<double(double)>& ghat2, double cut,
                         FhatSource src = FhatSource::ClosedForm);

struct LinearBoundReport {
    bool pass = true;
    int points = 0;
    double max_ratio = 0;  // max (Fhat + rho)/|lambda|
    double argmax = 0;
    double min_value = 0;  // min Fhat + rho
    std::vector<double> violations;
};

LinearBoundReport check_linear_bound(const StationaryProfile& p, double lambda_max, double C,
                                     FhatSource src = FhatSource::Numeric, int grid = 200);

struct Mollifier {
    AdditiveStatistic phi;                // not compactly supported: lo = -inf, hi = inf
    std::function<double(double)> psi;    // even spectral profile, int psi = 1
    int n = 0;
    double R = 0;
    double k = 0;      // psi supported in [eps, 1/k] in |lambda|
    double eps = 0;
    double C = 0;      // linear-bound constant used
    double variance = 0;  // int psi^2 (Fhat + rho)
    double sup_deviation = 0;  // sup_{|x| <= R} |phi - 1| on a grid
};

Mollifier build_mollifier(const StationaryProfile& p, int n, double R);

void write_fhat_csv(std::ostream& os, const StationaryProfile& p, const std::vector<double>& lambdas);
void write_fhat_svg(std::ostream& os, const StationaryProfile& p, const std::vector<double>& lambdas);

}  // namespace ppp
