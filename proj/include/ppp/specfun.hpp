#pragma once

namespace ppp {

// Real Bessel order, nu > -1.
class BesselOrder {
public:
    explicit BesselOrder(double nu);
    double value() const { return nu_; }
    operator double() const { return nu_; }

private:
    double nu_;
};

double bessel_j(BesselOrder nu, double x);

// J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
double bessel_j_deriv(BesselOrder nu, double x);

// Integral of J_nu over [0, x].
double bessel_j_cumulative(BesselOrder nu, double x);

// Integral of J_nu over [x, inf) = 1 - bessel_j_cumulative.
double bessel_j_tail(BesselOrder nu, double x);

// k-th positive zero of J_nu (k >= 1): McMahon start plus Newton.
double bessel_j_zero(BesselOrder nu, int k);

double sine_integral(double x);
double cosine_integral(double x);  // x > 0

struct SineParts {
    double S;    // sin(pi x)/(pi x)
    double dS;   // S'(x)
    double IS;   // integral of S over [0, x]
    double eps;  // sgn(x)/2, eps(0) = 0
};

SineParts sine_kernel_parts(double x);

}  // namespace ppp
