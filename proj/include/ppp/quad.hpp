#pragma once

#include <functional>
#include <vector>

namespace ppp::quad {

using Integrand = std::function<double(double)>;

enum class Singularity { None, Left, Right, Both };

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
    int initial_panels = 1;
    Singularity singularity = Singularity::None;  // integrable algebraic endpoint behaviour
};

struct Result {
    double value = 0;
    double error = 0;
    int evaluations = 0;
};

// Adaptive Gauss-Kronrod (10/21) with global bisection. Throws QuadratureError
// carrying the partial value when the subdivision budget runs out.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

// Same, splitting first at the given interior breakpoints.
Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                 const Options& opt = {});

// How the oscillatory factor of a tail integrand looks.
struct Oscillation {
    enum class Kind {
        Period,        // zeros spaced by half a period, alternating lobes
        BesselZeros,   // factor J_nu(scale * t): lobes between consecutive zeros
        AlignedPeriod  // all frequencies are multiples of 2 pi / period; envelopes algebraic
    };
    Kind kind = Kind::Period;
    double period = 0;
    double nu = 0;
    double scale = 1;
    double exponent_step = 1;  // AlignedPeriod: remainder expands in powers of n^{-step}
};

struct TailOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-6;
    int max_lobes = 20000;
    Options lobe;  // per-lobe adaptive settings
};

// Integral of f over [a, inf). Lobe sums are accelerated with iterated Aitken
// (alternating lobes) or Richardson extrapolation in n^{-step} (aligned periods).
Result integrate_oscillatory_tail(const Integrand& f, double a, const Oscillation& osc,
                                  const TailOptions& opt = {});

// Caller-supplied lobe integrals, invoked on consecutive intervals in order;
// lets stateful integrands carry running integrals along the path.
using LobeIntegral = std::function<double(double, double)>;
Result integrate_lobes(const LobeIntegral& lobe, double a, const Oscillation& osc,
                       const TailOptions& opt = {});

// Plain partial sums over the first n lobes, for cross-checks.
double lobe_partial_sum(const Integrand& f, double a, const Oscillation& osc, int n,
                        const Options& lobe = {});

// Iterated Aitken delta-squared on a sequence; returns the final estimate and
// the difference to the previous level as error.
Result iterated_aitken(const std::vector<double>& partial_sums);

// Richardson (Neville) extrapolation to h = 0 of values taken at h_i.
Result richardson(const std::vector<double>& h, const std::vector<double>& values);

// n-point Gauss-Legendre on [-1, 1] and its cumulative integration matrix
// S(i, j) = integral over [-1, x_i] of the j-th Lagrange basis polynomial.
struct GaussLegendre {
    explicit GaussLegendre(int n);
    int n;
    std::vector<double> x, w;
    std::vector<double> S;  // row-major n x n
};

const GaussLegendre& gauss_legendre(int n);

}  // namespace ppp::quad
