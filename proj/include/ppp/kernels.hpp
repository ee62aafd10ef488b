#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppp {

enum class KernelName { sine1, sine4, bessel1, bessel4 };

KernelName parse_kernel_name(std::string_view name);
std::string to_string(KernelName name);

// Symmetric determinantal Bessel kernel on (0, inf).
double bessel2(double a, double x, double y);

// Scalar kernels behind the Pfaffian Bessel matrices.
double bessel4_scalar(double s, double x, double y);
double bessel1_scalar(double s, double x, double y);

struct KernelEntries {
    double k11, k12, k21, k22;
    double det() const { return k11 * k22 - k12 * k21; }
};

namespace detail {

// Per-point data cached by a scalar kernel (Bessel values at the point).
struct Node {
    double x = 0;
    double p = 0;    // Bessel argument attached to x
    double ja = 0;   // J_a(p)
    double ja1 = 0;  // J_{a+1}(p)
    double big = 0;  // F(x) (beta 4) or T(x) (beta 1)
    double small = 0;  // g(x) (beta 4) or h(x) (beta 1)
};

class ScalarModel {
public:
    virtual ~ScalarModel() = default;
    virtual Node node(double x) const = 0;
    virtual double value(const Node& x, const Node& y) const = 0;
    virtual double dx(const Node& x, const Node& y) const = 0;
    // integral of K(x, t) over t in [x, y]
    virtual double integral(const Node& x, const Node& y) const = 0;
    virtual bool stationary() const = 0;
    virtual double domain_min() const = 0;  // -inf or 0
};

}  // namespace detail

class MatrixKernel {
public:
    KernelName name() const { return name_; }
    std::optional<double> s() const { return s_; }
    int beta() const;
    bool stationary() const { return model_->stationary(); }
    bool in_domain(double x) const;
    double prefactor() const { return name_ == KernelName::sine4 ? 0.5 : 1.0; }
    std::string label() const;

    KernelEntries operator()(double x, double y) const;

    // Scalar kernel K(x, y), its x-derivative and the entry integral over [x, y].
    double scalar(double x, double y) const;
    double scalar_dx(double x, double y) const;
    double scalar_integral(double x, double y) const;

    const detail::ScalarModel& model() const { return *model_; }

    // det K(x, y) from cached nodes and a precomputed entry integral q = int_x^y K(x, t) dt.
    double det_from(const detail::Node& x, const detail::Node& y, double q) const;

private:
    friend MatrixKernel matrix_kernel(KernelName, std::optional<double>);
    KernelName name_{};
    std::optional<double> s_;
    std::shared_ptr<const detail::ScalarModel> model_;
};

MatrixKernel matrix_kernel(KernelName name, std::optional<double> s = std::nullopt);
MatrixKernel matrix_kernel(std::string_view name, std::optional<double> s = std::nullopt);

double rho1(const MatrixKernel& k, double x);
double rho2_truncated(const MatrixKernel& k, double x, double y);

struct CorrelationResult {
    double value;
    bool degenerate;
};

CorrelationResult correlation_checked(const MatrixKernel& k, const std::vector<double>& points);
double correlation(const MatrixKernel& k, const std::vector<double>& points);

}  // namespace ppp
